#pragma once

#include <complex>
#include <string>
#include <vector>

namespace covspec {

// Discrete population spectral law (atoms with positive weights summing
// to 1, sorted ascending).
struct SpectralLaw {
  std::vector<double> atoms;
  std::vector<double> weights;

  static SpectralLaw point_mass(double x) { return {{x}, {1.0}}; }
  void validate() const;
};

// sum w_j / (x_j - z), Im z > 0. The result has positive imaginary part.
std::complex<double> stieltjes_transform(const SpectralLaw& law, std::complex<double> z);

struct MpSolveOptions {
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 10000;
};

// Damped substitution for the self-consistent equation
//   -1/v = z - c * int x/(1 + x v) dF(x),
// initialized at v = -1/z. Returns v with residual below tol; throws
// ConvergenceError (carrying the final residual) otherwise.
std::complex<double> solve_mp_equation(const SpectralLaw& law, double c, std::complex<double> z,
                                       const MpSolveOptions& opts = {});

// Residual of a candidate solution.
double mp_residual(const SpectralLaw& law, double c, std::complex<double> z,
                   std::complex<double> v);

// v = -(1-c)/z + c*m inverted for the sample-side Stieltjes transform.
std::complex<double> companion_to_esd(std::complex<double> v, std::complex<double> z, double c);
std::complex<double> esd_to_companion(std::complex<double> m, std::complex<double> z, double c);

struct StieltjesGrid {
  std::vector<double> energies;
  double eta = 1e-3;
  std::vector<std::complex<double>> v_values;
  std::vector<std::complex<double>> m_values;
  std::vector<double> density;     // (1/pi) Im m, clipped at 0
  std::vector<bool> converged;     // per grid point
  double point_mass_at_zero = 0.0; // max(0, 1 - 1/c), reported for c > 1
};

// Solves the equation across the grid and recovers the density. Grid points
// that fail to converge are flagged, not fatal; `require_all_converged`
// escalates them to ConvergenceError.
StieltjesGrid solve_mp_grid(const SpectralLaw& law, double c, const std::vector<double>& energies,
                            double eta, const MpSolveOptions& opts = {}, int threads = 1,
                            bool require_all_converged = false);

// Density values via (1/pi) Im m(E + i eta); small negative values (>= -1e-9)
// are zeroed, larger ones throw.
std::vector<double> density_from_stieltjes(const std::vector<std::complex<double>>& m_values);

// Closed-form reference density sqrt((b-x)(x-a)) / (2 pi c x) on
// [a,b] = [(1-sqrt(c))^2, (1+sqrt(c))^2]; zero outside. For c > 1 the point
// mass 1 - 1/c at zero is reported separately by mp_reference_point_mass.
double mp_reference_density(double c, double x);
double mp_reference_point_mass(double c);

// Trapezoid quadrature of f over the grid.
double grid_quadrature(const std::vector<double>& energies, const std::vector<double>& values,
                       int power = 0);

struct CarlemanCheck {
  int order = 0;       // 2k
  double moment = 0.0;  // m_{2k}
  double bound = 0.0;   // B^{2k}
  bool pass = false;
};

struct CarlemanReport {
  double growth_base = 0.0;  // B = m * tau0^2 * (1 + sqrt(c / min dt))^2
  std::vector<CarlemanCheck> checks;
  bool all_pass = false;
  std::string statement;
};

// Checks m_{2k} <= B^{2k} for the even orders available in `moments`
// (moments[i] = m_{i+1}); all passing implies the moment-problem sum
// sum m_{2k}^{-1/(2k)} >= sum 1/B diverges.
CarlemanReport carleman_bound_check(const std::vector<double>& moments, int m, double tau0,
                                    double c, const std::vector<double>& deltas);

}  // namespace covspec
