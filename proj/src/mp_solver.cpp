#include "covspec/mp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "covspec/errors.hpp"

namespace covspec {

void SpectralLaw::validate() const {
  if (atoms.empty() || atoms.size() != weights.size())
    throw ValidationError("spectral law: atoms and weights must be non-empty and equal length");
  double total = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] < 0.0) throw ValidationError("spectral law: atoms must be nonnegative");
    if (!(weights[i] > 0.0)) throw ValidationError("spectral law: weights must be positive");
    if (i > 0 && atoms[i] < atoms[i - 1])
      throw ValidationError("spectral law: atoms must be sorted ascending");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("spectral law: weights must sum to 1");
}

std::complex<double> stieltjes_transform(const SpectralLaw& law, std::complex<double> z) {
  if (!(z.imag() > 0.0))
    throw ValidationError("stieltjes_transform: Im z must be positive");
  std::complex<double> sum = 0.0;
  for (size_t i = 0; i < law.atoms.size(); ++i) sum += law.weights[i] / (law.atoms[i] - z);
  return sum;
}

namespace {

// c * int x / (1 + x v) dF(x)
std::complex<double> weighted_resolvent(const SpectralLaw& law, double c,
                                        std::complex<double> v) {
  std::complex<double> sum = 0.0;
  for (size_t i = 0; i < law.atoms.size(); ++i)
    sum += law.weights[i] * law.atoms[i] / (1.0 + law.atoms[i] * v);
  return c * sum;
}

}  // namespace

double mp_residual(const SpectralLaw& law, double c, std::complex<double> z,
                   std::complex<double> v) {
  return std::abs(z - weighted_resolvent(law, c, v) + 1.0 / v);
}

std::complex<double> solve_mp_equation(const SpectralLaw& law, double c, std::complex<double> z,
                                       const MpSolveOptions& opts) {
  law.validate();
  if (!(z.imag() > 0.0)) throw ValidationError("solve_mp_equation: Im z must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw ValidationError("solve_mp_equation: damping must be in (0, 1]");

  std::complex<double> v = -1.0 / z;
  double residual = mp_residual(law, c, z, v);
  for (int iter = 0; iter < opts.max_iter && residual >= opts.tol; ++iter) {
    const std::complex<double> next = -1.0 / (z - weighted_resolvent(law, c, v));
    v = (1.0 - opts.damping) * v + opts.damping * next;
    residual = mp_residual(law, c, z, v);
  }
  if (residual >= opts.tol) {
    std::ostringstream os;
    os << "solve_mp_equation: no convergence at z = " << z.real() << " + " << z.imag()
       << "i after " << opts.max_iter << " iterations (residual " << residual << ")";
    throw ConvergenceError(os.str(), residual);
  }
  if (v.imag() < 0.0)
    throw ConvergenceError("solve_mp_equation: converged to a non-Herglotz point", residual);
  return v;
}

std::complex<double> companion_to_esd(std::complex<double> v, std::complex<double> z, double c) {
  if (c == 0.0) throw ValidationError("companion_to_esd: c must be nonzero");
  return (v + (1.0 - c) / z) / c;
}

std::complex<double> esd_to_companion(std::complex<double> m, std::complex<double> z, double c) {
  return c * m - (1.0 - c) / z;
}

std::vector<double> density_from_stieltjes(const std::vector<std::complex<double>>& m_values) {
  std::vector<double> density(m_values.size(), 0.0);
  for (size_t i = 0; i < m_values.size(); ++i) {
    const double d = m_values[i].imag() / M_PI;
    if (d < -1e-9) throw InvariantError("density_from_stieltjes: negative density");
    density[i] = std::max(0.0, d);
  }
  return density;
}

StieltjesGrid solve_mp_grid(const SpectralLaw& law, double c, const std::vector<double>& energies,
                            double eta, const MpSolveOptions& opts, int threads,
                            bool require_all_converged) {
  if (!(eta > 0.0)) throw ValidationError("solve_mp_grid: eta must be positive");
  StieltjesGrid grid;
  grid.energies = energies;
  grid.eta = eta;
  grid.v_values.assign(energies.size(), 0.0);
  grid.m_values.assign(energies.size(), 0.0);
  grid.converged.assign(energies.size(), false);
  grid.point_mass_at_zero = c > 1.0 ? 1.0 - 1.0 / c : 0.0;

  const auto solve_point = [&](size_t i) {
    const std::complex<double> z(energies[i], eta);
    try {
      const std::complex<double> v = solve_mp_equation(law, c, z, opts);
      grid.v_values[i] = v;
      grid.m_values[i] = companion_to_esd(v, z, c);
      grid.converged[i] = true;
    } catch (const ConvergenceError&) {
      grid.converged[i] = false;
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1 || energies.size() < 2) {
    for (size_t i = 0; i < energies.size(); ++i) solve_point(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = static_cast<size_t>(w); i < energies.size();
             i += static_cast<size_t>(workers))
          solve_point(i);
      });
    for (auto& t : pool) t.join();
  }

  if (require_all_converged)
    for (size_t i = 0; i < energies.size(); ++i)
      if (!grid.converged[i]) {
        std::ostringstream os;
        os << "solve_mp_grid: grid point E = " << energies[i] << " did not converge";
        throw ConvergenceError(os.str(), 0.0);
      }

  grid.density = density_from_stieltjes(grid.m_values);
  for (size_t i = 0; i < energies.size(); ++i)
    if (!grid.converged[i]) grid.density[i] = 0.0;
  return grid;
}

double mp_reference_density(double c, double x) {
  if (!(c > 0.0)) throw ValidationError("mp_reference_density: c must be positive");
  const double sqrt_c = std::sqrt(c);
  const double a = (1.0 - sqrt_c) * (1.0 - sqrt_c);
  const double b = (1.0 + sqrt_c) * (1.0 + sqrt_c);
  if (x <= a || x >= b || x <= 0.0) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * M_PI * c * x);
}

double mp_reference_point_mass(double c) { return c > 1.0 ? 1.0 - 1.0 / c : 0.0; }

double grid_quadrature(const std::vector<double>& energies, const std::vector<double>& values,
                       int power) {
  if (energies.size() != values.size() || energies.size() < 2)
    throw ValidationError("grid_quadrature: need matching grids with >= 2 points");
  double sum = 0.0;
  for (size_t i = 0; i + 1 < energies.size(); ++i) {
    const double f0 = values[i] * std::pow(energies[i], power);
    const double f1 = values[i + 1] * std::pow(energies[i + 1], power);
    sum += 0.5 * (f0 + f1) * (energies[i + 1] - energies[i]);
  }
  return sum;
}

CarlemanReport carleman_bound_check(const std::vector<double>& moments, int m, double tau0,
                                    double c, const std::vector<double>& deltas) {
  if (moments.size() < 2)
    throw ValidationError("carleman_bound_check: need moments up to order >= 2");
  if (deltas.empty()) throw ValidationError("carleman_bound_check: deltas empty");
  const double min_dt = *std::min_element(deltas.begin(), deltas.end());
  if (!(min_dt > 0.0)) throw ValidationError("carleman_bound_check: deltas must be positive");

  CarlemanReport report;
  const double edge = 1.0 + std::sqrt(c / min_dt);
  report.growth_base = m * tau0 * tau0 * edge * edge;

  report.all_pass = true;
  for (int order = 2; order <= static_cast<int>(moments.size()); order += 2) {
    CarlemanCheck check;
    check.order = order;
    check.moment = moments[static_cast<size_t>(order - 1)];
    check.bound = std::pow(report.growth_base, order);
    check.pass = check.moment <= check.bound;
    report.all_pass = report.all_pass && check.pass;
    report.checks.push_back(check);
  }
  if (report.all_pass) {
    std::ostringstream os;
    os << "Carleman sum diverges: lower bound sum B^-1 = infinity (B = " << report.growth_base
       << ")";
    report.statement = os.str();
  } else {
    report.statement = "bound violated; no divergence conclusion";
  }
  return report;
}

}  // namespace covspec
