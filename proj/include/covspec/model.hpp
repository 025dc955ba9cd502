#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covspec {

// Piecewise-constant matrix integrand: value matrices[l] on
// [breakpoints[l], breakpoints[l+1]), l = 0..m-1, over the unit interval.
struct StepIntegrand {
  std::vector<double> breakpoints;        // 0 = t_0 < ... < t_m = 1
  std::vector<Eigen::MatrixXd> matrices;  // m square N x N matrices
  double tau0 = 0.0;                      // declared operator-norm cap

  int interval_count() const { return static_cast<int>(matrices.size()); }
  int dimension() const { return matrices.empty() ? 0 : static_cast<int>(matrices[0].rows()); }
  double interval_length(int l) const { return breakpoints[l + 1] - breakpoints[l]; }
  std::vector<double> interval_lengths() const;

  // Throws ValidationError if breakpoints are not a strictly increasing
  // partition of [0,1], dimensions disagree, or some ||T_l||_op exceeds
  // tau0 * (1 + 1e-8).
  void validate() const;
};

struct ModelConfig {
  int N = 0;
  int n = 0;
  double c = 0.0;  // N/n
  std::uint64_t master_seed = 0;
  int reps = 1;

  void validate() const;
};

enum class EnsembleKind {
  kIdentity,
  kScaledIdentity,
  kDiagonalFromSpectrum,
  kCommonBasisDiagonalFamily,
  kHaarRotatedDiagonal,
};

struct TwoPointLaw {
  double value_a = 0.0;
  double value_b = 0.0;
  double weight_a = 0.5;
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::kIdentity;
  double scale = 1.0;                      // scaled_identity
  std::vector<double> spectrum;            // diagonal entries of T_l
  std::optional<TwoPointLaw> two_point;    // alternative to an explicit spectrum
};

EnsembleKind ensemble_kind_from_string(const std::string& s);
std::string to_string(EnsembleKind k);

// Largest singular value. Throws on non-square or non-finite input.
double operator_norm(const Eigen::MatrixXd& T);

// Materializes one matrix per interval. Deterministic in (specs, N, seed).
// Diagonal spectra are laid out block-replicated; 'diagonal_from_spectrum'
// and 'haar_rotated_diagonal' sort ascending first, while
// 'common_basis_diagonal_family' keeps the given order so that positional
// alignment across the family defines the joint spectrum.
StepIntegrand build_integrand(const std::vector<EnsembleSpec>& specs,
                              const std::vector<double>& breakpoints, int N,
                              std::uint64_t seed);

// Orthogonal factor of a square standard-Gaussian matrix, with the
// convention that the triangular factor has positive diagonal.
Eigen::MatrixXd haar_orthogonal(int N, std::uint64_t seed, std::uint64_t stream_word);

}  // namespace covspec
