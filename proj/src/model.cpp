#include "covspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covspec/errors.hpp"
#include "covspec/rng.hpp"

namespace covspec {

std::vector<double> StepIntegrand::interval_lengths() const {
  std::vector<double> out(matrices.size());
  for (size_t l = 0; l < matrices.size(); ++l) out[l] = breakpoints[l + 1] - breakpoints[l];
  return out;
}

void StepIntegrand::validate() const {
  if (matrices.empty()) throw ValidationError("integrand: no intervals");
  if (breakpoints.size() != matrices.size() + 1)
    throw ValidationError("integrand: breakpoints must have one more entry than matrices");
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
    throw ValidationError("integrand: breakpoints must start at 0 and end at 1");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw ValidationError("integrand: breakpoints must be strictly increasing");

  const int N = dimension();
  if (N < 1) throw ValidationError("integrand: dimension must be >= 1");
  for (const auto& T : matrices) {
    if (T.rows() != T.cols()) throw ValidationError("integrand: matrices must be square");
    if (T.rows() != N) throw ValidationError("integrand: matrices must share one dimension");
  }
  for (size_t l = 0; l < matrices.size(); ++l) {
    const double nrm = operator_norm(matrices[l]);
    if (nrm > tau0 * (1.0 + 1e-8)) {
      std::ostringstream os;
      os << "integrand: operator norm " << nrm << " of interval " << l + 1
         << " exceeds declared cap " << tau0;
      throw ValidationError(os.str());
    }
  }
}

void ModelConfig::validate() const {
  if (N < 1) throw ValidationError("model.N must be >= 1");
  if (n < 1) throw ValidationError("model.n must be >= 1");
  if (!(c > 0.0)) throw ValidationError("model.c must be > 0");
  if (std::abs(c * static_cast<double>(n) - static_cast<double>(N)) > 1e-9 * N)
    throw ValidationError("model.c must equal N/n");
  if (reps < 1) throw ValidationError("run.reps must be >= 1");
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "identity") return EnsembleKind::kIdentity;
  if (s == "scaled_identity") return EnsembleKind::kScaledIdentity;
  if (s == "diagonal_from_spectrum") return EnsembleKind::kDiagonalFromSpectrum;
  if (s == "common_basis_diagonal_family") return EnsembleKind::kCommonBasisDiagonalFamily;
  if (s == "haar_rotated_diagonal") return EnsembleKind::kHaarRotatedDiagonal;
  throw ValidationError("unknown ensemble kind: " + s);
}

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::kIdentity: return "identity";
    case EnsembleKind::kScaledIdentity: return "scaled_identity";
    case EnsembleKind::kDiagonalFromSpectrum: return "diagonal_from_spectrum";
    case EnsembleKind::kCommonBasisDiagonalFamily: return "common_basis_diagonal_family";
    case EnsembleKind::kHaarRotatedDiagonal: return "haar_rotated_diagonal";
  }
  return "?";
}

double operator_norm(const Eigen::MatrixXd& T) {
  if (T.rows() != T.cols()) throw ValidationError("operator_norm: matrix must be square");
  if (!T.allFinite()) throw ValidationError("operator_norm: non-finite entries");
  if (T.rows() == 1) return std::abs(T(0, 0));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(T);
  return svd.singularValues()(0);
}

namespace {

std::vector<double> resolve_spectrum(const EnsembleSpec& spec, int N) {
  std::vector<double> values;
  if (spec.two_point) {
    const auto& tp = *spec.two_point;
    if (tp.weight_a < 0.0 || tp.weight_a > 1.0)
      throw ValidationError("two-point law: weight must be in [0,1]");
    const double na_real = tp.weight_a * N;
    const auto na = static_cast<int>(std::llround(na_real));
    if (std::abs(na_real - na) > 1e-9)
      throw ValidationError("two-point law: weight_a * N must be an integer");
    values.assign(static_cast<size_t>(na), tp.value_a);
    values.insert(values.end(), static_cast<size_t>(N - na), tp.value_b);
  } else {
    values = spec.spectrum;
  }
  if (values.empty()) throw ValidationError("spectrum: empty");
  for (double v : values)
    if (v < 0.0) throw ValidationError("spectrum: negative entry");
  if (N % static_cast<int>(values.size()) != 0)
    throw ValidationError("spectrum: length does not divide N");
  return values;
}

Eigen::MatrixXd block_replicated_diagonal(std::vector<double> values, int N, bool ascending) {
  if (ascending) std::sort(values.begin(), values.end());
  const int block = N / static_cast<int>(values.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  int idx = 0;
  for (double v : values)
    for (int b = 0; b < block; ++b) D(idx, idx) = v, ++idx;
  return D;
}

}  // namespace

Eigen::MatrixXd haar_orthogonal(int N, std::uint64_t seed, std::uint64_t stream_word) {
  Eigen::MatrixXd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      G(i, j) = rng::gaussian(seed, rng::kEnsemble, stream_word,
                              static_cast<std::uint64_t>(i) * N + j, 0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd& R = qr.matrixQR();
  for (int j = 0; j < N; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

StepIntegrand build_integrand(const std::vector<EnsembleSpec>& specs,
                              const std::vector<double>& breakpoints, int N,
                              std::uint64_t seed) {
  if (specs.size() + 1 != breakpoints.size())
    throw ValidationError("build_integrand: specs length must be breakpoints length - 1");
  if (N < 1) throw ValidationError("build_integrand: N must be >= 1");

  StepIntegrand out;
  out.breakpoints = breakpoints;
  out.matrices.reserve(specs.size());
  for (size_t l = 0; l < specs.size(); ++l) {
    const EnsembleSpec& spec = specs[l];
    switch (spec.kind) {
      case EnsembleKind::kIdentity:
        out.matrices.emplace_back(Eigen::MatrixXd::Identity(N, N));
        break;
      case EnsembleKind::kScaledIdentity:
        out.matrices.emplace_back(spec.scale * Eigen::MatrixXd::Identity(N, N));
        break;
      case EnsembleKind::kDiagonalFromSpectrum:
        out.matrices.emplace_back(block_replicated_diagonal(resolve_spectrum(spec, N), N, true));
        break;
      case EnsembleKind::kCommonBasisDiagonalFamily:
        out.matrices.emplace_back(block_replicated_diagonal(resolve_spectrum(spec, N), N, false));
        break;
      case EnsembleKind::kHaarRotatedDiagonal: {
        Eigen::MatrixXd D = block_replicated_diagonal(resolve_spectrum(spec, N), N, true);
        Eigen::MatrixXd Q = haar_orthogonal(N, seed, static_cast<std::uint64_t>(l));
        out.matrices.emplace_back(Q * D * Q.transpose());
        break;
      }
    }
  }
  double cap = 0.0;
  for (const auto& T : out.matrices) cap = std::max(cap, operator_norm(T));
  out.tau0 = cap;
  out.validate();
  return out;
}

}  // namespace covspec
