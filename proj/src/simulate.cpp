#include "covspec/simulate.hpp"

#include <cmath>
#include <sstream>

#include "covspec/errors.hpp"
#include "covspec/rng.hpp"

namespace covspec {

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kPath: return "path";
    case EstimatorKind::kGram: return "gram";
    case EstimatorKind::kModified: return "modified";
  }
  return "?";
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
  if (s == "path") return EstimatorKind::kPath;
  if (s == "gram") return EstimatorKind::kGram;
  if (s == "modified") return EstimatorKind::kModified;
  throw ValidationError("unknown estimator kind: " + s);
}

void CovariationMatrix::check_symmetry() const {
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw InvariantError("covariation matrix asymmetric by " + std::to_string(asym));
}

namespace {

double overlap_length(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

// First grid increment lying fully inside [t_{l-1}, t_l); used to key the
// Gram columns onto the same streams as the path increments.
int first_full_increment(double t_left, int n) {
  return static_cast<int>(std::ceil(t_left * n - 1e-9)) + 1;
}

}  // namespace

Eigen::MatrixXd simulate_increments(const StepIntegrand& integrand, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("simulate: n must be >= 1");
  const int N = integrand.dimension();
  const int m = integrand.interval_count();

  Eigen::MatrixXd increments = Eigen::MatrixXd::Zero(N, n);
  Eigen::VectorXd g(N);
  for (int i = 1; i <= n; ++i) {
    const double lo = static_cast<double>(i - 1) / n;
    const double hi = static_cast<double>(i) / n;
    for (int l = 0; l < m; ++l) {
      const double lambda =
          overlap_length(lo, hi, integrand.breakpoints[l], integrand.breakpoints[l + 1]);
      if (lambda <= 0.0) continue;
      const double sd = std::sqrt(lambda);
      for (int comp = 0; comp < N; ++comp)
        g(comp) = sd * rng::gaussian(seed, rng::kPathIncrement, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(comp));
      increments.col(i - 1).noalias() += integrand.matrices[l] * g;
    }
  }
  return increments;
}

CovariationMatrix path_covariation_from_increments(const Eigen::MatrixXd& increments,
                                                   const StepIntegrand& integrand, int n,
                                                   std::uint64_t seed) {
  const int N = integrand.dimension();
  CovariationMatrix out;
  out.entries = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < increments.cols(); ++i)
    out.entries.noalias() += increments.col(i) * increments.col(i).transpose();
  out.estimator_kind = EstimatorKind::kPath;
  out.N = N;
  out.n = n;
  out.seed = seed;
  return out;
}

CovariationMatrix simulate_path_covariation(const StepIntegrand& integrand, int n,
                                            std::uint64_t seed) {
  return path_covariation_from_increments(simulate_increments(integrand, n, seed), integrand, n,
                                          seed);
}

CovariationMatrix simulate_gram(const StepIntegrand& integrand, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("simulate: n must be >= 1");
  const int N = integrand.dimension();
  const int m = integrand.interval_count();

  CovariationMatrix out;
  out.entries = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd g(N);
  Eigen::VectorXd tg(N);
  for (int l = 0; l < m; ++l) {
    const double dt = integrand.interval_length(l);
    const int cols = static_cast<int>(std::floor(n * dt + 1e-9));
    if (cols < 1) {
      std::ostringstream os;
      os << "simulate_gram: interval " << l + 1 << " = [" << integrand.breakpoints[l] << ", "
         << integrand.breakpoints[l + 1] << ") has n*dt = " << n * dt << " < 1 (empty block)";
      throw ValidationError(os.str());
    }
    const int i0 = first_full_increment(integrand.breakpoints[l], n);
    for (int q = 0; q < cols; ++q) {
      const auto i = static_cast<std::uint64_t>(i0 + q);
      for (int comp = 0; comp < N; ++comp)
        g(comp) = rng::gaussian(seed, rng::kPathIncrement, i, static_cast<std::uint64_t>(l),
                                static_cast<std::uint64_t>(comp));
      tg.noalias() = integrand.matrices[l] * g;
      out.entries.noalias() += tg * tg.transpose();
    }
  }
  out.entries /= static_cast<double>(n);
  out.estimator_kind = EstimatorKind::kGram;
  out.N = N;
  out.n = n;
  out.seed = seed;
  return out;
}

CovariationMatrix modified_estimator(const Eigen::MatrixXd& increments, int n) {
  const int N = static_cast<int>(increments.rows());
  double trace = 0.0;
  for (int i = 0; i < increments.cols(); ++i) trace += increments.col(i).squaredNorm();

  CovariationMatrix out;
  out.entries = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < increments.cols(); ++i) {
    const double norm2 = increments.col(i).squaredNorm();
    if (norm2 == 0.0) {
      std::ostringstream os;
      os << "modified_estimator: increment " << i + 1 << " has zero norm";
      throw ValidationError(os.str());
    }
    out.entries.noalias() += (increments.col(i) * increments.col(i).transpose()) / norm2;
  }
  out.entries *= trace / static_cast<double>(n);
  out.estimator_kind = EstimatorKind::kModified;
  out.N = N;
  out.n = n;
  return out;
}

}  // namespace covspec
