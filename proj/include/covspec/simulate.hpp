#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "covspec/model.hpp"

namespace covspec {

enum class EstimatorKind { kPath, kGram, kModified };

std::string to_string(EstimatorKind k);
EstimatorKind estimator_kind_from_string(const std::string& s);

struct CovariationMatrix {
  Eigen::MatrixXd entries;
  EstimatorKind estimator_kind = EstimatorKind::kPath;
  int N = 0;
  int n = 0;
  std::uint64_t seed = 0;
  int rep = 0;

  // Symmetry to 1e-12 absolute; throws InvariantError otherwise.
  void check_symmetry() const;
};

// Exact-in-distribution grid increments of the diffusion: increment i is
// sum_l T_l * sqrt(lambda_{i,l}) * g(seed,i,l,.), where lambda_{i,l} is the
// overlap length of ((i-1)/n, i/n] with interval l. Column i-1 holds
// increment i.
Eigen::MatrixXd simulate_increments(const StepIntegrand& integrand, int n, std::uint64_t seed);

// Sum of increment outer products.
CovariationMatrix path_covariation_from_increments(const Eigen::MatrixXd& increments,
                                                   const StepIntegrand& integrand, int n,
                                                   std::uint64_t seed);
CovariationMatrix simulate_path_covariation(const StepIntegrand& integrand, int n,
                                            std::uint64_t seed);

// (1/n) sum_l T_l Y_l Y_l' T_l' with floor(n * dt_l) standard-normal columns
// per interval. Columns reuse the path increment streams so that the two
// estimators are coupled and differ only at block boundaries.
CovariationMatrix simulate_gram(const StepIntegrand& integrand, int n, std::uint64_t seed);

// (tr(path)/n) * sum_i q_i q_i' with q_i the normalized increments. The trace
// equals the path trace exactly. Throws on a zero-norm increment.
CovariationMatrix modified_estimator(const Eigen::MatrixXd& increments, int n);

}  // namespace covspec
