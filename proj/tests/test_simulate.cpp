#include <doctest.h>

#include <cmath>

#include "covspec/errors.hpp"
#include "covspec/rng.hpp"
#include "covspec/simulate.hpp"
#include "covspec/spectra.hpp"

using namespace covspec;

namespace {

StepIntegrand scalar_integrand(double value) {
  StepIntegrand f;
  f.breakpoints = {0.0, 1.0};
  f.matrices = {Eigen::MatrixXd::Constant(1, 1, value)};
  f.tau0 = std::abs(value);
  return f;
}

StepIntegrand identity_integrand(int N, std::vector<double> breakpoints) {
  StepIntegrand f;
  f.breakpoints = std::move(breakpoints);
  for (size_t l = 0; l + 1 < f.breakpoints.size(); ++l)
    f.matrices.emplace_back(Eigen::MatrixXd::Identity(N, N));
  f.tau0 = 1.0;
  return f;
}

}  // namespace

TEST_CASE("zero integrand gives the zero matrix") {
  const auto cov = simulate_path_covariation(scalar_integrand(0.0), 1, 42);
  CHECK(cov.entries(0, 0) == 0.0);
  const auto gram = simulate_gram(scalar_integrand(0.0), 4, 42);
  CHECK(gram.entries(0, 0) == 0.0);
}

TEST_CASE("scalar path estimator has mean one") {
  // n=1, T=1: the output is z^2 for one standard normal z.
  const int seeds = 100000;
  double sum = 0.0;
  const StepIntegrand f = scalar_integrand(1.0);
  for (int s = 0; s < seeds; ++s)
    sum += simulate_path_covariation(f, 1, static_cast<std::uint64_t>(s)).entries(0, 0);
  CHECK(sum / seeds == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("scalar gram estimator has chi-square mean one") {
  const int seeds = 100000;
  double sum = 0.0;
  const StepIntegrand f = scalar_integrand(1.0);
  for (int s = 0; s < seeds; ++s)
    sum += simulate_gram(f, 4, static_cast<std::uint64_t>(s)).entries(0, 0);
  CHECK(sum / seeds == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("normalized trace matches its expectation for the identity model") {
  const int N = 200, n = 400, reps = 50;
  const StepIntegrand f = identity_integrand(N, {0.0, 1.0});
  double sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto cov = simulate_path_covariation(f, n, rng::split(77, static_cast<std::uint64_t>(rep)));
    sum += cov.entries.trace() / N;
  }
  CHECK(sum / reps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("simulated matrices are symmetric and positive semidefinite") {
  StepIntegrand f = identity_integrand(3, {0.0, 0.4, 1.0});
  f.matrices[1](0, 1) = 0.5;
  f.matrices[1](1, 0) = 0.5;
  f.tau0 = 2.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& cov :
         {simulate_path_covariation(f, 10, seed), simulate_gram(f, 10, seed)}) {
      cov.check_symmetry();
      const auto d = esd(cov.entries);
      const double scale = std::max(1.0, cov.entries.trace() / cov.N);
      CHECK(d.eigenvalues.front() >= -1e-9 * scale);
    }
  }
}

TEST_CASE("gram rejects empty blocks naming the interval") {
  const StepIntegrand f = identity_integrand(2, {0.0, 0.05, 1.0});
  try {
    simulate_gram(f, 10, 1);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("interval 1") != std::string::npos);
  }
}

TEST_CASE("modified estimator trace identity") {
  const StepIntegrand f = identity_integrand(5, {0.0, 0.5, 1.0});
  const int n = 16;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd increments = simulate_increments(f, n, seed);
    const auto path = path_covariation_from_increments(increments, f, n, seed);
    const auto modified = modified_estimator(increments, n);
    CHECK(modified.entries.trace() ==
          doctest::Approx(path.entries.trace()).epsilon(1e-10));
  }
}

TEST_CASE("scalar modified estimator equals the path trace") {
  const StepIntegrand f = scalar_integrand(2.0);
  const int n = 8;
  const Eigen::MatrixXd increments = simulate_increments(f, n, 5);
  const auto path = path_covariation_from_increments(increments, f, n, 5);
  const auto modified = modified_estimator(increments, n);
  CHECK(modified.entries(0, 0) == doctest::Approx(path.entries(0, 0)).epsilon(1e-12));
}

TEST_CASE("modified estimator on a fixed direction") {
  // All increments along e_1: output is tr(path) * e_1 e_1'.
  Eigen::MatrixXd increments = Eigen::MatrixXd::Zero(3, 4);
  for (int i = 0; i < 4; ++i) increments(0, i) = 1.0 + i;
  double trace = 0.0;
  for (int i = 0; i < 4; ++i) trace += increments.col(i).squaredNorm();
  const auto modified = modified_estimator(increments, 4);
  CHECK(modified.entries(0, 0) == doctest::Approx(trace).epsilon(1e-12));
  CHECK(modified.entries(1, 1) == 0.0);
  CHECK(modified.entries(0, 1) == 0.0);
}

TEST_CASE("modified estimator rejects zero increments") {
  Eigen::MatrixXd increments = Eigen::MatrixXd::Zero(2, 3);
  increments(0, 0) = 1.0;
  increments(1, 2) = 1.0;
  CHECK_THROWS_AS(modified_estimator(increments, 3), ValidationError);
}

TEST_CASE("identical inputs give bit-identical matrices") {
  const StepIntegrand f = identity_integrand(4, {0.0, 0.3, 1.0});
  const auto a = simulate_path_covariation(f, 13, 21);
  const auto b = simulate_path_covariation(f, 13, 21);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
  const auto c = simulate_path_covariation(f, 13, 22);
  CHECK((a.entries - c.entries).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("path and gram stay within the rank-proximity bound") {
  // Breakpoints off the grid so boundary increments and floor effects exist.
  const int N = 60;
  const int n = 97;
  const StepIntegrand f = identity_integrand(N, {0.0, 0.3, 1.0});
  const int m = f.interval_count();
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto path = simulate_path_covariation(f, n, seed);
    const auto gram = simulate_gram(f, n, seed);
    const double dist = ks_distance(esd(path.entries), esd(gram.entries));
    CHECK(dist <= 4.0 * m / N);
    CHECK(dist > 0.0);  // estimators genuinely differ here
  }
}

TEST_CASE("aligned breakpoints make path and gram coincide") {
  const StepIntegrand f = identity_integrand(6, {0.0, 0.5, 1.0});
  const auto path = simulate_path_covariation(f, 10, 3);
  const auto gram = simulate_gram(f, 10, 3);
  CHECK((path.entries - gram.entries).cwiseAbs().maxCoeff() < 1e-12);
}
