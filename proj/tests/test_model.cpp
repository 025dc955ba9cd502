#include <doctest.h>

#include <Eigen/Dense>

#include "covspec/errors.hpp"
#include "covspec/model.hpp"
#include "covspec/spectra.hpp"

using namespace covspec;

namespace {

EnsembleSpec diag_spec(std::vector<double> values) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kDiagonalFromSpectrum;
  spec.spectrum = std::move(values);
  return spec;
}

}  // namespace

TEST_CASE("operator norm on simple matrices") {
  CHECK(operator_norm(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::MatrixXd nilpotent(2, 2);
  nilpotent << 0, 2, 0, 0;
  CHECK(operator_norm(nilpotent) == doctest::Approx(2.0).epsilon(1e-10));

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = -4.0;
  CHECK(operator_norm(diag) == doctest::Approx(4.0).epsilon(1e-10));

  CHECK_THROWS_AS(operator_norm(Eigen::MatrixXd::Zero(2, 3)), ValidationError);
}

TEST_CASE("identity ensembles give identity matrices") {
  const StepIntegrand f = build_integrand({EnsembleSpec{}}, {0.0, 1.0}, 3, 7);
  CHECK(f.matrices.size() == 1);
  CHECK((f.matrices[0] - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.tau0 == doctest::Approx(1.0));
}

TEST_CASE("two-point diagonal lays out ascending blocks") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kDiagonalFromSpectrum;
  spec.two_point = TwoPointLaw{1.0, 4.0, 0.5};
  const StepIntegrand f = build_integrand({spec}, {0.0, 1.0}, 4, 0);
  Eigen::VectorXd expected(4);
  expected << 1, 1, 4, 4;
  CHECK((f.matrices[0].diagonal() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.matrices[0].isDiagonal());
}

TEST_CASE("common-basis family preserves the given order") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kCommonBasisDiagonalFamily;
  spec.spectrum = {2.0, 1.0};
  const StepIntegrand f = build_integrand({spec}, {0.0, 1.0}, 4, 0);
  Eigen::VectorXd expected(4);
  expected << 2, 2, 1, 1;
  CHECK((f.matrices[0].diagonal() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("haar rotation preserves the spectrum of T T'") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kHaarRotatedDiagonal;
  spec.spectrum = {1.0, 4.0};
  const StepIntegrand f = build_integrand({spec}, {0.0, 1.0}, 2, 99);
  const Eigen::MatrixXd& T = f.matrices[0];
  const auto eig = esd(T * T.transpose());
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eig.eigenvalues[1] == doctest::Approx(16.0).epsilon(1e-10));
}

TEST_CASE("haar rotated diagonal has the diagonal's eigenvalues") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kHaarRotatedDiagonal;
  spec.spectrum = {1.0, 2.0, 3.0, 5.0};
  const StepIntegrand f = build_integrand({spec}, {0.0, 1.0}, 8, 4);
  const auto eig = esd(f.matrices[0]);
  const std::vector<double> expected = {1, 1, 2, 2, 3, 3, 5, 5};
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(eig.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("build_integrand is bit-reproducible") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kHaarRotatedDiagonal;
  spec.spectrum = {1.0, 4.0};
  const StepIntegrand a = build_integrand({spec, diag_spec({2.0})}, {0.0, 0.5, 1.0}, 4, 11);
  const StepIntegrand b = build_integrand({spec, diag_spec({2.0})}, {0.0, 0.5, 1.0}, 4, 11);
  for (size_t l = 0; l < a.matrices.size(); ++l)
    CHECK((a.matrices[l] - b.matrices[l]).cwiseAbs().maxCoeff() == 0.0);

  const StepIntegrand c = build_integrand({spec, diag_spec({2.0})}, {0.0, 0.5, 1.0}, 4, 12);
  CHECK((a.matrices[0] - c.matrices[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("independent intervals draw independent rotations") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::kHaarRotatedDiagonal;
  spec.spectrum = {1.0, 4.0};
  const StepIntegrand f = build_integrand({spec, spec}, {0.0, 0.5, 1.0}, 4, 3);
  CHECK((f.matrices[0] - f.matrices[1]).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("build_integrand validation errors") {
  CHECK_THROWS_AS(build_integrand({EnsembleSpec{}}, {0.0, 0.5, 0.4}, 2, 0), ValidationError);
  CHECK_THROWS_AS(build_integrand({diag_spec({1.0, 2.0, 3.0})}, {0.0, 1.0}, 4, 0),
                  ValidationError);
  CHECK_THROWS_AS(build_integrand({diag_spec({-1.0, 2.0})}, {0.0, 1.0}, 4, 0), ValidationError);
  CHECK_THROWS_AS(build_integrand({EnsembleSpec{}, EnsembleSpec{}}, {0.0, 1.0}, 2, 0),
                  ValidationError);
}

TEST_CASE("declared norm cap is a hard error") {
  StepIntegrand f = build_integrand({diag_spec({1.0, 4.0})}, {0.0, 1.0}, 4, 0);
  CHECK_NOTHROW(f.validate());
  f.tau0 = 3.0;
  CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("operator norms respect the generated cap") {
  EnsembleSpec haar;
  haar.kind = EnsembleKind::kHaarRotatedDiagonal;
  haar.spectrum = {0.5, 2.5};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const StepIntegrand f =
        build_integrand({haar, diag_spec({1.0, 2.0})}, {0.0, 0.3, 1.0}, 4, seed);
    for (const auto& T : f.matrices) CHECK(operator_norm(T) <= f.tau0 * (1.0 + 1e-8));
  }
}
