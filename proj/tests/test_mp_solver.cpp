#include <doctest.h>

#include <cmath>
#include <complex>

#include "covspec/errors.hpp"
#include "covspec/mp_solver.hpp"
#include "covspec/qgraph_oracle.hpp"

using namespace covspec;
using namespace std::complex_literals;

TEST_CASE("stieltjes transform of atomic laws") {
  const auto delta1 = SpectralLaw::point_mass(1.0);
  const std::complex<double> at_i = stieltjes_transform(delta1, 1i);
  CHECK(at_i.real() == doctest::Approx(0.5));
  CHECK(at_i.imag() == doctest::Approx(0.5));

  const auto delta0 = SpectralLaw::point_mass(0.0);
  const std::complex<double> z0 = stieltjes_transform(delta0, 1i);
  CHECK(z0.real() == doctest::Approx(0.0));
  CHECK(z0.imag() == doctest::Approx(1.0));

  const SpectralLaw mixture{{1.0, 3.0}, {0.5, 0.5}};
  const std::complex<double> mix = stieltjes_transform(mixture, 2.0 + 1i);
  CHECK(mix.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mix.imag() == doctest::Approx(0.5));

  CHECK_THROWS_AS(stieltjes_transform(delta1, 1.0 - 1i), ValidationError);
}

TEST_CASE("zero law degenerates to v = -1/z") {
  const auto law = SpectralLaw::point_mass(0.0);
  const std::complex<double> v = solve_mp_equation(law, 0.7, 1i);
  CHECK(std::abs(v - 1i) < 1e-12);
  const std::complex<double> z = 0.3 + 0.2i;
  const std::complex<double> v2 = solve_mp_equation(law, 1.0, z);
  CHECK(std::abs(v2 - (-1.0 / z)) < 1e-10);
}

TEST_CASE("solver meets its residual contract near the real axis") {
  const auto law = SpectralLaw::point_mass(1.0);
  const std::complex<double> z = 1.0 + 1e-3i;
  const std::complex<double> v = solve_mp_equation(law, 0.5, z);
  CHECK(mp_residual(law, 0.5, z, v) < 1e-10);
  CHECK(v.imag() > 0.0);
}

TEST_CASE("imaginary part tracks the bulk") {
  const auto law = SpectralLaw::point_mass(1.0);
  for (double e : {0.2, 1.0, 2.5}) {
    const std::complex<double> v = solve_mp_equation(law, 0.5, e + 1e-3i);
    CHECK(v.imag() > 0.1);
  }
  const std::complex<double> outside = solve_mp_equation(law, 0.5, 5.0 + 1e-3i);
  CHECK(outside.imag() < 0.02);
}

TEST_CASE("non-convergence raises with the residual attached") {
  const auto law = SpectralLaw::point_mass(1.0);
  MpSolveOptions opts;
  opts.max_iter = 2;
  try {
    solve_mp_equation(law, 0.5, 1.0 + 1e-3i, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("companion transform algebra") {
  const std::complex<double> z = 0.8 + 0.4i;
  // Zero law at c=1: v = m.
  CHECK(std::abs(companion_to_esd(-1.0 / z, z, 1.0) - (-1.0 / z)) < 1e-14);
  // Affine in v with slope 1/c.
  const double c = 0.37;
  const std::complex<double> m1 = companion_to_esd(0.5 + 0.5i, z, c);
  const std::complex<double> m2 = companion_to_esd(1.5 + 0.5i, z, c);
  CHECK(std::abs((m2 - m1) - 1.0 / c) < 1e-14);
  // Round trip.
  const std::complex<double> v = 0.25 + 0.75i;
  CHECK(std::abs(esd_to_companion(companion_to_esd(v, z, c), z, c) - v) < 1e-14);
}

TEST_CASE("density recovery through the Cauchy kernel") {
  // Direct Stieltjes transform of a point mass at 1, evaluated at E=0.
  const double eta = 1e-3;
  const std::complex<double> m = stieltjes_transform(SpectralLaw::point_mass(1.0), 0.0 + eta * 1i);
  const double density = density_from_stieltjes({m})[0];
  CHECK(density == doctest::Approx(eta / (1.0 + eta * eta) / M_PI).epsilon(1e-6));
}

TEST_CASE("reference density closed form") {
  CHECK(mp_reference_density(0.5, 1.0) ==
        doctest::Approx(std::sqrt(1.75) / M_PI).epsilon(1e-12));
  CHECK(mp_reference_density(0.5, 0.05) == 0.0);
  CHECK(mp_reference_density(0.5, 3.0) == 0.0);
  CHECK(mp_reference_point_mass(0.5) == 0.0);
  CHECK(mp_reference_point_mass(2.0) == doctest::Approx(0.5));
}

TEST_CASE("reference density integrates to one") {
  for (double c : {0.25, 0.5, 1.0}) {
    const double sqrt_c = std::sqrt(c);
    const double a = (1.0 - sqrt_c) * (1.0 - sqrt_c);
    const double b = (1.0 + sqrt_c) * (1.0 + sqrt_c);
    // Substitution x = a + (b-a) sin^2(theta) removes the edge singularities.
    const int steps = 20000;
    double mass = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double theta = (i + 0.5) * (M_PI / 2.0) / steps;
      const double x = a + (b - a) * std::sin(theta) * std::sin(theta);
      const double dx = (b - a) * 2.0 * std::sin(theta) * std::cos(theta) * (M_PI / 2.0) / steps;
      mass += mp_reference_density(c, x) * dx;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("solved grid recovers the reference density") {
  const auto law = SpectralLaw::point_mass(1.0);
  const double c = 0.5;
  const double eta = 1e-4;
  std::vector<double> energies;
  for (int i = 0; i < 400; ++i) energies.push_back(0.0 + (3.5 - 0.0) * i / 399.0);
  MpSolveOptions opts;
  opts.max_iter = 200000;
  const StieltjesGrid grid = solve_mp_grid(law, c, energies, eta, opts, 2, true);

  // Herglotz property at every converged point.
  for (size_t i = 0; i < energies.size(); ++i) {
    CHECK(grid.v_values[i].imag() >= 0.0);
    CHECK(grid.m_values[i].imag() >= 0.0);
  }

  // Compare with the closed form in the middle of the bulk.
  auto density_at = [&](double x) {
    size_t best = 0;
    for (size_t i = 1; i < energies.size(); ++i)
      if (std::abs(energies[i] - x) < std::abs(energies[best] - x)) best = i;
    return grid.density[best];
  };
  CHECK(density_at(1.0) == doctest::Approx(mp_reference_density(c, 1.0)).epsilon(0.02));
  CHECK(grid_quadrature(energies, grid.density, 0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("carleman bound report") {
  // Single interval, unit cap, c=1: B = 4. Moments from the oracle at c=1
  // are the Catalan numbers 1, 2, 5, 14, 42, 132.
  ConstantMixedMoments ones(1.0, 1);
  std::vector<double> moments;
  for (int k = 1; k <= 6; ++k)
    moments.push_back(evaluate_expansion(oracle_moment_expansion(k, 1), 1.0, {1.0}, ones));
  CHECK(moments[1] == doctest::Approx(2.0));
  CHECK(moments[3] == doctest::Approx(14.0));

  const CarlemanReport report = carleman_bound_check(moments, 1, 1.0, 1.0, {1.0});
  CHECK(report.growth_base == doctest::Approx(4.0));
  REQUIRE(report.checks.size() == 3);
  CHECK(report.checks[0].order == 2);
  CHECK(report.checks[0].bound == doctest::Approx(16.0));
  CHECK(report.checks[1].bound == doctest::Approx(256.0));
  for (const auto& check : report.checks) CHECK(check.pass);
  CHECK(report.all_pass);
  CHECK(report.statement.find("diverges") != std::string::npos);
}

TEST_CASE("carleman bound flags violations") {
  const CarlemanReport report = carleman_bound_check({1.0, 300.0}, 1, 1.0, 1.0, {1.0});
  CHECK_FALSE(report.all_pass);
  CHECK(report.statement.find("diverges") == std::string::npos);
}
