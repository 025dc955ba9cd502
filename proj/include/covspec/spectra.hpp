#pragma once

#include <Eigen/Dense>
#include <vector>

namespace covspec {

// Empirical spectral distribution: all N eigenvalues of a symmetric matrix,
// sorted ascending. F(x) = (number of eigenvalues <= x) / N.
struct EmpiricalSpectralDistribution {
  std::vector<double> eigenvalues;  // ascending

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double cdf(double x) const;
  // (1/N) sum lambda^k
  double moment(int k) const;
};

// Eigenvalues of a symmetric matrix. Throws if the input deviates from
// symmetry by more than 1e-9 (absolute, relative to the largest entry).
EmpiricalSpectralDistribution esd(const Eigen::MatrixXd& A);

// (1/N) tr(A^k) via repeated multiplication; cross-checkable against the
// eigenvalue route.
double esd_moment(const Eigen::MatrixXd& A, int k);
double esd_moment(const EmpiricalSpectralDistribution& d, int k);

// Exact Kolmogorov sup-distance between two ESD step functions.
double ks_distance(const EmpiricalSpectralDistribution& a,
                   const EmpiricalSpectralDistribution& b);

}  // namespace covspec
