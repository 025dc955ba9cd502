#include "covspec/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "covspec/errors.hpp"

namespace covspec {

double EmpiricalSpectralDistribution::cdf(double x) const {
  const auto it = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), x);
  return static_cast<double>(it - eigenvalues.begin()) / static_cast<double>(eigenvalues.size());
}

double EmpiricalSpectralDistribution::moment(int k) const {
  if (k < 1) throw ValidationError("moment order must be >= 1");
  double sum = 0.0;
  for (double lam : eigenvalues) {
    double p = lam;
    for (int i = 1; i < k; ++i) p *= lam;
    sum += p;
  }
  return sum / static_cast<double>(eigenvalues.size());
}

EmpiricalSpectralDistribution esd(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw ValidationError("esd: matrix must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) throw ValidationError("esd: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ValidationError("esd: eigensolver failed");

  EmpiricalSpectralDistribution out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double esd_moment(const Eigen::MatrixXd& A, int k) {
  if (k < 1) throw ValidationError("esd_moment: k must be >= 1");
  if (A.rows() != A.cols()) throw ValidationError("esd_moment: matrix must be square");
  Eigen::MatrixXd P = A;
  for (int i = 1; i < k; ++i) P = P * A;
  return P.trace() / static_cast<double>(A.rows());
}

double esd_moment(const EmpiricalSpectralDistribution& d, int k) { return d.moment(k); }

double ks_distance(const EmpiricalSpectralDistribution& a,
                   const EmpiricalSpectralDistribution& b) {
  const auto& x = a.eigenvalues;
  const auto& y = b.eigenvalues;
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  size_t i = 0, j = 0;
  double sup = 0.0;
  // Evaluate |F_a - F_b| just after each atom of either distribution.
  while (i < x.size() || j < y.size()) {
    const double v = (j >= y.size() || (i < x.size() && x[i] <= y[j])) ? x[i] : y[j];
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return sup;
}

}  // namespace covspec
