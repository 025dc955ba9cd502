#include "covspec/mixed_moments.hpp"

#include <algorithm>
#include <sstream>

#include "covspec/errors.hpp"

namespace covspec {

MixedMomentKey canonical_rotation(const MixedMomentKey& word) {
  if (word.size() <= 1) return word;
  const size_t k = word.size();
  MixedMomentKey best = word;
  MixedMomentKey rotated(k);
  for (size_t shift = 1; shift < k; ++shift) {
    for (size_t i = 0; i < k; ++i) rotated[i] = word[(i + shift) % k];
    if (rotated < best) best = rotated;
  }
  return best;
}

double mixed_moment(const MixedMomentProvider& provider, const MixedMomentKey& word) {
  if (word.empty()) throw ValidationError("mixed moment: empty word");
  for (int l : word)
    if (l < 1 || l > provider.interval_count())
      throw ValidationError("mixed moment: word entry out of range 1..m");
  return provider.value(canonical_rotation(word));
}

NumericMixedMoments::NumericMixedMoments(StepIntegrand integrand)
    : integrand_(std::move(integrand)) {}

double NumericMixedMoments::value(const MixedMomentKey& word) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
  }
  const int N = integrand_.dimension();
  // Left-to-right, no reordering.
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(N, N);
  for (int l : word) {
    const Eigen::MatrixXd& T = integrand_.matrices[static_cast<size_t>(l - 1)];
    P = P * T;
    P = P * T.transpose();
  }
  const double result = P.trace() / static_cast<double>(N);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(word, result);
  return result;
}

AnalyticMixedMoments::AnalyticMixedMoments(std::map<MixedMomentKey, double> table, int m)
    : m_(m) {
  for (const auto& [word, v] : table) table_[canonical_rotation(word)] = v;
}

double AnalyticMixedMoments::value(const MixedMomentKey& word) const {
  const auto it = table_.find(word);
  if (it == table_.end()) {
    std::ostringstream os;
    os << "analytic mixed moments: missing key (";
    for (size_t i = 0; i < word.size(); ++i) os << (i ? "," : "") << word[i];
    os << ")";
    throw ValidationError(os.str());
  }
  return it->second;
}

double analytic_mixed_moment(const std::vector<EnsembleSpec>& family,
                             const MixedMomentKey& word) {
  if (family.empty()) throw ValidationError("analytic mixed moment: empty family");
  for (const auto& spec : family)
    if (spec.kind != EnsembleKind::kCommonBasisDiagonalFamily)
      throw ValidationError("analytic mixed moment: all specs must be common-basis diagonal");

  // Joint atoms come from positional alignment of the per-interval spectra.
  std::vector<std::vector<double>> spectra;
  size_t atoms = 0;
  for (const auto& spec : family) {
    std::vector<double> values;
    if (spec.two_point) {
      // Two-point laws need a common atom count; expand to 2 atoms only when
      // the weight is 1/2, otherwise require explicit lists.
      const auto& tp = *spec.two_point;
      if (tp.weight_a != 0.5)
        throw ValidationError("analytic mixed moment: two-point law requires explicit list "
                              "unless weight_a = 0.5");
      values = {tp.value_a, tp.value_b};
    } else {
      values = spec.spectrum;
    }
    if (values.empty()) throw ValidationError("analytic mixed moment: empty spectrum");
    if (atoms == 0) atoms = values.size();
    if (values.size() != atoms)
      throw ValidationError("analytic mixed moment: block structures do not match");
    spectra.push_back(std::move(values));
  }

  const int m = static_cast<int>(family.size());
  double sum = 0.0;
  for (size_t i = 0; i < atoms; ++i) {
    double prod = 1.0;
    for (int l : word) {
      if (l < 1 || l > m) throw ValidationError("analytic mixed moment: word entry out of range");
      const double d = spectra[static_cast<size_t>(l - 1)][i];
      prod *= d * d;  // eigenvalue of T_l T_l'
    }
    sum += prod;
  }
  return sum / static_cast<double>(atoms);
}

double freeness_defect(const StepIntegrand& integrand,
                       const std::vector<std::pair<int, int>>& word) {
  if (word.empty()) throw ValidationError("freeness defect: empty word");
  const int m = integrand.interval_count();
  for (size_t i = 0; i < word.size(); ++i) {
    const auto [l, p] = word[i];
    if (l < 1 || l > m) throw ValidationError("freeness defect: interval index out of range");
    if (p < 1) throw ValidationError("freeness defect: powers must be positive");
    if (i > 0 && word[i - 1].first == l)
      throw ValidationError("freeness defect: adjacent interval indices must differ");
  }

  const int N = integrand.dimension();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(N, N);
  for (const auto& [l, p] : word) {
    const Eigen::MatrixXd& T = integrand.matrices[static_cast<size_t>(l - 1)];
    Eigen::MatrixXd S = T * T.transpose();
    Eigen::MatrixXd Sp = S;
    for (int i = 1; i < p; ++i) Sp = Sp * S;
    const double tau = Sp.trace() / static_cast<double>(N);
    Sp.diagonal().array() -= tau;
    prod = prod * Sp;
  }
  return prod.trace() / static_cast<double>(N);
}

}  // namespace covspec
