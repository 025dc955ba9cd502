#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "covspec/model.hpp"

namespace covspec {

// Word of interval labels (1-based, values in 1..m) indexing a mixed spectral
// moment (1/N) tr prod_i T_{w_i} T_{w_i}'. Trace cyclicity makes all cyclic
// rotations equal, so keys canonicalize to the lexicographically least
// rotation.
using MixedMomentKey = std::vector<int>;

MixedMomentKey canonical_rotation(const MixedMomentKey& word);

class MixedMomentProvider {
 public:
  virtual ~MixedMomentProvider() = default;
  // `word` must already be canonical.
  virtual double value(const MixedMomentKey& word) const = 0;
  virtual int interval_count() const = 0;
};

// Canonicalizes, then dispatches. Rotations of a word therefore return
// bit-identical values.
double mixed_moment(const MixedMomentProvider& provider, const MixedMomentKey& word);

// Finite-N trace products over a concrete integrand; memoized per canonical
// key (the cache only stores results of one fixed evaluation order, so it
// cannot change values).
class NumericMixedMoments final : public MixedMomentProvider {
 public:
  explicit NumericMixedMoments(StepIntegrand integrand);
  double value(const MixedMomentKey& word) const override;
  int interval_count() const override { return integrand_.interval_count(); }
  const StepIntegrand& integrand() const { return integrand_; }

 private:
  StepIntegrand integrand_;
  mutable std::mutex mutex_;
  mutable std::map<MixedMomentKey, double> cache_;
};

// Lookup table keyed by canonical words; missing keys throw.
class AnalyticMixedMoments final : public MixedMomentProvider {
 public:
  AnalyticMixedMoments(std::map<MixedMomentKey, double> table, int m);
  double value(const MixedMomentKey& word) const override;
  int interval_count() const override { return m_; }

 private:
  std::map<MixedMomentKey, double> table_;
  int m_;
};

// Every key maps to the same value (identity matrices give 1).
class ConstantMixedMoments final : public MixedMomentProvider {
 public:
  ConstantMixedMoments(double v, int m) : value_(v), m_(m) {}
  double value(const MixedMomentKey&) const override { return value_; }
  int interval_count() const override { return m_; }

 private:
  double value_;
  int m_;
};

// Closed form for a family of jointly diagonal matrices: the weighted sum
// over joint spectrum atoms of the product of T_l T_l' eigenvalues along the
// word. Requires every spec to be of the common-basis kind with matching
// block structure.
double analytic_mixed_moment(const std::vector<EnsembleSpec>& family,
                             const MixedMomentKey& word);

// Normalized trace of the centered alternating product
// prod_i ((T_{w_i} T_{w_i}')^{p_i} - tau I), tau the normalized trace.
// Adjacent interval labels must differ; small |result| indicates approximate
// freeness at this N.
double freeness_defect(const StepIntegrand& integrand,
                       const std::vector<std::pair<int, int>>& word);

}  // namespace covspec
