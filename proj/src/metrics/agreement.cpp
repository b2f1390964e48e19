#include "revguard/metrics/agreement.h"

#include "revguard/core/errors.h"
#include "revguard/metrics/classification.h"

namespace revguard::metrics {

double binary_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw ValidationError("raters decided different numbers of items");
  if (a.empty()) throw ValidationError("kappa needs at least one decision");
  // Integer form: p_o = O/n, p_e = E/n^2, so kappa = (nO - E) / (n^2 - E).
  const long double n = static_cast<long double>(a.size());
  long double agree = 0, pos_a = 0, pos_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    pos_a += a[i];
    pos_b += b[i];
  }
  const long double expected = pos_a * pos_b + (n - pos_a) * (n - pos_b);
  const long double denom = n * n - expected;
  if (denom == 0) return agree == n ? 1.0 : 0.0;
  return static_cast<double>((n * agree - expected) / denom);
}

double cohen_kappa(const RaterPair& r) {
  if (r.categories.empty()) throw ValidationError("kappa needs at least one category");
  if (r.rater_a.size() != r.rater_b.size()) throw ValidationError("raters cover different item sets");
  if (r.rater_a.empty()) throw ValidationError("kappa needs at least one item");
  const std::size_t cats = r.categories.size();
  for (std::size_t i = 0; i < r.rater_a.size(); ++i) {
    if (r.rater_a[i].size() != cats || r.rater_b[i].size() != cats) {
      throw ValidationError("item " + std::to_string(i) + " does not cover every category for both raters");
    }
  }
  std::vector<double> per_category;
  per_category.reserve(cats);
  for (std::size_t c = 0; c < cats; ++c) {
    std::vector<bool> a, b;
    a.reserve(r.rater_a.size());
    b.reserve(r.rater_b.size());
    for (std::size_t i = 0; i < r.rater_a.size(); ++i) {
      a.push_back(r.rater_a[i][c]);
      b.push_back(r.rater_b[i][c]);
    }
    per_category.push_back(binary_kappa(a, b));
  }
  return stable_mean(std::move(per_category));
}

}  // namespace revguard::metrics
