#pragma once

#include <string>
#include <vector>

namespace revguard::metrics {

// Binary per-item, per-category decisions of two raters.
// rater_a[i][c] is rater A's decision for item i and category c.
struct RaterPair {
  std::vector<std::string> categories;
  std::vector<std::vector<bool>> rater_a;
  std::vector<std::vector<bool>> rater_b;
};

// Binary Cohen's kappa over aligned decisions:
//   kappa = (p_o - p_e) / (1 - p_e), p_e from the raters' marginals.
// When p_e == 1 exactly, kappa is 1 if p_o == 1 and 0 otherwise.
double binary_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

// Per-category binary kappa averaged over categories. Throws
// ValidationError on mismatched shapes or zero decisions.
double cohen_kappa(const RaterPair& raters);

}  // namespace revguard::metrics
