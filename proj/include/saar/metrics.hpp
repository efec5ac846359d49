#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace saar {

/// Boundedness check on a sampled ‖e_c‖ history over [t_from, t_to]:
/// sup ≤ ratio_bound · value(t_from), and the maxima over consecutive
/// windows of length `window` do not increase.
struct UubReport {
  double reference = 0.0;  // ‖e_c(t_from)‖
  double sup = 0.0;
  double ratio = 0.0;      // sup / reference
  std::vector<double> window_max;
  bool bounded = false;
  bool non_increasing = false;
  bool passed() const { return bounded && non_increasing; }
};

inline UubReport uub_check(const std::vector<double>& times, const std::vector<double>& values,
                           double t_from, double t_to, double ratio_bound, double window) {
  UubReport rep;
  const double eps = 1e-9;
  std::size_t first = times.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= t_from - eps) {
      first = k;
      break;
    }
  }
  if (first == times.size()) return rep;
  rep.reference = values[first];
  const auto n_win = static_cast<std::size_t>(std::ceil((t_to - t_from) / window - eps));
  rep.window_max.assign(n_win, 0.0);
  for (std::size_t k = first; k < times.size() && times[k] <= t_to + eps; ++k) {
    rep.sup = std::max(rep.sup, values[k]);
    const auto w = std::min(n_win - 1, static_cast<std::size_t>((times[k] - t_from) / window + eps));
    rep.window_max[w] = std::max(rep.window_max[w], values[k]);
  }
  rep.ratio = rep.reference > 0.0 ? rep.sup / rep.reference : std::numeric_limits<double>::infinity();
  rep.bounded = rep.sup <= ratio_bound * rep.reference;
  rep.non_increasing = true;
  for (std::size_t w = 1; w < rep.window_max.size(); ++w)
    rep.non_increasing = rep.non_increasing && rep.window_max[w] <= rep.window_max[w - 1];
  return rep;
}

}  // namespace saar
