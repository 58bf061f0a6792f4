#include "glare/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "glare/error.hpp"

namespace glare::nn {

GradCheckResult finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, std::span<const double> analytic, double epsilon,
                                  double abs_floor, const std::function<bool(std::size_t)>& skip) {
  if (x.size() != analytic.size()) throw ConfigError("finite_diff_check: gradient size does not match input");
  std::vector<double> probe(x.begin(), x.end());
  GradCheckResult result;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (skip && skip(i)) continue;
    const double step = epsilon * std::max(1.0, std::abs(x[i]));
    const double hi = x[i] + step, lo = x[i] - step;
    probe[i] = hi;
    const double up = f(probe);
    probe[i] = lo;
    const double down = f(probe);
    probe[i] = x[i];
    const double numeric = (up - down) / (hi - lo);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), abs_floor});
    const double err = std::abs(analytic[i] - numeric) / denom;
    if (result.checked++ == 0 || err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace glare::nn
