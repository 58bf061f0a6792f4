#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace glare::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Compares `analytic` against central differences of `f` at `x`, with step
/// epsilon * max(1, |x_i|). Relative error per coordinate is
/// |a - n| / max(|a|, |n|, abs_floor). Coordinates for which `skip` returns
/// true are left out (kinks of relu/maxpool).
GradCheckResult finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, std::span<const double> analytic,
                                  double epsilon = 1e-6, double abs_floor = 1e-8,
                                  const std::function<bool(std::size_t)>& skip = {});

}  // namespace glare::nn
