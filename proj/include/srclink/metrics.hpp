#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace srclink {

struct RankSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

// Quantile by linear interpolation between order statistics at position
// (n - 1) * p. p in [0, 1].
double quantile(std::span<const std::size_t> sorted_ranks, double p);

RankSummary median_and_iqr(std::span<const std::size_t> ranks);

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);

struct CurvePoint {
  std::size_t k = 0;
  double recall = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

// Step curve with one point per distinct rank plus k = 1 and k = pool_size.
// Recall at any k is the value of the last point with point.k <= k.
std::vector<CurvePoint> recall_curve(std::span<const std::size_t> ranks, std::size_t pool_size);

// Evaluate a compressed curve at k.
double curve_value(std::span<const CurvePoint> curve, std::size_t k);

}  // namespace srclink
