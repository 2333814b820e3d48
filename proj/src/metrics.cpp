#include "srclink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srclink/error.hpp"

namespace srclink {

double quantile(std::span<const std::size_t> sorted_ranks, double p) {
  if (sorted_ranks.empty()) throw ContractViolation("quantile of an empty sequence");
  const double pos = p * static_cast<double>(sorted_ranks.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_ranks.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  const auto a = static_cast<double>(sorted_ranks[lo]);
  const auto b = static_cast<double>(sorted_ranks[hi]);
  return a + (b - a) * frac;
}

RankSummary median_and_iqr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ContractViolation("median_and_iqr of an empty sequence");
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  return {quantile(sorted, 0.5), quantile(sorted, 0.25), quantile(sorted, 0.75)};
}

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) throw ContractViolation("recall_at_k of an empty sequence");
  if (k < 1) throw ContractViolation("recall_at_k: k must be >= 1");
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

std::vector<CurvePoint> recall_curve(std::span<const std::size_t> ranks, std::size_t pool_size) {
  if (ranks.empty()) throw ContractViolation("recall_curve of an empty sequence");
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw ContractViolation("recall_curve: ranks are 1-based");
  if (sorted.back() > pool_size) {
    throw ContractViolation("recall_curve: rank " + std::to_string(sorted.back()) +
                            " exceeds pool size " + std::to_string(pool_size));
  }
  const auto n = static_cast<double>(sorted.size());
  std::vector<CurvePoint> curve;
  if (sorted.front() > 1) curve.push_back({1, 0.0});
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    curve.push_back({sorted[i], static_cast<double>(j) / n});
    i = j;
  }
  if (curve.back().k != pool_size) curve.push_back({pool_size, 1.0});
  return curve;
}

double curve_value(std::span<const CurvePoint> curve, std::size_t k) {
  double value = 0.0;
  for (const auto& p : curve) {
    if (p.k > k) break;
    value = p.recall;
  }
  return value;
}

}  // namespace srclink
