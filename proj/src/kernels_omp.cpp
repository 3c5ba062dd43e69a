#include <omp.h>

#include <cstdint>

#include "arsip/kernels.hpp"
#include "kernels_detail.hpp"

namespace arsip::kernels {

int max_threads() noexcept { return omp_get_max_threads(); }

std::vector<std::size_t> distances_parallel(std::span<const StringPair> pairs, Algorithm algo) {
  std::vector<std::size_t> out(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
  // Pair lengths vary, so hand out small chunks dynamically.
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = detail::distance_one(pairs[static_cast<std::size_t>(i)], algo);
  }
  return out;
}

std::vector<CandidateMatch> scan_parallel(std::u32string_view query,
                                          std::span<const std::u32string_view> candidates,
                                          std::size_t max_distance) {
  // One slot per candidate, compacted afterwards so the output order matches
  // the serial scan exactly.
  constexpr std::size_t kMiss = SIZE_MAX;
  std::vector<std::size_t> slot(candidates.size(), kMiss);
  const auto n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (auto d = detail::bounded_one(query, candidates[idx], max_distance)) slot[idx] = *d;
  }
  std::vector<CandidateMatch> out;
  for (std::size_t i = 0; i < slot.size(); ++i) {
    if (slot[i] != kMiss) out.push_back({i, slot[i]});
  }
  return out;
}

}  // namespace arsip::kernels
