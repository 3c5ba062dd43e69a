#include "arsip/kernels.hpp"

#include <algorithm>

#include "arsip/distance.hpp"
#include "kernels_detail.hpp"

namespace arsip::kernels {

std::string_view to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::kDp:
      return "dp";
    case Algorithm::kBanded:
      return "banded";
    case Algorithm::kBitParallel:
      return "bitparallel";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "dp") return Algorithm::kDp;
  if (name == "banded") return Algorithm::kBanded;
  if (name == "bitparallel") return Algorithm::kBitParallel;
  return std::nullopt;
}

namespace detail {

std::size_t distance_one(const StringPair& p, Algorithm algo) {
  switch (algo) {
    case Algorithm::kDp:
      return levenshtein(p.a, p.b);
    case Algorithm::kBanded:
      return *levenshtein_bounded(p.a, p.b, std::max(p.a.size(), p.b.size()));
    case Algorithm::kBitParallel:
      return levenshtein_bitparallel(p.a, p.b);
  }
  return 0;
}

std::optional<std::size_t> bounded_one(std::u32string_view query, std::u32string_view candidate,
                                       std::size_t k) {
  const std::size_t diff = query.size() > candidate.size() ? query.size() - candidate.size()
                                                           : candidate.size() - query.size();
  if (diff > k) return std::nullopt;
  return levenshtein_bounded(query, candidate, k);
}

}  // namespace detail

std::vector<std::size_t> distances_serial(std::span<const StringPair> pairs, Algorithm algo) {
  std::vector<std::size_t> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = detail::distance_one(pairs[i], algo);
  return out;
}

std::vector<CandidateMatch> scan_serial(std::u32string_view query,
                                        std::span<const std::u32string_view> candidates,
                                        std::size_t max_distance) {
  std::vector<CandidateMatch> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (auto d = detail::bounded_one(query, candidates[i], max_distance)) out.push_back({i, *d});
  }
  return out;
}

std::vector<CandidateMatch> scan(std::u32string_view query,
                                 std::span<const std::u32string_view> candidates,
                                 std::size_t max_distance) {
  if (candidates.size() >= kParallelScanThreshold && max_threads() > 1) {
    return scan_parallel(query, candidates, max_distance);
  }
  return scan_serial(query, candidates, max_distance);
}

}  // namespace arsip::kernels
