#pragma once

// Batch distance kernels. Each kernel has a serial reference implementation
// and an OpenMP-parallel one; the two must return identical results, which
// the test suite checks. Parallel variants only change throughput.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arsip::kernels {

enum class Algorithm { kDp, kBanded, kBitParallel };

std::string_view to_string(Algorithm algo) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

struct StringPair {
  std::u32string a;
  std::u32string b;
};

/// Exact distance for every pair. kBanded runs with a band wide enough to be
/// exact (max of the two lengths).
std::vector<std::size_t> distances_serial(std::span<const StringPair> pairs, Algorithm algo);
std::vector<std::size_t> distances_parallel(std::span<const StringPair> pairs, Algorithm algo);

struct CandidateMatch {
  std::size_t index;  // into the candidate span
  std::size_t distance;

  friend bool operator==(const CandidateMatch&, const CandidateMatch&) = default;
};

/// All candidates within `max_distance` of `query`, in ascending index order.
/// Candidates whose length differs from the query by more than the bound are
/// rejected before any distance work.
std::vector<CandidateMatch> scan_serial(std::u32string_view query,
                                        std::span<const std::u32string_view> candidates,
                                        std::size_t max_distance);
std::vector<CandidateMatch> scan_parallel(std::u32string_view query,
                                          std::span<const std::u32string_view> candidates,
                                          std::size_t max_distance);

/// Dispatches to the parallel scan for large candidate sets.
std::vector<CandidateMatch> scan(std::u32string_view query,
                                 std::span<const std::u32string_view> candidates,
                                 std::size_t max_distance);

inline constexpr std::size_t kParallelScanThreshold = 4096;

int max_threads() noexcept;

}  // namespace arsip::kernels
