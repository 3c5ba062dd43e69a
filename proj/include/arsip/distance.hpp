#pragma once

// Levenshtein edit distance with unit costs for substitution, insertion and
// deletion (no transposition). All functions compare Unicode scalar values
// and are pure: safe to call concurrently from any number of threads.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arsip {

enum class EditKind { kSubstitute, kInsert, kDelete };

struct EditOp {
  EditKind kind;
  /// Index into the working string at the moment the op is applied.
  std::size_t source_index;
  /// Character written; unused for kDelete.
  char32_t ch = 0;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// An optimal edit script. Ops are ordered by non-increasing source_index
/// (right to left), so each op's index is valid in the original source
/// coordinates at the time it is replayed.
struct EditScript {
  std::vector<EditOp> ops;

  std::size_t size() const noexcept { return ops.size(); }
  bool empty() const noexcept { return ops.empty(); }
};

/// Full two-row dynamic program. O(|a|·|b|) time, O(min) memory.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Banded dynamic program over the diagonal band of width 2k+1. Returns the
/// distance when it is at most `max_distance`, otherwise nullopt.
std::optional<std::size_t> levenshtein_bounded(std::u32string_view a, std::u32string_view b,
                                               std::size_t max_distance);

/// Word-parallel block algorithm (64-bit blocks). Always equal to
/// levenshtein(a, b).
std::size_t levenshtein_bitparallel(std::u32string_view a, std::u32string_view b);

/// Materializes the full matrix and backtraces from the bottom-right corner,
/// preferring match/substitute over delete over insert on ties.
EditScript edit_script(std::u32string_view a, std::u32string_view b);

/// Replays `script` on `a`. Throws Error(kMalformedScript) when an op's index
/// is out of range for the working string.
std::u32string apply_script(std::u32string_view a, const EditScript& script);

/// 1 - d / max(|a|, |b|); 1 when both are empty.
double normalized_similarity(std::u32string_view a, std::u32string_view b);

// UTF-8 conveniences.
std::size_t levenshtein(std::string_view a, std::string_view b);
double normalized_similarity(std::string_view a, std::string_view b);

}  // namespace arsip
