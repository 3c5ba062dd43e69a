#include "arsip/distance.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "arsip/error.hpp"
#include "arsip/utf8.hpp"

namespace arsip {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter string; rows run over it.
  const std::size_t n = b.size();
  if (n == 0) return a.size();

  std::vector<std::size_t> row(n + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    const char32_t ca = a[i - 1];
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (ca == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[n];
}

std::optional<std::size_t> levenshtein_bounded(std::u32string_view a, std::u32string_view b,
                                               std::size_t k) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (m - n > k) return std::nullopt;
  if (k == 0) return a == b ? std::optional<std::size_t>{0} : std::nullopt;
  if (n == 0) return m;  // m <= k here

  // Cells outside the band hold `inf`; every value is clamped to it.
  const std::size_t inf = k + 1;
  std::vector<std::size_t> prev(n + 2, inf);
  std::vector<std::size_t> cur(n + 2, inf);
  for (std::size_t j = 0; j <= std::min(n, k); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(n, i + k);
    std::size_t row_min = inf;
    if (lo == 0) {
      cur[0] = i;
      row_min = i;
    } else {
      cur[lo - 1] = inf;
    }
    const char32_t ca = a[i - 1];
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (ca == b[j - 1] ? 0 : 1);
      const std::size_t v = std::min({sub, prev[j] + 1, cur[j - 1] + 1, inf});
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    cur[hi + 1] = inf;
    if (row_min > k) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[n] > k) return std::nullopt;
  return prev[n];
}

namespace {

constexpr unsigned kWordBits = 64;

// Per-character match bitmasks of the pattern, one 64-bit word per block.
class PatternMasks {
 public:
  explicit PatternMasks(std::u32string_view pattern)
      : blocks_((pattern.size() + kWordBits - 1) / kWordBits), latin_(256 * blocks_, 0) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const char32_t ch = pattern[i];
      std::uint64_t* row = nullptr;
      if (ch < 256) {
        row = &latin_[ch * blocks_];
      } else {
        auto [it, inserted] = other_index_.try_emplace(ch, other_.size());
        if (inserted) other_.resize(other_.size() + blocks_, 0);
        row = &other_[it->second];
      }
      row[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    }
  }

  std::size_t blocks() const noexcept { return blocks_; }

  // Returns nullptr when the character does not occur in the pattern.
  const std::uint64_t* row(char32_t ch) const {
    if (ch < 256) return &latin_[ch * blocks_];
    auto it = other_index_.find(ch);
    return it == other_index_.end() ? nullptr : &other_[it->second];
  }

 private:
  std::size_t blocks_;
  std::vector<std::uint64_t> latin_;
  std::unordered_map<char32_t, std::size_t> other_index_;
  std::vector<std::uint64_t> other_;
};

struct BlockState {
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
};

// Advances one block by one text column. `hin` is the horizontal delta
// entering from the block above (-1, 0 or +1). Returns the delta leaving the
// bit selected by `out_mask`.
inline int advance_block(BlockState& s, std::uint64_t eq, int hin, std::uint64_t out_mask) {
  const std::uint64_t hin_neg = hin < 0 ? 1 : 0;
  const std::uint64_t hin_pos = hin > 0 ? 1 : 0;
  const std::uint64_t xv = eq | s.mv;
  eq |= hin_neg;
  const std::uint64_t xh = (((eq & s.pv) + s.pv) ^ s.pv) | eq;
  std::uint64_t ph = s.mv | ~(xh | s.pv);
  std::uint64_t mh = s.pv & xh;
  int hout = 0;
  if (ph & out_mask) hout = 1;
  if (mh & out_mask) hout = -1;
  ph = (ph << 1) | hin_pos;
  mh = (mh << 1) | hin_neg;
  s.pv = mh | ~(xv | ph);
  s.mv = ph & xv;
  return hout;
}

}  // namespace

std::size_t levenshtein_bitparallel(std::u32string_view a, std::u32string_view b) {
  // The pattern (bit-vector side) is the shorter string.
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  if (m == 0) return b.size();

  const PatternMasks masks(a);
  const std::size_t blocks = masks.blocks();
  const std::uint64_t high = std::uint64_t{1} << (kWordBits - 1);
  const std::uint64_t last = std::uint64_t{1} << ((m - 1) % kWordBits);
  std::vector<BlockState> state(blocks);
  std::size_t score = m;

  for (char32_t ch : b) {
    const std::uint64_t* eq = masks.row(ch);
    int carry = 1;  // top row is the 0..n ramp
    for (std::size_t blk = 0; blk + 1 < blocks; ++blk) {
      carry = advance_block(state[blk], eq ? eq[blk] : 0, carry, high);
    }
    const int delta = advance_block(state[blocks - 1], eq ? eq[blocks - 1] : 0, carry, last);
    score = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(score) + delta);
  }
  return score;
}

EditScript edit_script(std::u32string_view a, std::u32string_view b) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t w = n + 1;
  std::vector<std::size_t> d((m + 1) * w);
  for (std::size_t i = 0; i <= m; ++i) d[i * w] = i;
  for (std::size_t j = 0; j <= n; ++j) d[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub = d[(i - 1) * w + j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i * w + j] = std::min({sub, d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});
    }
  }

  EditScript script;
  script.ops.reserve(d[m * w + n]);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = a[i - 1] == b[j - 1];
      if (d[(i - 1) * w + j - 1] + (same ? 0 : 1) == here) {
        if (!same) script.ops.push_back({EditKind::kSubstitute, i - 1, b[j - 1]});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
      script.ops.push_back({EditKind::kDelete, i - 1, 0});
      --i;
      continue;
    }
    script.ops.push_back({EditKind::kInsert, i, b[j - 1]});
    --j;
  }
  return script;
}

std::u32string apply_script(std::u32string_view a, const EditScript& script) {
  std::u32string out(a);
  for (std::size_t k = 0; k < script.ops.size(); ++k) {
    const EditOp& op = script.ops[k];
    const bool in_range = op.kind == EditKind::kInsert ? op.source_index <= out.size()
                                                       : op.source_index < out.size();
    if (!in_range) {
      throw Error(ErrorCode::kMalformedScript,
                  "edit op " + std::to_string(k) + " has index " +
                      std::to_string(op.source_index) + " outside working string of length " +
                      std::to_string(out.size()));
    }
    switch (op.kind) {
      case EditKind::kSubstitute:
        out[op.source_index] = op.ch;
        break;
      case EditKind::kInsert:
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(op.source_index), op.ch);
        break;
      case EditKind::kDelete:
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(op.source_index));
        break;
    }
  }
  return out;
}

double normalized_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_bitparallel(a, b)) / static_cast<double>(longest);
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(std::u32string_view(utf8::decode(a)), std::u32string_view(utf8::decode(b)));
}

double normalized_similarity(std::string_view a, std::string_view b) {
  return normalized_similarity(std::u32string_view(utf8::decode(a)),
                               std::u32string_view(utf8::decode(b)));
}

}  // namespace arsip
