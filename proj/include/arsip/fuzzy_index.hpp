#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arsip/category.hpp"
#include "arsip/record.hpp"

namespace arsip {

/// Lowercases (simple mapping), splits on every non-alphanumeric scalar and
/// drops empty pieces.
std::vector<std::string> tokenize(std::string_view text);

/// Maximum edit distance admitted for a query token, by token length in
/// scalar values. Default: 1 up to 4, 2 up to 8, 3 beyond.
struct DistancePolicy {
  struct Band {
    std::size_t max_length;
    std::size_t budget;
    friend bool operator==(const Band&, const Band&) = default;
  };
  std::vector<Band> bands{{4, 1}, {8, 2}};
  std::size_t long_budget = 3;

  std::size_t budget(std::size_t token_length) const noexcept;

  /// Parses "4:1,8:2,*:3". Bands must have increasing max lengths and the
  /// list must end with a "*" entry. Throws Error(kValidation).
  static DistancePolicy parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const DistancePolicy&, const DistancePolicy&) = default;
};

std::size_t distance_budget(std::string_view token, const DistancePolicy& policy = {});

enum class Field { kPerihal, kNoSurat, kDeskripsi };

/// 3 for perihal, 2 for no_surat, 1 for deskripsi.
double field_weight(Field f) noexcept;

/// Token -> occurrence count over the live documents' metadata.
class Vocabulary {
 public:
  void add(const std::string& token, std::size_t count = 1);
  /// Returns false when the token is absent or the count would go negative.
  bool remove(const std::string& token, std::size_t count = 1);

  std::size_t frequency(std::string_view token) const;
  bool contains(std::string_view token) const { return frequency(token) > 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Tokens in ascending byte order, with their decoded form.
  struct Entry {
    std::u32string text;
    std::size_t frequency = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  const std::map<std::string, Entry, std::less<>>& entries() const noexcept { return entries_; }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

struct Suggestion {
  std::string candidate;
  std::size_t distance = 0;
  std::size_t frequency = 0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// Vocabulary tokens within the query's distance budget, ordered by
/// ascending distance, descending frequency, then ascending token; at most
/// `limit` entries.
std::vector<Suggestion> suggest(std::string_view query_token, const Vocabulary& vocab,
                                std::size_t limit, const DistancePolicy& policy = {});

struct MatchedTerm {
  std::string query_token;
  std::string matched_token;
  std::size_t distance = 0;

  friend bool operator==(const MatchedTerm&, const MatchedTerm&) = default;
};

struct SearchHit {
  DocumentId document_id = 0;
  double score = 0.0;
  std::vector<MatchedTerm> matched_terms;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Inverted index over the three text metadata fields of live documents.
/// One writer at a time, any number of concurrent readers; every public
/// method is internally synchronized.
class FuzzyIndex {
 public:
  explicit FuzzyIndex(DistancePolicy policy = {});

  FuzzyIndex(const FuzzyIndex&) = delete;
  FuzzyIndex& operator=(const FuzzyIndex&) = delete;

  /// Re-indexing an already indexed id replaces its previous entry.
  void index_document(const DocumentRecord& doc);
  /// Unknown ids are a logged no-op; returns whether anything was removed.
  bool deindex_document(DocumentId id);
  void clear();

  std::vector<Suggestion> suggest(std::string_view query_token, std::size_t limit) const;

  /// Per-token fuzzy match; score is the sum over query tokens of the best
  /// field_weight × normalized_similarity among the document's matching
  /// tokens. Ordered by descending score, newest upload, ascending id.
  std::vector<SearchHit> search(std::string_view query,
                                std::optional<Category> category = std::nullopt) const;

  bool contains_token(std::string_view token) const;
  bool is_indexed(DocumentId id) const;

  Vocabulary vocabulary() const;
  using Postings = std::map<std::string, std::map<DocumentId, unsigned>, std::less<>>;
  /// token -> (document -> bitmask of fields holding it).
  Postings postings() const;

  const DistancePolicy& policy() const noexcept { return policy_; }

 private:
  struct DocEntry {
    Category category;
    Timestamp uploaded_at;
    std::vector<std::pair<std::string, Field>> occurrences;
  };

  void deindex_locked(DocumentId id, const DocEntry& entry);

  DistancePolicy policy_;
  mutable std::shared_mutex mu_;
  Vocabulary vocab_;
  Postings postings_;
  std::unordered_map<DocumentId, DocEntry> docs_;
};

}  // namespace arsip
