#include "arsip/fuzzy_index.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <tuple>

#include <spdlog/spdlog.h>

#include "arsip/distance.hpp"
#include "arsip/error.hpp"
#include "arsip/kernels.hpp"
#include "arsip/utf8.hpp"

namespace arsip {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t ch : utf8::decode(text)) {
    if (utf8::is_alnum(ch)) {
      utf8::append(current, utf8::to_lower(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t DistancePolicy::budget(std::size_t token_length) const noexcept {
  for (const Band& band : bands) {
    if (token_length <= band.max_length) return band.budget;
  }
  return long_budget;
}

namespace {

std::optional<std::size_t> parse_size(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

DistancePolicy DistancePolicy::parse(std::string_view text) {
  auto fail = [&](const std::string& why) -> DistancePolicy {
    throw Error(ErrorCode::kValidation,
                "invalid distance policy '" + std::string(text) + "': " + why);
  };
  DistancePolicy policy;
  policy.bands.clear();
  bool saw_tail = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    start = comma + 1;
    if (saw_tail) return fail("'*' entry must be last");
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) return fail("expected <max-length>:<budget>");
    const auto budget = parse_size(item.substr(colon + 1));
    if (!budget) return fail("bad budget in '" + std::string(item) + "'");
    const std::string_view len = item.substr(0, colon);
    if (len == "*") {
      policy.long_budget = *budget;
      saw_tail = true;
      continue;
    }
    const auto max_len = parse_size(len);
    if (!max_len) return fail("bad length in '" + std::string(item) + "'");
    if (!policy.bands.empty() && *max_len <= policy.bands.back().max_length) {
      return fail("band lengths must increase");
    }
    policy.bands.push_back({*max_len, *budget});
  }
  if (!saw_tail) return fail("missing '*:<budget>' entry");
  return policy;
}

std::string DistancePolicy::to_string() const {
  std::string out;
  for (const Band& b : bands) {
    out += std::to_string(b.max_length) + ":" + std::to_string(b.budget) + ",";
  }
  return out + "*:" + std::to_string(long_budget);
}

std::size_t distance_budget(std::string_view token, const DistancePolicy& policy) {
  return policy.budget(utf8::decode(token).size());
}

double field_weight(Field f) noexcept {
  switch (f) {
    case Field::kPerihal:
      return 3.0;
    case Field::kNoSurat:
      return 2.0;
    case Field::kDeskripsi:
      return 1.0;
  }
  return 0.0;
}

void Vocabulary::add(const std::string& token, std::size_t count) {
  auto [it, inserted] = entries_.try_emplace(token);
  if (inserted) it->second.text = utf8::decode(token);
  it->second.frequency += count;
}

bool Vocabulary::remove(const std::string& token, std::size_t count) {
  auto it = entries_.find(token);
  if (it == entries_.end() || it->second.frequency < count) return false;
  it->second.frequency -= count;
  if (it->second.frequency == 0) entries_.erase(it);
  return true;
}

std::size_t Vocabulary::frequency(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? 0 : it->second.frequency;
}

namespace {

struct VocabMatch {
  const std::string* token;
  const Vocabulary::Entry* entry;
  std::size_t distance;
};

std::vector<VocabMatch> scan_vocabulary(std::u32string_view query, const Vocabulary& vocab,
                                        std::size_t budget) {
  std::vector<const std::pair<const std::string, Vocabulary::Entry>*> items;
  std::vector<std::u32string_view> views;
  items.reserve(vocab.size());
  views.reserve(vocab.size());
  for (const auto& kv : vocab.entries()) {
    items.push_back(&kv);
    views.push_back(kv.second.text);
  }
  std::vector<VocabMatch> out;
  for (const auto& m : kernels::scan(query, views, budget)) {
    out.push_back({&items[m.index]->first, &items[m.index]->second, m.distance});
  }
  return out;
}

}  // namespace

std::vector<Suggestion> suggest(std::string_view query_token, const Vocabulary& vocab,
                                std::size_t limit, const DistancePolicy& policy) {
  const std::u32string query = utf8::decode(query_token);
  if (query.empty() || limit == 0) return {};
  std::vector<Suggestion> out;
  for (const VocabMatch& m : scan_vocabulary(query, vocab, policy.budget(query.size()))) {
    out.push_back({*m.token, m.distance, m.entry->frequency});
  }
  std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
    return std::tie(a.distance, b.frequency, a.candidate) <
           std::tie(b.distance, a.frequency, b.candidate);
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

FuzzyIndex::FuzzyIndex(DistancePolicy policy) : policy_(std::move(policy)) {}

void FuzzyIndex::index_document(const DocumentRecord& doc) {
  DocEntry entry{doc.kategori, doc.uploaded_at, {}};
  const std::pair<const std::string*, Field> fields[] = {
      {&doc.perihal, Field::kPerihal},
      {&doc.no_surat, Field::kNoSurat},
      {&doc.deskripsi, Field::kDeskripsi},
  };
  for (const auto& [text, field] : fields) {
    for (auto& token : tokenize(*text)) entry.occurrences.emplace_back(std::move(token), field);
  }

  std::unique_lock lock(mu_);
  if (auto it = docs_.find(doc.id); it != docs_.end()) {
    deindex_locked(doc.id, it->second);
    docs_.erase(it);
  }
  for (const auto& [token, field] : entry.occurrences) {
    vocab_.add(token);
    postings_[token][doc.id] |= 1u << static_cast<unsigned>(field);
  }
  docs_.emplace(doc.id, std::move(entry));
}

bool FuzzyIndex::deindex_document(DocumentId id) {
  std::unique_lock lock(mu_);
  auto it = docs_.find(id);
  if (it == docs_.end()) {
    spdlog::warn("deindex of unindexed document {} ignored", id);
    return false;
  }
  deindex_locked(id, it->second);
  docs_.erase(it);
  return true;
}

void FuzzyIndex::deindex_locked(DocumentId id, const DocEntry& entry) {
  for (const auto& [token, field] : entry.occurrences) {
    vocab_.remove(token);
    if (auto p = postings_.find(token); p != postings_.end()) {
      p->second.erase(id);
      if (p->second.empty()) postings_.erase(p);
    }
  }
}

void FuzzyIndex::clear() {
  std::unique_lock lock(mu_);
  vocab_ = Vocabulary{};
  postings_.clear();
  docs_.clear();
}

std::vector<Suggestion> FuzzyIndex::suggest(std::string_view query_token, std::size_t limit) const {
  std::shared_lock lock(mu_);
  return arsip::suggest(query_token, vocab_, limit, policy_);
}

std::vector<SearchHit> FuzzyIndex::search(std::string_view query,
                                          std::optional<Category> category) const {
  const std::vector<std::string> query_tokens = tokenize(query);
  if (query_tokens.empty()) return {};

  struct Best {
    double value = 0.0;
    std::size_t distance = 0;
    const std::string* token = nullptr;
  };
  struct Accum {
    double score = 0.0;
    std::vector<MatchedTerm> terms;
  };

  std::shared_lock lock(mu_);
  std::map<DocumentId, Accum> accum;
  for (const std::string& q : query_tokens) {
    const std::u32string q32 = utf8::decode(q);
    std::map<DocumentId, Best> best;
    for (const VocabMatch& m : scan_vocabulary(q32, vocab_, policy_.budget(q32.size()))) {
      const double sim = normalized_similarity(q32, m.entry->text);
      if (sim <= 0.0) continue;
      auto p = postings_.find(*m.token);
      if (p == postings_.end()) continue;
      for (const auto& [doc_id, mask] : p->second) {
        if (category && docs_.at(doc_id).category != *category) continue;
        double weight = 0.0;
        for (Field f : {Field::kPerihal, Field::kNoSurat, Field::kDeskripsi}) {
          if (mask & (1u << static_cast<unsigned>(f))) weight = std::max(weight, field_weight(f));
        }
        const double value = weight * sim;
        Best& b = best[doc_id];
        const bool better = b.token == nullptr || value > b.value ||
                            (value == b.value && (m.distance < b.distance ||
                                                  (m.distance == b.distance && *m.token < *b.token)));
        if (better) b = {value, m.distance, m.token};
      }
    }
    for (const auto& [doc_id, b] : best) {
      Accum& a = accum[doc_id];
      a.score += b.value;
      a.terms.push_back({q, *b.token, b.distance});
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(accum.size());
  for (auto& [doc_id, a] : accum) {
    if (a.score > 0.0) hits.push_back({doc_id, a.score, std::move(a.terms)});
  }
  std::sort(hits.begin(), hits.end(), [&](const SearchHit& x, const SearchHit& y) {
    if (x.score != y.score) return x.score > y.score;
    const Timestamp tx = docs_.at(x.document_id).uploaded_at;
    const Timestamp ty = docs_.at(y.document_id).uploaded_at;
    if (tx != ty) return tx > ty;
    return x.document_id < y.document_id;
  });
  return hits;
}

bool FuzzyIndex::contains_token(std::string_view token) const {
  std::shared_lock lock(mu_);
  return vocab_.contains(token);
}

bool FuzzyIndex::is_indexed(DocumentId id) const {
  std::shared_lock lock(mu_);
  return docs_.contains(id);
}

Vocabulary FuzzyIndex::vocabulary() const {
  std::shared_lock lock(mu_);
  return vocab_;
}

FuzzyIndex::Postings FuzzyIndex::postings() const {
  std::shared_lock lock(mu_);
  return postings_;
}

}  // namespace arsip
