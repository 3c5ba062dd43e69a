#include "arsip/fuzzy_index.hpp"

#include <random>
#include <set>

#include "arsip/error.hpp"
#include "arsip/utf8.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace arsip;
using arsip::testing::naive_levenshtein;

namespace {

DocumentRecord make_doc(DocumentId id, std::string perihal, std::string no_surat = "001",
                        std::string deskripsi = "", Category cat = Category::kSuratMasuk,
                        std::int64_t uploaded_ms = 0) {
  DocumentRecord d;
  d.id = id;
  d.perihal = std::move(perihal);
  d.no_surat = std::move(no_surat);
  d.deskripsi = std::move(deskripsi);
  d.kategori = cat;
  d.uploaded_at = Timestamp{std::chrono::milliseconds{uploaded_ms}};
  return d;
}

std::size_t oracle(std::string_view a, std::string_view b) {
  return naive_levenshtein(utf8::decode(a), utf8::decode(b));
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Surat Masuk 2015") == std::vector<std::string>{"surat", "masuk", "2015"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("gotong-royong") == std::vector<std::string>{"gotong", "royong"});
  CHECK(tokenize("  No. 470/12/SU-II ") == std::vector<std::string>{"no", "470", "12", "su", "ii"});
  CHECK(tokenize("ÄRZTE Ελλάδα") == std::vector<std::string>{"ärzte", "ελλάδα"});
  CHECK(tokenize("!!!").empty());
}

TEST_CASE("distance_budget policy table") {
  CHECK(distance_budget("ktp") == 1);
  CHECK(distance_budget("surat") == 2);
  CHECK(distance_budget("kependudukan") == 3);
  CHECK(distance_budget("abcd") == 1);
  CHECK(distance_budget("abcdefgh") == 2);
  CHECK(distance_budget("abcdefghi") == 3);
  // Length counts scalar values.
  CHECK(distance_budget("ääää") == 1);
}

TEST_CASE("distance policy parsing") {
  CHECK(DistancePolicy::parse("4:1,8:2,*:3") == DistancePolicy{});
  CHECK(DistancePolicy{}.to_string() == "4:1,8:2,*:3");
  const auto p = DistancePolicy::parse("3:0,*:1");
  CHECK(p.budget(3) == 0);
  CHECK(p.budget(4) == 1);
  for (const char* bad : {"", "4:1", "4:1,*:2,9:3", "8:1,4:2,*:3", "x:1,*:2", "4:y,*:2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(DistancePolicy::parse(bad), Error);
  }
}

TEST_CASE("suggest examples") {
  Vocabulary vocab;
  vocab.add("surat", 10);
  vocab.add("serta", 2);
  // Oracle distances: the transposition costs two edits, while "serta" is a
  // single substitution away, so it ranks first despite its lower frequency.
  REQUIRE(oracle("surta", "surat") == 2);
  REQUIRE(oracle("surta", "serta") == 1);
  CHECK(suggest("surta", vocab, 5) ==
        std::vector<Suggestion>{{"serta", 1, 2}, {"surat", 2, 10}});
  CHECK(suggest("surta", vocab, 1) == std::vector<Suggestion>{{"serta", 1, 2}});

  // Equal distance: higher frequency first, then token order.
  Vocabulary tied;
  tied.add("surat", 10);
  tied.add("sural", 10);
  tied.add("surau", 3);
  REQUIRE(oracle("surap", "surat") == 1);
  CHECK(suggest("surap", tied, 5) ==
        std::vector<Suggestion>{{"sural", 1, 10}, {"surat", 1, 10}, {"surau", 1, 3}});

  Vocabulary one;
  one.add("surat", 10);
  CHECK(suggest("surat", one, 5) == std::vector<Suggestion>{{"surat", 0, 10}});
  REQUIRE(oracle("zzzz", "surat") == 5);
  CHECK(suggest("zzzz", one, 5).empty());
  CHECK(suggest("", one, 5).empty());
}

TEST_CASE("suggestions are totally ordered and within budget") {
  std::mt19937_64 rng(23);
  Vocabulary vocab;
  for (int i = 0; i < 400; ++i) {
    vocab.add(utf8::encode(arsip::testing::random_string(rng, 1, 7, U"abcdeé")), 1 + rng() % 5);
  }
  for (int i = 0; i < 200; ++i) {
    const std::string q = utf8::encode(arsip::testing::random_string(rng, 1, 7, U"abcdeé"));
    const auto out = suggest(q, vocab, 1000);
    const std::size_t budget = distance_budget(q);
    std::size_t expected_count = 0;
    for (const auto& [tok, e] : vocab.entries()) {
      if (oracle(q, tok) <= budget) ++expected_count;
    }
    REQUIRE(out.size() == expected_count);
    for (std::size_t k = 0; k < out.size(); ++k) {
      CHECK(out[k].distance == oracle(q, out[k].candidate));
      CHECK(out[k].distance <= budget);
      CHECK(out[k].frequency == vocab.frequency(out[k].candidate));
      if (k > 0) {
        const auto& a = out[k - 1];
        const auto& b = out[k];
        const bool strictly_before =
            a.distance < b.distance ||
            (a.distance == b.distance &&
             (a.frequency > b.frequency ||
              (a.frequency == b.frequency && a.candidate < b.candidate)));
        CHECK(strictly_before);
      }
    }
  }
}

TEST_CASE("index and deindex bookkeeping") {
  FuzzyIndex index;
  const auto before_vocab = index.vocabulary();
  const auto before_postings = index.postings();

  index.index_document(make_doc(1, "Surat Masuk", "470/1"));
  CHECK(index.vocabulary().frequency("surat") == 1);
  CHECK(index.vocabulary().frequency("masuk") == 1);
  CHECK(index.vocabulary().frequency("470") == 1);

  // Idempotent per id.
  index.index_document(make_doc(1, "Surat Masuk", "470/1"));
  CHECK(index.vocabulary().frequency("surat") == 1);

  index.index_document(make_doc(2, "Surat Keluar", "470/2"));
  CHECK(index.vocabulary().frequency("surat") == 2);
  CHECK(index.deindex_document(1));
  CHECK(index.vocabulary().frequency("surat") == 1);
  CHECK(index.suggest("surat", 3) == std::vector<Suggestion>{{"surat", 0, 1}});
  CHECK_FALSE(index.vocabulary().contains("masuk"));

  CHECK(index.deindex_document(2));
  CHECK_FALSE(index.deindex_document(2));
  CHECK(index.vocabulary() == before_vocab);
  CHECK(index.postings() == before_postings);
}

TEST_CASE("index then deindex restores state exactly") {
  std::mt19937_64 rng(29);
  FuzzyIndex index;
  auto word = [&] { return utf8::encode(arsip::testing::random_string(rng, 1, 6, U"abcdef")); };
  for (DocumentId id = 1; id <= 30; ++id) {
    index.index_document(make_doc(id, word() + " " + word(), word(), word() + " " + word()));
  }
  const auto vocab = index.vocabulary();
  const auto postings = index.postings();
  for (DocumentId id = 100; id < 120; ++id) {
    index.index_document(make_doc(id, word() + " " + word(), word(), word()));
    index.deindex_document(id);
    REQUIRE(index.vocabulary() == vocab);
    REQUIRE(index.postings() == postings);
  }
}

TEST_CASE("search examples") {
  FuzzyIndex index;
  index.index_document(make_doc(7, "gotong royong", "GR-1", "", Category::kSuratMasuk));
  REQUIRE(oracle("gotonk", "gotong") == 1);

  const auto hits = index.search("gotonk");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].document_id == 7);
  CHECK(hits[0].score == doctest::Approx(3.0 * (1.0 - 1.0 / 6.0)));
  CHECK(hits[0].matched_terms == std::vector<MatchedTerm>{{"gotonk", "gotong", 1}});

  CHECK(index.search("").empty());
  CHECK(index.search("gotonk", Category::kGambar).empty());
  CHECK(index.search("gotonk", Category::kSuratMasuk).size() == 1);
}

TEST_CASE("search scoring sums fields and tokens") {
  FuzzyIndex index;
  index.index_document(make_doc(1, "kartu keluarga", "KK-9", "surat pengantar"));
  index.index_document(make_doc(2, "surat pengantar", "SP-1", "kartu keluarga"));

  const auto hits = index.search("kartu pengantar");
  REQUIRE(hits.size() == 2);
  // Both documents match both tokens exactly, once in perihal, once in deskripsi.
  CHECK(hits[0].score == doctest::Approx(4.0));
  CHECK(hits[1].score == doctest::Approx(4.0));
  // Equal score and timestamp: ascending id.
  CHECK(hits[0].document_id == 1);

  const auto by_number = index.search("kk");
  REQUIRE(!by_number.empty());
  CHECK(by_number[0].document_id == 1);
  CHECK(by_number[0].score == doctest::Approx(2.0));
}

TEST_CASE("search orders by score, then newest, then id") {
  FuzzyIndex index;
  index.index_document(make_doc(1, "akta", "A-1", "", Category::kArtikel, 100));
  index.index_document(make_doc(2, "akta", "A-2", "", Category::kArtikel, 300));
  index.index_document(make_doc(3, "akta", "A-3", "", Category::kArtikel, 300));
  index.index_document(make_doc(4, "akte", "A-4", "", Category::kArtikel, 900));
  const auto hits = index.search("akta");
  REQUIRE(hits.size() == 4);
  CHECK(hits[0].document_id == 2);
  CHECK(hits[1].document_id == 3);
  CHECK(hits[2].document_id == 1);
  CHECK(hits[3].document_id == 4);
}

TEST_CASE("exact token outscores approximate match in the same field") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 100; ++round) {
    FuzzyIndex index;
    const auto word = utf8::encode(arsip::testing::random_string(rng, 3, 10, U"abcdefgh"));
    auto typo32 = utf8::decode(word);
    typo32[rng() % typo32.size()] = U'z';
    const auto typo = utf8::encode(typo32);
    index.index_document(make_doc(1, word, "N1"));
    index.index_document(make_doc(2, typo, "N2"));
    const auto hits = index.search(word);
    REQUIRE(!hits.empty());
    CHECK(hits[0].document_id == 1);
    for (const auto& h : hits) CHECK(h.score <= hits[0].score);
  }
}

TEST_CASE("unfiltered search is the union of per-category searches") {
  std::mt19937_64 rng(37);
  FuzzyIndex index;
  auto word = [&] { return utf8::encode(arsip::testing::random_string(rng, 3, 7, U"abcdefg")); };
  for (DocumentId id = 1; id <= 80; ++id) {
    index.index_document(make_doc(id, word() + " " + word(), word(), word(),
                                  kAllCategories[id % 4], static_cast<std::int64_t>(id % 5)));
  }
  for (int i = 0; i < 40; ++i) {
    const std::string q = word() + " " + word();
    const auto all = index.search(q);
    std::vector<SearchHit> merged;
    for (Category c : kAllCategories) {
      for (auto& h : index.search(q, c)) merged.push_back(std::move(h));
    }
    std::set<DocumentId> a, b;
    for (const auto& h : all) a.insert(h.document_id);
    for (const auto& h : merged) b.insert(h.document_id);
    CHECK(a == b);
    CHECK(all.size() == merged.size());
    CHECK(index.search(q) == all);  // deterministic
  }
}
