// Serial reference vs OpenMP kernels, per distance algorithm.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "arsip/distance.hpp"
#include "arsip/kernels.hpp"

namespace {

using arsip::kernels::Algorithm;
using arsip::kernels::StringPair;

std::u32string random_word(std::mt19937_64& rng, std::size_t len) {
  std::uniform_int_distribution<int> letter(0, 25);
  std::u32string s(len, U'a');
  for (auto& c : s) c = static_cast<char32_t>(U'a' + letter(rng));
  return s;
}

const std::vector<StringPair>& pairs_of_length(std::size_t len) {
  static std::vector<std::vector<StringPair>> cache(1024);
  auto& pairs = cache[len];
  if (pairs.empty()) {
    std::mt19937_64 rng(42);
    pairs.resize(2000);
    for (auto& p : pairs) {
      p.a = random_word(rng, len);
      p.b = random_word(rng, len);
    }
  }
  return pairs;
}

template <bool Parallel>
void BM_Distances(benchmark::State& state) {
  const auto algo = static_cast<Algorithm>(state.range(0));
  const auto& pairs = pairs_of_length(static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    auto d = Parallel ? arsip::kernels::distances_parallel(pairs, algo)
                      : arsip::kernels::distances_serial(pairs, algo);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
  state.SetLabel(std::string(arsip::kernels::to_string(algo)));
}

void distance_args(benchmark::internal::Benchmark* b) {
  for (int algo : {0, 1, 2}) {
    for (int len : {8, 64, 200}) b->Args({algo, len});
  }
}

BENCHMARK(BM_Distances<false>)->Name("distances/serial")->Apply(distance_args)->UseRealTime();
BENCHMARK(BM_Distances<true>)->Name("distances/omp")->Apply(distance_args)->UseRealTime();

// Vocabulary scan as done by suggestions: short tokens, small budget.
const std::vector<std::u32string>& vocabulary(std::size_t size) {
  static std::vector<std::u32string> words;
  if (words.size() != size) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(3, 12);
    words.clear();
    for (std::size_t i = 0; i < size; ++i) words.push_back(random_word(rng, len(rng)));
  }
  return words;
}

template <bool Parallel>
void BM_Scan(benchmark::State& state) {
  const auto& words = vocabulary(static_cast<std::size_t>(state.range(0)));
  const std::vector<std::u32string_view> views(words.begin(), words.end());
  const std::u32string query = U"koordinasi";
  for (auto _ : state) {
    auto m = Parallel ? arsip::kernels::scan_parallel(query, views, 3)
                      : arsip::kernels::scan_serial(query, views, 3);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_Scan<false>)->Name("scan/serial")->Arg(10'000)->Arg(100'000)->UseRealTime();
BENCHMARK(BM_Scan<true>)->Name("scan/omp")->Arg(10'000)->Arg(100'000)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
