// Benchmark comparing the serial reference scorer against the
// OpenMP-parallel scorer on synthetic items.
//
//   bench_scoring [items] [tokens-per-text] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcqforge/metrics.hpp"

using namespace mcqforge;

namespace {

std::vector<McqItem> synthetic_items(std::size_t count, std::size_t tokens) {
  static const char* kVocab[] = {"sun",   "star",  "moon",  "planet", "comet",
                                 "orbit", "dust",  "nova",  "ring",   "cloud",
                                 "belt",  "giant", "dwarf", "flare",  "core"};
  constexpr std::size_t kVocabSize = sizeof(kVocab) / sizeof(kVocab[0]);
  std::mt19937_64 rng(12345);
  auto phrase = [&rng, tokens] {
    std::string out;
    for (std::size_t t = 0; t < tokens; ++t) {
      if (t > 0) out += ' ';
      out += kVocab[rng() % kVocabSize];
    }
    return out;
  };

  std::vector<McqItem> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    McqItem item;
    item.id = "bench-" + std::to_string(i);
    item.question.id = item.id + "-q";
    item.question.context_id = "ctx";
    item.question.paraphrase_index = 1;
    item.question.correct_answer = phrase();
    item.question.text = "?";
    item.distractors = {phrase(), phrase(), phrase()};
    item.model_tag = "bench";
    item.language = Language::En;
    items.push_back(std::move(item));
  }
  return items;
}

double time_ms(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t count = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  std::size_t tokens = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 4;
  int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

  std::vector<McqItem> items = synthetic_items(count, tokens);
  metrics::HashEmbeddingProvider embedder(64);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("items=%zu tokens/text=%zu repeats=%d threads=%d\n", count,
              tokens, repeats, threads);

  std::vector<metrics::ScoreRow> serial_rows, parallel_rows;
  double serial_best = 1e300, parallel_best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    serial_best = std::min(
        serial_best, time_ms([&] {
          serial_rows = metrics::score_items_serial(items, embedder, nullptr);
        }));
    parallel_best = std::min(
        parallel_best, time_ms([&] {
          parallel_rows = metrics::score_items(items, embedder, nullptr);
        }));
  }

  bool identical = serial_rows.size() == parallel_rows.size();
  for (std::size_t i = 0; identical && i < serial_rows.size(); ++i) {
    identical = serial_rows[i].item_id == parallel_rows[i].item_id &&
                serial_rows[i].bleu1 == parallel_rows[i].bleu1 &&
                serial_rows[i].bleu4 == parallel_rows[i].bleu4 &&
                serial_rows[i].rouge_l == parallel_rows[i].rouge_l &&
                serial_rows[i].cs == parallel_rows[i].cs;
  }

  std::printf("serial   : %10.2f ms  (%zu rows)\n", serial_best, serial_rows.size());
  std::printf("openmp   : %10.2f ms  (%zu rows)\n", parallel_best, parallel_rows.size());
  std::printf("speedup  : %10.2fx\n", serial_best / parallel_best);
  std::printf("outputs  : %s\n", identical ? "identical" : "DIFFER");
  return identical ? 0 : 1;
}
