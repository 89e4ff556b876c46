#include "mcqforge/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "doctest.h"
#include "mcqforge/jsonl.hpp"
#include "testutil.hpp"

using namespace mcqforge;
using namespace mcqforge::metrics;

namespace {

TokenSeq seq(std::vector<std::string> tokens, Language lang = Language::En) {
  TokenSeq s;
  s.tokens = std::move(tokens);
  s.language = lang;
  return s;
}

McqItem scored_item(const std::string& id, const std::string& answer,
                    std::vector<std::string> distractors,
                    Language lang = Language::En) {
  McqItem item;
  item.id = id;
  item.question.id = id + "-q";
  item.question.context_id = "ctx";
  item.question.paraphrase_index = 1;
  item.question.correct_answer = answer;
  item.question.text = "?";
  item.distractors = std::move(distractors);
  item.model_tag = "mock";
  item.language = lang;
  return item;
}

}  // namespace

TEST_CASE("tokenize folds case for en/de and keeps hi/bn unfolded") {
  CHECK(tokenize("The sun, a star.", Language::En).tokens ==
        std::vector<std::string>{"the", "sun", "a", "star"});
  CHECK(tokenize("Die SONNE", Language::De).tokens ==
        std::vector<std::string>{"die", "sonne"});
  CHECK(tokenize("", Language::En).tokens.empty());
  CHECK(tokenize("?!,.", Language::Bn).tokens.empty());

  // Danda is punctuation and dropped; Devanagari text is not folded.
  auto hi = tokenize(
      "सूर्य एक तारा "
      "है।",
      Language::Hi);
  CHECK(hi.tokens == std::vector<std::string>{"सूर्य",
                                              "एक",
                                              "तारा",
                                              "है"});
}

TEST_CASE("bleu spot values") {
  // Hand-derived: clipped matches 2 of 3 unigrams, no brevity penalty.
  CHECK(bleu_n(seq({"the", "cat", "sat"}), seq({"the", "cat"}), 1) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // Perfect precision, brevity penalty e^(1 - 4/2).
  CHECK(bleu_n(seq({"a", "b"}), seq({"a", "b", "c", "d"}), 2) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
  CHECK(bleu_n(seq({"a"}), seq({"b"}), 1) == 0.0);
  for (int n = 1; n <= 4; ++n) {
    CHECK(bleu_n(seq({"x", "y", "z", "w"}), seq({"x", "y", "z", "w"}), n) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // Candidate shorter than the order scores zero.
  CHECK(bleu_n(seq({"a", "b"}), seq({"a", "b"}), 3) == 0.0);
  CHECK(bleu_n(seq({}), seq({"a"}), 1) == 0.0);
  CHECK_THROWS(bleu_n(seq({"a"}), seq({"a"}), 5));
}

TEST_CASE("bleu matches the brute-force counter on random pairs") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    auto cand = testutil::random_tokens(rng, 8, 5);
    auto ref = testutil::random_tokens(rng, 8, 5);
    for (int n = 1; n <= 4; ++n) {
      double got = bleu_n(seq(cand), seq(ref), n);
      double want = testutil::oracle_bleu(cand, ref, n);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("rouge spot values") {
  CHECK(rouge_l(seq({"a", "c", "d"}), seq({"a", "b", "c", "d"})) ==
        doctest::Approx(6.0 / 7.0).epsilon(1e-4));
  CHECK(rouge_l(seq({"x", "y"}), seq({"x", "y"})) == doctest::Approx(1.0));
  CHECK(rouge_l(seq({"a"}), seq({"b"})) == 0.0);
  CHECK(rouge_l(seq({}), seq({"a"})) == 0.0);
  CHECK(rouge_l(seq({"a"}), seq({})) == 0.0);
}

TEST_CASE("rouge matches exhaustive subsequence enumeration") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    auto cand = testutil::random_tokens(rng, 6, 3);
    auto ref = testutil::random_tokens(rng, 6, 3);
    CHECK(rouge_l(seq(cand), seq(ref)) ==
          doctest::Approx(testutil::oracle_rouge_l(cand, ref)).epsilon(1e-12));
  }
}

TEST_CASE("cosine spot values and errors") {
  CHECK(cosine({1, 2, 2}, {2, 1, 2}) == doctest::Approx(8.0 / 9.0).epsilon(1e-9));
  CHECK(cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine({3, 4}, {3, 4}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(cosine({1, 0}, {1, 0, 0}), DimensionMismatchError);
  CHECK_THROWS_AS(cosine({0, 0}, {1, 0}), ZeroVectorError);
}

TEST_CASE("cosine bounded for random vectors") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 500; ++trial) {
    Vec v(8), w(8);
    for (double& x : v) x = normal(rng);
    for (double& x : w) x = normal(rng);
    double c = cosine(v, w);
    CHECK(std::fabs(c) <= 1 + 1e-12);
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hash embedding provider is a deterministic bag of tokens") {
  HashEmbeddingProvider provider(64);
  CHECK(provider.embed("a b", Language::En) == provider.embed("b a", Language::En));
  CHECK(provider.embed("sun star", Language::En) ==
        provider.embed("sun star", Language::En));
  CHECK_THROWS_AS(provider.embed("...", Language::En), EmptyTextError);

  // Same token twice doubles the bucket count.
  Vec once = provider.embed("sun", Language::En);
  Vec twice = provider.embed("sun sun", Language::En);
  CHECK(cosine(once, twice) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disjoint-bucket texts embed orthogonally") {
  HashEmbeddingProvider provider(64);
  // Construct two texts whose tokens occupy disjoint buckets.
  std::vector<std::string> pool = {"alpha", "beta",  "gamma", "delta",
                                   "omega", "sigma", "kappa", "theta"};
  std::string text_a, text_b;
  std::set<std::size_t> buckets_a, buckets_b;
  for (const std::string& token : pool) {
    std::size_t bucket = HashEmbeddingProvider::bucket_of(token, 64);
    if (buckets_b.count(bucket)) continue;
    if (text_a.size() <= text_b.size() && !buckets_b.count(bucket)) {
      if (buckets_a.count(bucket)) continue;
      buckets_a.insert(bucket);
      text_a += token + " ";
    } else if (!buckets_a.count(bucket)) {
      buckets_b.insert(bucket);
      text_b += token + " ";
    }
  }
  REQUIRE(!text_a.empty());
  REQUIRE(!text_b.empty());
  CHECK(cosine(provider.embed(text_a, Language::En),
               provider.embed(text_b, Language::En)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("score_items emits D rows per item and skips empty tokenizations") {
  std::vector<McqItem> items;
  for (int i = 0; i < 10; ++i) {
    items.push_back(scored_item("item-" + std::to_string(i), "sun",
                                {"planet", "moon", "comet"}));
  }
  items.push_back(scored_item("bad", "...", {"planet", "moon", "comet"}));
  items.push_back(scored_item("bad2", "sun", {"planet", "!!!", "comet"}));

  HashEmbeddingProvider provider(64);
  ScoreStats stats;
  auto rows = score_items_serial(items, provider, &stats);
  CHECK(rows.size() == 30);
  CHECK(stats.items_scored == 10);
  CHECK(stats.items_skipped == 2);
  REQUIRE(stats.skipped_item_ids.size() == 2);
  CHECK(stats.skipped_item_ids[0] == "bad");
  CHECK(stats.skipped_item_ids[1] == "bad2");
  for (const ScoreRow& row : rows) {
    CHECK(row.bleu1 >= 0);
    CHECK(row.bleu1 <= 1);
    CHECK(row.distractor_index >= 1);
    CHECK(row.distractor_index <= 3);
  }
}

TEST_CASE("parallel scoring equals the serial reference bit for bit") {
  std::mt19937_64 rng(99);
  std::vector<std::string> vocab = {"sun",  "star", "moon",  "planet",
                                    "comet", "dust", "nebula", "orbit"};
  std::vector<McqItem> items;
  for (int i = 0; i < 500; ++i) {
    auto pick = [&rng, &vocab] { return vocab[rng() % vocab.size()]; };
    std::string answer = pick() + " " + pick();
    items.push_back(scored_item("item-" + std::to_string(i), answer,
                                {pick() + " one", pick() + " two", pick()}));
  }
  HashEmbeddingProvider provider(64);
  ScoreStats serial_stats, parallel_stats;
  auto serial = score_items_serial(items, provider, &serial_stats);
  auto parallel = score_items(items, provider, &parallel_stats);
  REQUIRE(serial.size() == parallel.size());
  CHECK(serial_stats.items_scored == parallel_stats.items_scored);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].item_id == parallel[i].item_id);
    CHECK(serial[i].distractor_index == parallel[i].distractor_index);
    // Bitwise equality: the same arithmetic runs per row in both paths.
    CHECK(serial[i].bleu1 == parallel[i].bleu1);
    CHECK(serial[i].bleu4 == parallel[i].bleu4);
    CHECK(serial[i].rouge_l == parallel[i].rouge_l);
    CHECK(serial[i].cs == parallel[i].cs);
  }
}

TEST_CASE("score rows serialize round-trip") {
  McqItem item = scored_item("x", "sun", {"planet", "moon", "comet"});
  HashEmbeddingProvider provider(64);
  auto rows = score_items_serial(std::vector<McqItem>{item}, provider, nullptr);
  REQUIRE(rows.size() == 3);
  for (const ScoreRow& row : rows) {
    json encoded = to_json(row);
    ScoreRow decoded = score_row_from_json(encoded);
    CHECK(to_json(decoded).dump() == encoded.dump());
  }
}

TEST_CASE("aggregate means and permutation invariance") {
  std::vector<ScoreRow> rows;
  ScoreRow a;
  a.item_id = "1";
  a.distractor_index = 1;
  a.bleu1 = 0.10;
  a.language = Language::En;
  a.model_tag = "m";
  a.approach = Approach::MSP;
  a.shot = Shot::Zero;
  ScoreRow b = a;
  b.item_id = "2";
  b.bleu1 = 0.20;
  rows = {a, b};

  AggregateReport report = aggregate(rows);
  REQUIRE(report.groups.size() == 1);
  CHECK(report.groups[0].count == 2);
  CHECK(report.groups[0].mean[0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(report.groups[0].mean[0] * display_scale(0) ==
        doctest::Approx(15.0).epsilon(1e-12));

  std::swap(rows[0], rows[1]);
  AggregateReport swapped = aggregate(rows);
  CHECK(std::fabs(swapped.groups[0].mean[0] - report.groups[0].mean[0]) <= 1e-12);

  // Mean recomputation from retained values matches the stored mean.
  double sum = 0;
  for (double v : report.groups[0].values[0]) sum += v;
  CHECK(std::fabs(sum / 2 - report.groups[0].mean[0]) <= 1e-12);
}

TEST_CASE("aggregate groups by requested keys only") {
  ScoreRow a;
  a.item_id = "1";
  a.bleu1 = 0.1;
  a.language = Language::En;
  a.model_tag = "m";
  a.approach = Approach::MSP;
  a.shot = Shot::Zero;
  ScoreRow b = a;
  b.language = Language::De;
  AggregateReport by_lang = aggregate({a, b}, {"language"});
  CHECK(by_lang.groups.size() == 2);
  AggregateReport merged = aggregate({a, b}, {"approach"});
  CHECK(merged.groups.size() == 1);
  CHECK(merged.groups[0].count == 2);
  CHECK_THROWS(aggregate({a}, {"nope"}));
  CHECK_THROWS(aggregate({}, {"language"}));
}

TEST_CASE("t-test spot values match the reference distribution") {
  // scipy.stats reference: t = -1.224744871, p = 0.287864134727, df = 4.
  auto result = t_test({1, 2, 3}, {2, 3, 4}, TTestVariant::Student);
  CHECK(result.t == doctest::Approx(-1.2247448714).epsilon(1e-3));
  CHECK(result.df == doctest::Approx(4));
  CHECK(result.p == doctest::Approx(0.287864134727).epsilon(1e-9));
  CHECK(!result.significant);

  // Welch on unequal variances: t = 0.174077655956, df = 4.042760896466,
  // p = 0.870174375156 (scipy).
  auto welch = t_test({1, 2, 3, 7}, {2, 3, 4}, TTestVariant::Welch);
  CHECK(welch.t == doctest::Approx(0.174077655956).epsilon(1e-9));
  CHECK(welch.df == doctest::Approx(4.042760896466).epsilon(1e-9));
  CHECK(welch.p == doctest::Approx(0.870174375156).epsilon(1e-9));
}

TEST_CASE("incomplete beta reproduces two-tailed p-values") {
  // p = I_{df/(df+t^2)}(df/2, 1/2); reference values from scipy.stats.t.sf.
  auto p_of = [](double t, double df) {
    return incomplete_beta(df / 2, 0.5, df / (df + t * t));
  };
  CHECK(p_of(2.0, 10) == doctest::Approx(0.073388034771).epsilon(1e-9));
  CHECK(p_of(0.5, 48) == doctest::Approx(0.619359657693).epsilon(1e-9));
  CHECK(p_of(3.2, 98) == doctest::Approx(0.001852301243).epsilon(1e-9));
  CHECK(incomplete_beta(1, 1, 0.0) == 0.0);
  CHECK(incomplete_beta(1, 1, 1.0) == 1.0);
}

TEST_CASE("t-test symmetry and scale invariance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<double> a(20), b(20);
  for (double& x : a) x = normal(rng);
  for (double& x : b) x = normal(rng) + 0.5;

  auto ab = t_test(a, b);
  auto ba = t_test(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));

  std::vector<double> a3 = a, b3 = b;
  for (double& x : a3) x *= 3;
  for (double& x : b3) x *= 3;
  auto scaled = t_test(a3, b3);
  CHECK(scaled.t == doctest::Approx(ab.t).epsilon(1e-12));
}

TEST_CASE("t-test degenerate and identical samples") {
  auto identical = t_test({1, 2, 3}, {1, 2, 3});
  CHECK(identical.t == doctest::Approx(0.0));
  CHECK(identical.p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!identical.significant);

  auto degenerate = t_test({2, 2, 2}, {2, 2, 2});
  CHECK(degenerate.degenerate);
  CHECK(degenerate.t == 0.0);
  CHECK(degenerate.p == 1.0);

  auto separated = t_test({1, 1, 1}, {2, 2, 2});
  CHECK(separated.significant);
  CHECK(separated.p == 0.0);

  CHECK_THROWS(t_test({1.0}, {1.0, 2.0}));
}

TEST_CASE("report marks significantly better cells against the baseline") {
  // Baseline group centered at 0.3, contender at 0.6; tight spread makes
  // the difference significant.
  std::vector<ScoreRow> rows;
  for (int i = 0; i < 40; ++i) {
    ScoreRow base;
    base.item_id = "b" + std::to_string(i);
    base.language = Language::En;
    base.model_tag = "davinci";
    base.approach = Approach::SSP;
    base.shot = Shot::Zero;
    double eps = (i % 2 == 0 ? 1 : -1) * 0.01;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      double v = 0.3 + eps;
      switch (m) {
        case 0: base.bleu1 = v; break;
        case 1: base.bleu2 = v; break;
        case 2: base.bleu3 = v; break;
        case 3: base.bleu4 = v; break;
        case 4: base.rouge_l = v; break;
        case 5: base.cs = v; break;
      }
    }
    ScoreRow better = base;
    better.item_id = "m" + std::to_string(i);
    better.approach = Approach::MSP;
    better.bleu1 = 0.6 + eps;
    rows.push_back(base);
    rows.push_back(better);
  }

  AggregateReport agg = aggregate(rows);
  BaselineSelector baseline;  // default: the SSP group
  RenderedReport rendered = render_report(agg, baseline);

  bool found_star = false, baseline_tagged = false;
  for (const auto& rec : rendered.records) {
    if (rec.at("approach") == "msp") {
      CHECK(rec.at("metrics").at("bleu1").at("significant") == true);
      CHECK(rec.at("metrics").at("bleu2").at("significant") == false);
      found_star = true;
    }
    if (rec.at("baseline") == true) {
      CHECK(rec.at("approach") == "ssp");
      baseline_tagged = true;
    }
  }
  CHECK(found_star);
  CHECK(baseline_tagged);
  CHECK(rendered.table.find("== English ==") != std::string::npos);
  CHECK(rendered.table.find("60.00*") != std::string::npos);
  CHECK(rendered.table.find("[baseline]") != std::string::npos);
}

TEST_CASE("precomputed embedding provider joins by text digest") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "mcqforge_metrics_test";
  fs::create_directories(dir);
  auto path = dir / "vectors.jsonl";
  {
    std::vector<json> records;
    records.push_back(json{
        {"id", PrecomputedEmbeddingProvider::id_of("sun")},
        {"vector", std::vector<double>{1, 0, 0}}});
    records.push_back(json{
        {"id", PrecomputedEmbeddingProvider::id_of("moon")},
        {"vector", std::vector<double>{0, 1, 0}}});
    write_jsonl(path, records);
  }
  PrecomputedEmbeddingProvider provider(path);
  CHECK(provider.dim() == 3);
  CHECK(provider.embed("sun", Language::En) == Vec{1, 0, 0});
  CHECK(cosine(provider.embed("sun", Language::En),
               provider.embed("moon", Language::En)) == doctest::Approx(0.0));
  CHECK_THROWS(provider.embed("mars", Language::En));

  // Mid-file dimension changes are rejected.
  {
    std::vector<json> records;
    records.push_back(json{{"id", "a"}, {"vector", std::vector<double>{1, 0}}});
    records.push_back(json{{"id", "b"}, {"vector", std::vector<double>{1, 0, 0}}});
    write_jsonl(path, records);
  }
  CHECK_THROWS_AS(PrecomputedEmbeddingProvider{path}, FormatError);
  fs::remove(path);
}
