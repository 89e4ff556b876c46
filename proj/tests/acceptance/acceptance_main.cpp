// Acceptance suite: eight criteria, one pass/fail line each, exit nonzero
// if any fail. Runs entirely offline against the mock provider and the
// test embedding provider.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"
#include "mcqforge/data.hpp"
#include "mcqforge/digest.hpp"
#include "mcqforge/humaneval.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/llm.hpp"
#include "mcqforge/metrics.hpp"
#include "mcqforge/pipeline.hpp"
#include "mcqforge/prompts.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace mcqforge;

namespace {

struct Checker {
  int failures = 0;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ++failures;
      detail << "    FAILED: " << what << "\n";
    }
  }
  void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      ++failures;
      detail << "    FAILED: " << what << " (got " << got << ", want " << want
             << " +/- " << tol << ")\n";
    }
  }
};

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "mcqforge_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::vector<Context> synthetic_contexts(std::size_t n) {
  std::vector<Context> contexts;
  contexts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Context c;
    c.text = "Synthetic passage number " + std::to_string(i) +
             " about a topic of its own.";
    c.id = sha256_hex_prefix("synthetic\x1f" + c.text, 16);
    c.language = Language::En;
    c.source_dataset = "synthetic";
    contexts.push_back(std::move(c));
  }
  return contexts;
}

// ---- Criterion 1: metric kernels match independent oracles --------------

void criterion_oracle_equivalence(Checker& check) {
  using metrics::TokenSeq;
  auto as_seq = [](const std::vector<std::string>& tokens) {
    TokenSeq s;
    s.tokens = tokens;
    return s;
  };

  // BLEU vs brute-force clipped counter: 1000 random pairs, lengths <= 8,
  // alphabet size 5, all orders, 1e-9.
  {
    std::mt19937_64 rng(616);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      auto cand = testutil::random_tokens(rng, 8, 5);
      auto ref = testutil::random_tokens(rng, 8, 5);
      for (int n = 1; n <= 4; ++n) {
        double got = metrics::bleu_n(as_seq(cand), as_seq(ref), n);
        double want = testutil::oracle_bleu(cand, ref, n);
        if (std::fabs(got - want) > 1e-9) {
          check.expect(false, "bleu mismatch at trial " + std::to_string(trial) +
                                  " n=" + std::to_string(n));
          return;
        }
        ++checked;
      }
    }
    check.expect(checked == 4000, "bleu oracle coverage");
  }

  // ROUGE-L vs exhaustive LCS enumeration: all sequence pairs with lengths
  // <= 6 over a 3-symbol alphabet.
  {
    std::vector<std::vector<std::string>> all;
    static const char* kAlphabet[3] = {"a", "b", "c"};
    std::function<void(std::vector<std::string>&)> grow =
        [&](std::vector<std::string>& prefix) {
          all.push_back(prefix);
          if (prefix.size() == 6) return;
          for (const char* s : kAlphabet) {
            prefix.emplace_back(s);
            grow(prefix);
            prefix.pop_back();
          }
        };
    std::vector<std::string> start;
    grow(start);
    check.expect(all.size() == 1093, "sequence universe size");

    const auto total = static_cast<std::ptrdiff_t>(all.size());
    std::int64_t mismatches = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : mismatches)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
      for (std::ptrdiff_t j = 0; j < total; ++j) {
        double got = metrics::rouge_l(as_seq(all[i]), as_seq(all[j]));
        double want = testutil::oracle_rouge_l(all[i], all[j]);
        if (std::fabs(got - want) > 1e-9) ++mismatches;
      }
    }
    check.expect(mismatches == 0, "rouge-l vs exhaustive LCS (" +
                                      std::to_string(mismatches) + " mismatches)");
  }

  // Cosine vs direct dot/norm arithmetic, 1e-12.
  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 2000; ++trial) {
      std::size_t dim = 2 + rng() % 32;
      metrics::Vec v(dim), w(dim);
      for (double& x : v) x = normal(rng);
      for (double& x : w) x = normal(rng);
      double dot = 0, nv = 0, nw = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        dot += v[k] * w[k];
        nv += v[k] * v[k];
        nw += w[k] * w[k];
      }
      double want = dot / (std::sqrt(nv) * std::sqrt(nw));
      if (std::fabs(metrics::cosine(v, w) - want) > 1e-12) {
        check.expect(false, "cosine mismatch at trial " + std::to_string(trial));
        return;
      }
    }
  }
}

// ---- Criterion 2: hand-derived spot values -------------------------------

void criterion_spot_values(Checker& check) {
  auto as_seq = [](std::vector<std::string> tokens) {
    metrics::TokenSeq s;
    s.tokens = std::move(tokens);
    return s;
  };
  check.expect_near(metrics::bleu_n(as_seq({"the", "cat", "sat"}),
                                    as_seq({"the", "cat"}), 1),
                    0.6667, 1e-4, "bleu_1 spot value");
  check.expect_near(metrics::rouge_l(as_seq({"a", "c", "d"}),
                                     as_seq({"a", "b", "c", "d"})),
                    0.8571, 1e-4, "rouge_l spot value");
  check.expect_near(metrics::cosine({1, 2, 2}, {2, 1, 2}), 0.8889, 1e-4,
                    "cosine spot value");
  auto t = metrics::t_test({1, 2, 3}, {2, 3, 4}, metrics::TTestVariant::Student);
  check.expect_near(t.t, -1.2247, 1e-3, "student t spot value");
  check.expect_near(t.df, 4.0, 1e-12, "student df spot value");
}

// ---- Criterion 3: t-test calibration --------------------------------------

void criterion_ttest_calibration(Checker& check) {
  // Null: both samples from N(0,1), n = 50, 10,000 trials; the rejection
  // rate at alpha = 0.05 must land in [0.04, 0.06].
  {
    const int trials = 10000;
    std::int64_t rejections = 0;
#pragma omp parallel for schedule(static) reduction(+ : rejections)
    for (int trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng(777000 + trial);
      std::normal_distribution<double> normal;
      std::vector<double> a(50), b(50);
      for (double& x : a) x = normal(rng);
      for (double& x : b) x = normal(rng);
      if (metrics::t_test(a, b).significant) ++rejections;
    }
    double rate = static_cast<double>(rejections) / trials;
    check.expect(rate >= 0.04 && rate <= 0.06,
                 "null rejection rate " + std::to_string(rate) +
                     " outside [0.04, 0.06]");
  }

  // Power: a 3-sigma mean shift with n = 1000 must be detected in at least
  // 999 of 1000 trials.
  {
    const int trials = 1000;
    std::int64_t detected = 0;
#pragma omp parallel for schedule(static) reduction(+ : detected)
    for (int trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng(424000 + trial);
      std::normal_distribution<double> normal;
      std::vector<double> a(1000), b(1000);
      for (double& x : a) x = normal(rng);
      for (double& x : b) x = normal(rng) + 3.0;
      if (metrics::t_test(a, b).significant) ++detected;
    }
    double rate = static_cast<double>(detected) / trials;
    check.expect(rate >= 0.999, "3-sigma power " + std::to_string(rate));
  }
}

// ---- Criterion 4: pipeline count law over 850 contexts -------------------

void criterion_count_law(Checker& check) {
  fs::path dir = work_dir() / "count_law";
  fs::create_directories(dir);
  fs::path cache = dir / "cache.jsonl";
  fs::remove(cache);

  std::vector<Context> contexts = synthetic_contexts(850);
  pipeline::PipelineConfig config;
  config.model_tag = "mock-davinci";
  pipeline::RunMeta meta{"synthetic", "fixture", 7};

  pipeline::RunManifest first;
  {
    auto provider = std::make_shared<llm::MockProvider>();
    llm::Client client(provider, llm::ClientConfig{}, cache);
    pipeline::Runner runner(client, prompts::TemplateRegistry::builtin(), config);
    first = runner.run_corpus(contexts, meta, dir / "items1.jsonl",
                              dir / "failures1.jsonl");
  }
  check.expect(first.contexts_total == 850, "contexts_total == 850");
  check.expect(first.paraphrase_branches == 2550,
               "paraphrase_branches == 2550 (got " +
                   std::to_string(first.paraphrase_branches) + ")");
  check.expect(first.questions == 2550,
               "questions == 2550 (got " + std::to_string(first.questions) + ")");
  check.expect(first.items == 2550,
               "items == 2550 (got " + std::to_string(first.items) + ")");
  check.expect(first.distractors == 7650,
               "distractors == 7650 (got " + std::to_string(first.distractors) + ")");
  check.expect(first.contexts_failed == 0, "no context failures");

  // Every persisted item validates; scoring yields exactly 7650 pairs.
  std::vector<McqItem> items;
  for_each_jsonl(dir / "items1.jsonl", [&items](const json& j, std::size_t) {
    items.push_back(mcq_item_from_json(j));
  });
  check.expect(items.size() == 2550, "item stream holds 2550 records");
  bool all_valid = true;
  for (const McqItem& item : items) {
    if (!validate_mcq(item).ok()) all_valid = false;
  }
  check.expect(all_valid, "every persisted item passes validate_mcq");

  metrics::HashEmbeddingProvider embedder(64);
  metrics::ScoreStats stats;
  auto rows = metrics::score_items(items, embedder, &stats);
  check.expect(rows.size() == 7650,
               "scored pairs == 7650 (got " + std::to_string(rows.size()) + ")");
  check.expect(stats.items_skipped == 0, "no items skipped in scoring");

  // Warm-cache rerun: byte-identical output, zero provider calls.
  std::int64_t rerun_calls = -1;
  {
    auto provider = std::make_shared<llm::MockProvider>();
    llm::Client client(provider, llm::ClientConfig{}, cache);
    pipeline::Runner runner(client, prompts::TemplateRegistry::builtin(), config);
    runner.run_corpus(contexts, meta, dir / "items2.jsonl", dir / "failures2.jsonl");
    rerun_calls = provider->calls();
  }
  check.expect(rerun_calls == 0, "warm rerun issues zero provider calls (got " +
                                     std::to_string(rerun_calls) + ")");
  check.expect(read_text_file(dir / "items1.jsonl") ==
                   read_text_file(dir / "items2.jsonl"),
               "warm rerun is byte-identical");
}

// ---- Criterion 5: prompt fidelity against golden files -------------------

void criterion_prompt_fidelity(Checker& check) {
  auto registry = prompts::TemplateRegistry::builtin();
  fs::path golden_dir = fs::path(MCQFORGE_TEST_DIR) / "golden" / "prompts";
  auto golden = [&golden_dir](const std::string& name) {
    return read_text_file(golden_dir / name);
  };

  for (int l = 0; l < kLanguageCount; ++l) {
    Language lang = static_cast<Language>(l);
    std::string code(language_code(lang));

    Context ctx;
    ctx.id = "ctx";
    ctx.text = testutil::fixture_context(lang);
    ctx.language = lang;
    Paraphrase para;
    para.context_id = "ctx";
    para.index = 1;
    para.text = testutil::fixture_paraphrase(lang);
    GeneratedQuestion question;
    question.context_id = "ctx";
    question.paraphrase_index = 1;
    question.correct_answer = testutil::fixture_keyword(lang);
    question.text = testutil::fixture_question(lang);

    check.expect(prompts::render_pg(registry, ctx) == golden("pg_" + code + ".txt"),
                 "pg prompt bytes (" + code + ")");
    check.expect(prompts::render_ke(registry, para, lang) ==
                     golden("ke_" + code + ".txt"),
                 "ke prompt bytes (" + code + ")");
    check.expect(prompts::render_qg(registry, para, testutil::fixture_keyword(lang),
                                    lang, Shot::Zero) ==
                     golden("qg_" + code + ".txt"),
                 "qg prompt bytes (" + code + ")");
    check.expect(prompts::render_dg(registry, question,
                                    testutil::fixture_keyword(lang), lang,
                                    Shot::Zero) == golden("dg_" + code + ".txt"),
                 "dg prompt bytes (" + code + ")");
    check.expect(prompts::render_ssp(registry, ctx) ==
                     golden("ssp_" + code + ".txt"),
                 "ssp prompt bytes (" + code + ")");

    auto qg_ex = testutil::fixture_qg_exemplar();
    auto dg_ex = testutil::fixture_dg_exemplar();
    check.expect(prompts::render_qg(registry, para, testutil::fixture_keyword(lang),
                                    lang, Shot::One, &qg_ex) ==
                     golden("qg_one_" + code + ".txt"),
                 "one-shot qg prompt bytes (" + code + ")");
    check.expect(prompts::render_dg(registry, question,
                                    testutil::fixture_keyword(lang), lang,
                                    Shot::One, &dg_ex) ==
                     golden("dg_one_" + code + ".txt"),
                 "one-shot dg prompt bytes (" + code + ")");
  }
}

// ---- Criterion 6: report reproduction from synthetic fixtures -------------

void criterion_report_reproduction(Checker& check) {
  // Four groups shaped like the English block of the automated-evaluation
  // table; each group gets rows jittered symmetrically around the target
  // means so the means are exact and variances nonzero.
  struct GroupSpec {
    const char* model;
    Approach approach;
    Shot shot;
    std::array<double, 6> display;  // bleu1..4, rouge x100; cs raw
  };
  const std::vector<GroupSpec> specs = {
      {"davinci", Approach::MSP, Shot::Zero, {14.75, 7.68, 4.47, 2.47, 13.47, 0.73}},
      {"gpt-4", Approach::MSP, Shot::Zero, {14.47, 7.45, 4.28, 2.27, 13.18, 0.69}},
      {"davinci", Approach::SSP, Shot::Zero, {14.92, 7.17, 4.45, 2.29, 12.94, 0.68}},
      {"davinci", Approach::MSP, Shot::One, {14.64, 7.69, 4.15, 2.49, 13.54, 0.74}},
  };

  std::vector<metrics::ScoreRow> rows;
  int next_id = 0;
  for (const GroupSpec& spec : specs) {
    for (int i = 0; i < 50; ++i) {
      metrics::ScoreRow row;
      row.item_id = "fx-" + std::to_string(next_id++);
      row.distractor_index = 1 + (i % 3);
      row.language = Language::En;
      row.model_tag = spec.model;
      row.approach = spec.approach;
      row.shot = spec.shot;
      double eps = (i % 2 == 0 ? 1.0 : -1.0) * 1e-4;
      row.bleu1 = spec.display[0] / 100.0 + eps;
      row.bleu2 = spec.display[1] / 100.0 + eps;
      row.bleu3 = spec.display[2] / 100.0 + eps;
      row.bleu4 = spec.display[3] / 100.0 + eps;
      row.rouge_l = spec.display[4] / 100.0 + eps;
      row.cs = spec.display[5] + eps;
      rows.push_back(std::move(row));
    }
  }

  metrics::AggregateReport agg = metrics::aggregate(rows);
  metrics::BaselineSelector baseline;  // SSP within the language
  metrics::RenderedReport rendered = metrics::render_report(agg, baseline);

  auto cell_text = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  const GroupSpec* baseline_spec = &specs[2];
  for (const GroupSpec& spec : specs) {
    bool found = false;
    for (const auto& rec : rendered.records) {
      if (rec.at("model_tag") != spec.model ||
          rec.at("approach") != approach_code(spec.approach) ||
          rec.at("shot") != shot_code(spec.shot)) {
        continue;
      }
      found = true;
      for (std::size_t m = 0; m < metrics::kMetricCount; ++m) {
        double display = rec.at("metrics")
                             .at(metrics::kMetricNames[m])
                             .at("display")
                             .get<double>();
        check.expect(cell_text(display) == cell_text(spec.display[m]),
                     std::string(spec.model) + "/" +
                         std::string(approach_code(spec.approach)) + "/" +
                         std::string(shot_code(spec.shot)) + " " +
                         metrics::kMetricNames[m] + " cell == " +
                         cell_text(spec.display[m]) + " (got " +
                         cell_text(display) + ")");
        bool starred = rec.at("metrics")
                           .at(metrics::kMetricNames[m])
                           .at("significant")
                           .get<bool>();
        bool beats_baseline = spec.display[m] > baseline_spec->display[m];
        bool is_baseline = &spec == baseline_spec;
        check.expect(starred == (!is_baseline && beats_baseline),
                     std::string(spec.model) + " " + metrics::kMetricNames[m] +
                         " star convention");
      }
      check.expect(rec.at("baseline").get<bool>() == (&spec == baseline_spec),
                   std::string(spec.model) + " baseline tag");
    }
    check.expect(found, std::string("group present: ") + spec.model);
  }
  check.expect(rendered.table.find("14.75") != std::string::npos,
               "table shows the 0-shot chain cell");
  check.expect(rendered.table.find("0.74*") != std::string::npos,
               "table stars the 1-shot similarity cell");

  // Human-rating fixture: integer scores engineered to hit the published
  // English row means exactly (4.38 / 4.29 / 3.68 over 100 items).
  std::map<std::string, humaneval::ItemKey> keys;
  std::vector<humaneval::RatingRecord> records;
  for (int i = 0; i < 100; ++i) {
    std::string id = "he-" + std::to_string(i);
    keys[id] = {Language::En, "davinci", Approach::MSP, Shot::Zero};
    humaneval::RatingRecord r;
    r.item_id = id;
    r.rater_id = "rater-en";
    r.grammaticality = i < 38 ? 5 : 4;   // mean 4.38
    r.answerability = i < 29 ? 5 : 4;    // mean 4.29
    r.difficulty = i < 68 ? 4 : 3;       // mean 3.68
    records.push_back(std::move(r));
  }
  humaneval::RatingReport report = humaneval::aggregate_ratings(records, keys);
  check.expect(report.rows.size() == 1, "one rating group");
  if (!report.rows.empty()) {
    check.expect_near(report.rows[0].grammaticality, 4.38, 1e-12,
                      "grammaticality mean 4.38");
    check.expect_near(report.rows[0].answerability, 4.29, 1e-12,
                      "answerability mean 4.29");
    check.expect_near(report.rows[0].difficulty, 3.68, 1e-12,
                      "difficulty mean 3.68");
  }
  std::string table = humaneval::render_rating_report(report);
  check.expect(table.find("4.38") != std::string::npos &&
                   table.find("4.29") != std::string::npos &&
                   table.find("3.68") != std::string::npos,
               "rating table shows 4.38 / 4.29 / 3.68");
}

// ---- Criterion 7: adversarial parsing corpus ------------------------------

void criterion_adversarial_parsing(Checker& check) {
  fs::path corpus = fs::path(MCQFORGE_TEST_DIR) / "fixtures" /
                    "adversarial_parsing.jsonl";
  std::vector<json> cases = read_jsonl(corpus);
  check.expect(cases.size() == 30, "corpus holds 30 cases");

  int case_index = 0;
  for (const json& c : cases) {
    ++case_index;
    const std::string name = c.at("name").get<std::string>();
    const std::string kind = c.at("kind").get<std::string>();
    const std::string expect = c.at("expect").get<std::string>();
    const std::string input = c.at("input").get<std::string>();

    if (kind == "dg") {
      const std::string answer = c.at("answer").get<std::string>();
      try {
        auto got = pipeline::parse_distractors(input, 3, answer);
        check.expect(expect == "ok", name + ": expected failure, got distractors");
        if (expect == "ok") {
          auto want = c.at("distractors").get<std::vector<std::string>>();
          check.expect(got == want, name + ": distractor list");
        }
      } catch (const pipeline::InsufficientDistractorsError& e) {
        check.expect(expect == "insufficient", name + ": unexpected shortfall");
        if (expect == "insufficient") {
          check.expect(e.found == c.at("found").get<int>(),
                       name + ": InsufficientDistractors found count");
        }
      }
      continue;
    }

    // Single-stage cases run through the full flow via a scripted provider
    // so validation gating is exercised and invalid items never escape.
    Context ctx;
    ctx.id = "adv-" + std::to_string(case_index);
    ctx.text = "ADV" + std::to_string(case_index);
    ctx.language = Language::En;
    ctx.source_dataset = "adversarial";

    pipeline::PipelineConfig config;
    config.approach = Approach::SSP;
    config.model_tag = "mock-davinci";
    std::map<std::string, std::string> script;
    script[llm::MockProvider::normalize_ws(
        "Generate MCQs based on the given context " + ctx.text +
        " along with the correct answer and three distractors in language "
        "English")] = input;
    auto provider = std::make_shared<llm::MockProvider>(std::move(script));
    llm::Client client(provider, llm::ClientConfig{}, std::nullopt);
    pipeline::Runner runner(client, prompts::TemplateRegistry::builtin(), config);
    auto outcome = runner.run_ssp(ctx);

    for (const McqItem& item : outcome.items) {
      check.expect(validate_mcq(item).ok(), name + ": emitted item validates");
    }

    if (expect == "ok") {
      auto want_items = c.at("items").get<std::size_t>();
      check.expect(outcome.items.size() == want_items,
                   name + ": item count (got " +
                       std::to_string(outcome.items.size()) + ", want " +
                       std::to_string(want_items) + ")");
      if (!outcome.items.empty()) {
        check.expect(outcome.items[0].question.correct_answer ==
                         c.at("answer").get<std::string>(),
                     name + ": first answer");
        check.expect(outcome.items[0].distractors ==
                         c.at("distractors").get<std::vector<std::string>>(),
                     name + ": first distractor set");
      }
    } else if (expect == "parse_failure") {
      check.expect(outcome.items.empty(), name + ": no items on parse failure");
      bool logged = false;
      for (const auto& f : outcome.failures) {
        if (f.stage == "ssp" && f.detail == input) logged = true;
      }
      check.expect(logged, name + ": ParseFailure logged with raw completion");
    } else if (expect == "validation_drop") {
      check.expect(outcome.items.empty(), name + ": invalid block dropped");
      bool logged = false;
      for (const auto& f : outcome.failures) {
        if (f.stage == "ssp" && f.reason.find("validation") != std::string::npos) {
          logged = true;
        }
      }
      check.expect(logged, name + ": validation failure logged");
    } else {
      check.expect(false, name + ": unknown expectation " + expect);
    }
  }
}

// ---- Criterion 8: determinism ---------------------------------------------

void criterion_determinism(Checker& check) {
  fs::path dir = work_dir() / "determinism";
  fs::create_directories(dir);

  // Same file, same seed: identical samples (the ingest path).
  {
    json doc;
    doc["data"] = json::array();
    json article;
    article["paragraphs"] = json::array();
    for (int i = 0; i < 200; ++i) {
      article["paragraphs"].push_back(
          json{{"context", "Ingest passage " + std::to_string(i)}});
    }
    doc["data"].push_back(article);
    write_text_file(dir / "dataset.json", doc.dump());

    auto descriptor = data::descriptor_for("squad", dir / "dataset.json");
    auto pool1 = data::load_contexts(descriptor);
    auto pool2 = data::load_contexts(descriptor);
    auto sample1 = data::sample_contexts(pool1, 50, 7);
    auto sample2 = data::sample_contexts(pool2, 50, 7);
    check.expect(sample1 == sample2, "seeded sampling is reproducible");
    check.expect(sample1.size() == 50, "sample size");
  }

  // Two full cold mock runs with the same config produce identical digests.
  {
    std::vector<Context> contexts = synthetic_contexts(40);
    pipeline::PipelineConfig config;
    config.model_tag = "mock-davinci";
    pipeline::RunMeta meta{"synthetic", "fixture", 7};

    auto run_once = [&](const fs::path& items) {
      auto provider = std::make_shared<llm::MockProvider>();
      llm::Client client(provider, llm::ClientConfig{}, std::nullopt);  // cold
      pipeline::Runner runner(client, prompts::TemplateRegistry::builtin(),
                              config);
      runner.run_corpus(contexts, meta, items, items.string() + ".failures");
      return sha256_hex(read_text_file(items));
    };
    std::string digest1 = run_once(dir / "run1.jsonl");
    std::string digest2 = run_once(dir / "run2.jsonl");
    check.expect(digest1 == digest2,
                 "two cold mock runs produce identical output digests");
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric-oracle equivalence (bleu / rouge-l / cosine)",
       criterion_oracle_equivalence},
      {2, "hand-derived spot values", criterion_spot_values},
      {3, "t-test calibration (null rate and 3-sigma power)",
       criterion_ttest_calibration},
      {4, "pipeline count law over 850 contexts + warm-cache replay",
       criterion_count_law},
      {5, "prompt fidelity against golden files", criterion_prompt_fidelity},
      {6, "report reproduction from synthetic fixtures",
       criterion_report_reproduction},
      {7, "adversarial parsing corpus (30 cases)", criterion_adversarial_parsing},
      {8, "determinism (seeded ingest and repeated mock runs)",
       criterion_determinism},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    Checker check;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("unhandled exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    bool ok = check.failures == 0;
    if (!ok) ++failed;
    std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, seconds);
    if (!ok) std::fputs(check.detail.str().c_str(), stdout);
  }
  std::printf("%zu/%zu acceptance criteria passed\n",
              criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
