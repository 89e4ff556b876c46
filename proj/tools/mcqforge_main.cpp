// mcqforge: multilingual MCQ generation and evaluation toolkit.
//
// Subcommands: ingest, generate, score, report, ttest,
// humaneval {export|rate|aggregate}, cache {stats|clear}.
// Exit codes: 0 success, 1 validation, 2 IO/format, 3 budget/provider.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "mcqforge/config.hpp"
#include "mcqforge/core.hpp"
#include "mcqforge/data.hpp"
#include "mcqforge/digest.hpp"
#include "mcqforge/humaneval.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/llm.hpp"
#include "mcqforge/metrics.hpp"
#include "mcqforge/pipeline.hpp"
#include "mcqforge/prompts.hpp"

namespace fs = std::filesystem;
using namespace mcqforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitProvider = 3;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::string provider;
  std::int64_t seed = -1;
};

cli::RunConfig resolve_config(const GlobalFlags& flags) {
  cli::RunConfig config;
  if (!flags.config_path.empty()) {
    config = cli::RunConfig::load(flags.config_path);
  }
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.provider.empty()) config.provider_kind = flags.provider;
  if (flags.seed >= 0) {
    config.sample_seed = static_cast<std::uint64_t>(flags.seed);
    config.pipeline_seed = static_cast<std::uint64_t>(flags.seed);
  }
  return config;
}

std::shared_ptr<llm::Provider> make_provider(const cli::RunConfig& config) {
  if (config.provider_kind == "mock") {
    std::map<std::string, std::string> script;
    if (!config.mock_script.empty()) {
      script = llm::load_mock_script(config.mock_script);
    }
    return std::make_shared<llm::MockProvider>(std::move(script));
  }
  if (config.provider_kind == "openai-compatible") {
    llm::HttpProviderConfig http;
    http.base_url = config.base_url;
    http.api_style = config.api_style == "chat"
                         ? llm::HttpProviderConfig::ApiStyle::Chat
                         : llm::HttpProviderConfig::ApiStyle::Completions;
    http.endpoint_path = config.endpoint_path;
    http.model = config.model_tag;
    http.timeout_seconds = config.timeout_seconds;
    return std::make_shared<llm::HttpProvider>(http);
  }
  throw cli::ConfigError("unknown provider kind: " + config.provider_kind +
                         " (expected mock or openai-compatible)");
}

std::optional<fs::path> cache_path_for(const cli::RunConfig& config) {
  if (config.cache == "off") return std::nullopt;
  if (config.cache == "on" || config.cache.empty()) {
    return fs::path(config.out_dir) / "completions.cache.jsonl";
  }
  return fs::path(config.cache);
}

std::unique_ptr<metrics::EmbeddingProvider> make_embedder(
    const cli::RunConfig& config) {
  if (config.embedding == "test") {
    return std::make_unique<metrics::HashEmbeddingProvider>(
        static_cast<std::size_t>(config.embedding_dim));
  }
  if (config.embedding == "precomputed") {
    if (config.embedding_path.empty()) {
      throw cli::ConfigError("metrics.embedding_path required for precomputed embeddings");
    }
    return std::make_unique<metrics::PrecomputedEmbeddingProvider>(
        config.embedding_path);
  }
  throw cli::ConfigError("unknown embedding provider: " + config.embedding);
}

std::vector<McqItem> read_items(const fs::path& path) {
  std::vector<McqItem> items;
  for_each_jsonl(path, [&items](const json& j, std::size_t) {
    items.push_back(mcq_item_from_json(j));
  });
  return items;
}

std::vector<metrics::ScoreRow> read_rows(const fs::path& path) {
  std::vector<metrics::ScoreRow> rows;
  for_each_jsonl(path, [&rows](const json& j, std::size_t) {
    rows.push_back(metrics::score_row_from_json(j));
  });
  return rows;
}

// "approach=msp,shot=zero,language=en,model=tag" -> row filter.
struct GroupSelector {
  std::optional<Language> language;
  std::optional<std::string> model_tag;
  std::optional<Approach> approach;
  std::optional<Shot> shot;

  static GroupSelector parse(const std::string& text) {
    GroupSelector sel;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find(',', start);
      std::string part = text.substr(
          start, end == std::string::npos ? std::string::npos : end - start);
      start = end == std::string::npos ? text.size() : end + 1;
      if (part.empty()) continue;
      std::size_t eq = part.find('=');
      if (eq == std::string::npos) {
        throw Error("bad group selector '" + part + "' (expected key=value)");
      }
      std::string key = part.substr(0, eq), value = part.substr(eq + 1);
      if (key == "language") {
        sel.language = parse_language(value);
      } else if (key == "model" || key == "model_tag") {
        sel.model_tag = value;
      } else if (key == "approach") {
        sel.approach = parse_approach(value);
      } else if (key == "shot") {
        sel.shot = parse_shot(value);
      } else {
        throw Error("unknown group selector key: " + key);
      }
    }
    return sel;
  }

  bool matches(const metrics::ScoreRow& row) const {
    if (language && row.language != *language) return false;
    if (model_tag && row.model_tag != *model_tag) return false;
    if (approach && row.approach != *approach) return false;
    if (shot && row.shot != *shot) return false;
    return true;
  }
};

int cmd_ingest(const GlobalFlags& flags, const std::string& dataset,
               const std::string& path, std::int64_t n, std::int64_t seed,
               const std::string& out_path, const std::string& format,
               const std::string& delimiter, int context_column,
               const std::string& records_field,
               const std::string& context_field) {
  cli::RunConfig config = resolve_config(flags);
  if (!dataset.empty()) config.dataset_name = dataset;
  if (!path.empty()) config.dataset_path = path;
  if (n >= 0) config.sample_n = n;
  if (seed >= 0) config.sample_seed = static_cast<std::uint64_t>(seed);
  if (!format.empty()) config.dataset_format = format;
  if (!delimiter.empty()) config.dataset_delimiter = delimiter == "\\t" ? "\t" : delimiter;
  if (context_column >= 0) config.context_column = context_column;
  if (!records_field.empty()) config.records_field = records_field;
  if (!context_field.empty()) config.context_field = context_field;

  if (config.dataset_name.empty() || config.dataset_path.empty()) {
    throw cli::ConfigError("ingest needs --dataset and --path (or a config file)");
  }
  if (config.sample_n < 1) {
    throw cli::ConfigError("--n must be >= 1");
  }
  if (!fs::exists(config.dataset_path)) {
    throw IoError("dataset file not found: " + config.dataset_path);
  }

  data::DatasetDescriptor descriptor =
      data::descriptor_for(config.dataset_name, config.dataset_path);
  if (!config.dataset_format.empty()) {
    if (config.dataset_format == "squad_json") {
      descriptor.format = data::DatasetFormat::SquadJson;
    } else if (config.dataset_format == "paired_text") {
      descriptor.format = data::DatasetFormat::PairedText;
    } else if (config.dataset_format == "qa_json") {
      descriptor.format = data::DatasetFormat::QaJson;
    } else {
      throw cli::ConfigError("unknown dataset format: " + config.dataset_format);
    }
  }
  descriptor.delimiter = config.dataset_delimiter.empty() ? '\t' : config.dataset_delimiter[0];
  descriptor.context_column = config.context_column;
  descriptor.records_field = config.records_field;
  descriptor.context_field = config.context_field;

  std::vector<Context> pool = data::load_contexts(descriptor);
  bool saturated = false;
  std::vector<Context> sample = data::sample_contexts(
      pool, static_cast<std::size_t>(config.sample_n), config.sample_seed,
      &saturated);

  fs::path out = out_path.empty()
                     ? fs::path(config.out_dir) / "contexts.jsonl"
                     : fs::path(out_path);
  fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  {
    JsonlWriter writer(out);
    for (const Context& c : sample) writer.write(to_json(c));
  }
  std::cout << "pool=" << pool.size() << " sample=" << sample.size() << " -> "
            << out.string() << "\n";
  if (saturated) {
    std::cerr << "warning: requested " << config.sample_n << " contexts, pool has "
              << pool.size() << "\n";
  }
  return kExitOk;
}

int cmd_generate(const GlobalFlags& flags, const std::string& contexts_path,
                 const std::string& approach, const std::string& shot,
                 const std::string& language, const std::string& exemplars) {
  cli::RunConfig config = resolve_config(flags);
  if (!approach.empty()) config.approach = approach;
  if (!shot.empty()) config.shot = shot;
  if (!language.empty()) config.language = language;
  if (!exemplars.empty()) config.exemplars_path = exemplars;

  fs::create_directories(config.out_dir);

  // Input contexts: an explicit stream file, or load+sample per config.
  std::vector<Context> contexts;
  std::string dataset_tag;
  std::string input_digest;
  if (!contexts_path.empty()) {
    for_each_jsonl(contexts_path, [&contexts](const json& j, std::size_t) {
      contexts.push_back(context_from_json(j));
    });
    dataset_tag = contexts.empty() ? "unknown" : contexts.front().source_dataset;
    input_digest = sha256_hex_prefix(read_text_file(contexts_path), 16);
  } else {
    if (config.dataset_name.empty() || config.dataset_path.empty()) {
      throw cli::ConfigError("generate needs --contexts or [dataset] in the config");
    }
    data::DatasetDescriptor descriptor =
        data::descriptor_for(config.dataset_name, config.dataset_path);
    std::vector<Context> pool = data::load_contexts(descriptor);
    contexts = data::sample_contexts(
        pool, static_cast<std::size_t>(config.sample_n), config.sample_seed);
    dataset_tag = config.dataset_name;
    input_digest = sha256_hex_prefix(read_text_file(config.dataset_path), 16);
  }

  pipeline::PipelineConfig pipe_config = config.pipeline_config();
  for (const Context& c : contexts) {
    if (c.language != pipe_config.language) {
      throw cli::ConfigError("context " + c.id + " is " +
                             std::string(language_code(c.language)) +
                             " but the run language is " +
                             std::string(language_code(pipe_config.language)));
    }
  }

  // Resolved-config echo first, so aborted runs remain reproducible.
  write_text_file(fs::path(config.out_dir) / "resolved_config.ini", config.to_ini());

  prompts::TemplateRegistry registry = prompts::TemplateRegistry::builtin();
  if (!config.template_overrides.empty()) {
    registry.load_overrides(config.template_overrides);
  }

  llm::Client client(make_provider(config), config.client_config(),
                     cache_path_for(config));
  pipeline::Runner runner(client, registry, pipe_config);
  pipeline::RunMeta meta{dataset_tag, input_digest, config.sample_seed};

  fs::path items_path = fs::path(config.out_dir) / "items.jsonl";
  fs::path failures_path = fs::path(config.out_dir) / "failures.jsonl";
  pipeline::RunManifest manifest;
  try {
    manifest = runner.run_corpus(contexts, meta, items_path, failures_path);
  } catch (const llm::BudgetExhaustedError& e) {
    std::cerr << "aborted: " << e.what() << " (partial outputs in "
              << config.out_dir << ")\n";
    return kExitProvider;
  }
  write_text_file(fs::path(config.out_dir) / "manifest.json",
                  pipeline::manifest_to_json(manifest).dump(2) + "\n");

  double failed_fraction =
      static_cast<double>(manifest.contexts_failed) /
      static_cast<double>(manifest.contexts_total);
  std::cout << "contexts=" << manifest.contexts_total
            << " items=" << manifest.items
            << " failures=" << manifest.contexts_failed
            << " provider_calls=" << manifest.provider_calls
            << " cache_hits=" << manifest.cache_hits << "\n";
  if (failed_fraction > pipe_config.failure_tolerance) {
    std::cerr << "context failure fraction " << failed_fraction
              << " exceeds tolerance " << pipe_config.failure_tolerance << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_score(const GlobalFlags& flags, const std::string& items_path,
              const std::string& out_path, const std::string& embedding,
              const std::string& embedding_path, int dim) {
  cli::RunConfig config = resolve_config(flags);
  if (!embedding.empty()) config.embedding = embedding;
  if (!embedding_path.empty()) config.embedding_path = embedding_path;
  if (dim > 0) config.embedding_dim = dim;

  std::vector<McqItem> items = read_items(items_path);
  auto embedder = make_embedder(config);
  metrics::ScoreStats stats;
  std::vector<metrics::ScoreRow> rows = metrics::score_items(items, *embedder, &stats);

  fs::path out = out_path.empty() ? fs::path(config.out_dir) / "scores.jsonl"
                                  : fs::path(out_path);
  fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
  {
    JsonlWriter writer(out);
    for (const metrics::ScoreRow& row : rows) writer.write(metrics::to_json(row));
  }
  std::cout << "items=" << stats.items_scored << " skipped=" << stats.items_skipped
            << " rows=" << rows.size() << " embedding=" << embedder->tag()
            << " -> " << out.string() << "\n";
  for (const std::string& id : stats.skipped_item_ids) {
    std::cerr << "skipped (empty tokenization): " << id << "\n";
  }
  return kExitOk;
}

int cmd_report(const GlobalFlags& flags, const std::string& scores_path,
               const std::string& baseline_spec, const std::string& variant) {
  cli::RunConfig config = resolve_config(flags);
  std::vector<metrics::ScoreRow> rows = read_rows(scores_path);
  if (rows.empty()) {
    std::cout << "no score rows; nothing to report\n";
    return kExitOk;
  }
  metrics::AggregateReport agg = metrics::aggregate(rows);

  metrics::BaselineSelector baseline;
  if (!baseline_spec.empty()) {
    GroupSelector sel = GroupSelector::parse(baseline_spec);
    baseline.approach = sel.approach;
    baseline.model_tag = sel.model_tag;
    baseline.shot = sel.shot;
  }
  metrics::TTestVariant tvariant = (variant == "welch" || (variant.empty() && config.ttest == "welch"))
                                       ? metrics::TTestVariant::Welch
                                       : metrics::TTestVariant::Student;
  metrics::RenderedReport rendered = metrics::render_report(agg, baseline, tvariant);

  fs::create_directories(config.out_dir);
  write_text_file(fs::path(config.out_dir) / "report.txt", rendered.table);
  {
    JsonlWriter writer(fs::path(config.out_dir) / "report.jsonl");
    for (const json& record : rendered.records) writer.write(record);
  }
  std::cout << rendered.table;
  return kExitOk;
}

int cmd_ttest(const GlobalFlags& flags, const std::string& scores_path,
              const std::string& group_a, const std::string& group_b,
              const std::string& metric, const std::string& variant) {
  cli::RunConfig config = resolve_config(flags);
  std::vector<metrics::ScoreRow> rows = read_rows(scores_path);
  GroupSelector sel_a = GroupSelector::parse(group_a);
  GroupSelector sel_b = GroupSelector::parse(group_b);
  metrics::TTestVariant tvariant = (variant == "welch" || (variant.empty() && config.ttest == "welch"))
                                       ? metrics::TTestVariant::Welch
                                       : metrics::TTestVariant::Student;

  for (std::size_t m = 0; m < metrics::kMetricCount; ++m) {
    if (metric != "all" && metric != metrics::kMetricNames[m]) continue;
    std::vector<double> a, b;
    for (const metrics::ScoreRow& row : rows) {
      if (sel_a.matches(row)) a.push_back(row.metric(m));
      if (sel_b.matches(row)) b.push_back(row.metric(m));
    }
    if (a.size() < 2 || b.size() < 2) {
      std::cout << metrics::kMetricLabels[m] << ": group too small (a=" << a.size()
                << ", b=" << b.size() << ")\n";
      continue;
    }
    metrics::TTestResult result = metrics::t_test(a, b, tvariant);
    std::cout << metrics::kMetricLabels[m] << ": t=" << result.t
              << " df=" << result.df << " p=" << result.p
              << (result.degenerate ? " (degenerate)" : "")
              << (result.significant ? " *" : "") << "\n";
  }
  return kExitOk;
}

int cmd_humaneval_export(const GlobalFlags& flags, const std::string& items_path,
                         std::int64_t n, std::int64_t seed, bool blind) {
  cli::RunConfig config = resolve_config(flags);
  std::vector<McqItem> items = read_items(items_path);
  fs::create_directories(config.out_dir);
  auto result = humaneval::export_batch(
      items, n < 0 ? 400 : static_cast<std::size_t>(n),
      seed < 0 ? config.sample_seed : static_cast<std::uint64_t>(seed), blind,
      fs::path(config.out_dir) / "rating_batch.jsonl",
      fs::path(config.out_dir) / "rating_key.jsonl");
  std::cout << "exported=" << result.exported << " -> "
            << (fs::path(config.out_dir) / "rating_batch.jsonl").string() << "\n";
  if (result.saturated) {
    std::cerr << "warning: pool smaller than requested batch\n";
  }
  return kExitOk;
}

int cmd_humaneval_rate(const std::string& batch_path, const std::string& records_path,
                       const std::string& rater) {
  std::size_t rated = humaneval::rate_interactive(batch_path, records_path, rater,
                                                  std::cin, std::cout);
  std::cerr << "recorded " << rated << " ratings in " << records_path << "\n";
  return kExitOk;
}

int cmd_humaneval_aggregate(const GlobalFlags& flags, const std::string& ratings_path,
                            const std::string& key_path) {
  cli::RunConfig config = resolve_config(flags);
  auto records = humaneval::load_ratings(ratings_path);
  auto keys = humaneval::load_key_file(key_path);
  humaneval::RatingReport report = humaneval::aggregate_ratings(records, keys);
  std::string table = humaneval::render_rating_report(report);
  fs::create_directories(config.out_dir);
  write_text_file(fs::path(config.out_dir) / "rating_report.txt", table);
  write_text_file(fs::path(config.out_dir) / "rating_report.json",
                  humaneval::rating_report_records(report).dump(2) + "\n");
  std::cout << table;
  return kExitOk;
}

int cmd_cache(const GlobalFlags& flags, const std::string& action,
              const std::string& cache_arg) {
  cli::RunConfig config = resolve_config(flags);
  fs::path path = cache_arg.empty()
                      ? cache_path_for(config).value_or(
                            fs::path(config.out_dir) / "completions.cache.jsonl")
                      : fs::path(cache_arg);
  if (action == "stats") {
    if (!fs::exists(path)) {
      std::cout << "cache " << path.string() << ": absent\n";
      return kExitOk;
    }
    llm::DiskCache cache(path);
    std::cout << "cache " << path.string() << ": entries=" << cache.size()
              << " bytes=" << fs::file_size(path) << "\n";
    return kExitOk;
  }
  if (action == "clear") {
    llm::DiskCache::clear(path);
    std::cout << "cleared " << path.string() << "\n";
    return kExitOk;
  }
  throw Error("unknown cache action: " + action);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilingual MCQ generation and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "run configuration file");
  app.add_option("--out-dir", flags.out_dir, "output directory (overrides config)");
  app.add_option("--provider", flags.provider, "mock | openai-compatible");
  app.add_option("--seed", flags.seed, "seed override for sampling and generation");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load a dataset and sample contexts");
  std::string in_dataset, in_path, in_out, in_format, in_delim, in_records, in_ctx_field;
  std::int64_t in_n = -1, in_seed = -1;
  int in_column = -1;
  ingest->add_option("--dataset", in_dataset, "squad | germanquad | hiquad | banglarqa");
  ingest->add_option("--path", in_path, "dataset file");
  ingest->add_option("--n", in_n, "sample size");
  ingest->add_option("--seed", in_seed, "sample seed");
  ingest->add_option("--out", in_out, "output context stream file");
  ingest->add_option("--format", in_format, "squad_json | paired_text | qa_json");
  ingest->add_option("--delimiter", in_delim, "paired_text delimiter");
  ingest->add_option("--context-column", in_column, "paired_text context column");
  ingest->add_option("--records-field", in_records, "qa_json records field");
  ingest->add_option("--context-field", in_ctx_field, "qa_json context field");

  // generate
  auto* generate = app.add_subcommand("generate", "run the generation pipeline");
  std::string gen_contexts, gen_approach, gen_shot, gen_lang, gen_exemplars;
  generate->add_option("--contexts", gen_contexts, "context stream file from ingest");
  generate->add_option("--approach", gen_approach, "msp | ssp");
  generate->add_option("--shot", gen_shot, "zero | one");
  generate->add_option("--lang", gen_lang, "en | de | hi | bn");
  generate->add_option("--exemplars", gen_exemplars, "exemplar file for one-shot runs");

  // score
  auto* score = app.add_subcommand("score", "score items into per-pair rows");
  std::string score_items_path, score_out, score_embedding, score_embedding_path;
  int score_dim = -1;
  score->add_option("--items", score_items_path, "item stream file")->required();
  score->add_option("--out", score_out, "output score-row file");
  score->add_option("--embedding", score_embedding, "test | precomputed");
  score->add_option("--embedding-path", score_embedding_path, "precomputed vector file");
  score->add_option("--dim", score_dim, "test embedding dimension");

  // report
  auto* report = app.add_subcommand("report", "aggregate score rows into the result grid");
  std::string report_scores, report_baseline, report_variant;
  report->add_option("--scores", report_scores, "score-row file")->required();
  report->add_option("--baseline", report_baseline,
                     "baseline group, e.g. approach=ssp (default)");
  report->add_option("--variant", report_variant, "student | welch");

  // ttest
  auto* ttest = app.add_subcommand("ttest", "compare two groups per metric");
  std::string tt_scores, tt_a, tt_b, tt_metric = "all", tt_variant;
  ttest->add_option("--scores", tt_scores, "score-row file")->required();
  ttest->add_option("--group-a", tt_a, "e.g. approach=msp,shot=zero")->required();
  ttest->add_option("--group-b", tt_b, "e.g. approach=ssp")->required();
  ttest->add_option("--metric", tt_metric, "all | bleu1..bleu4 | rouge_l | cs");
  ttest->add_option("--variant", tt_variant, "student | welch");

  // humaneval
  auto* humaneval_cmd = app.add_subcommand("humaneval", "human evaluation workflow");
  humaneval_cmd->require_subcommand(1);
  auto* he_export = humaneval_cmd->add_subcommand("export", "sample a rating batch");
  std::string he_items;
  std::int64_t he_n = -1, he_seed = -1;
  bool he_blind = false;
  he_export->add_option("--items", he_items, "item stream file")->required();
  he_export->add_option("--n", he_n, "batch size (default 400)");
  he_export->add_option("--seed", he_seed, "sample seed");
  he_export->add_flag("--blind", he_blind, "hide provenance from raters");

  auto* he_rate = humaneval_cmd->add_subcommand("rate", "interactive rating session");
  std::string he_batch, he_records = "ratings.jsonl", he_rater = "rater";
  he_rate->add_option("batch", he_batch, "batch file")->required();
  he_rate->add_option("--records", he_records, "rating record file (appended)");
  he_rate->add_option("--rater", he_rater, "rater id");

  auto* he_agg = humaneval_cmd->add_subcommand("aggregate", "aggregate rating records");
  std::string he_ratings, he_key;
  he_agg->add_option("ratings", he_ratings, "rating records (jsonl or 5-column)")
      ->required();
  he_agg->add_option("--key", he_key, "key file from export")->required();

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "inspect or clear the completion cache");
  cache_cmd->require_subcommand(1);
  auto* cache_stats = cache_cmd->add_subcommand("stats", "show cache size");
  auto* cache_clear = cache_cmd->add_subcommand("clear", "delete the cache file");
  std::string cache_path_arg;
  cache_stats->add_option("--cache", cache_path_arg, "cache file path");
  cache_clear->add_option("--cache", cache_path_arg, "cache file path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      return cmd_ingest(flags, in_dataset, in_path, in_n, in_seed, in_out,
                        in_format, in_delim, in_column, in_records, in_ctx_field);
    }
    if (*generate) {
      return cmd_generate(flags, gen_contexts, gen_approach, gen_shot, gen_lang,
                          gen_exemplars);
    }
    if (*score) {
      return cmd_score(flags, score_items_path, score_out, score_embedding,
                       score_embedding_path, score_dim);
    }
    if (*report) {
      return cmd_report(flags, report_scores, report_baseline, report_variant);
    }
    if (*ttest) {
      return cmd_ttest(flags, tt_scores, tt_a, tt_b, tt_metric, tt_variant);
    }
    if (*he_export) return cmd_humaneval_export(flags, he_items, he_n, he_seed, he_blind);
    if (*he_rate) return cmd_humaneval_rate(he_batch, he_records, he_rater);
    if (*he_agg) return cmd_humaneval_aggregate(flags, he_ratings, he_key);
    if (*cache_stats) return cmd_cache(flags, "stats", cache_path_arg);
    if (*cache_clear) return cmd_cache(flags, "clear", cache_path_arg);
  } catch (const llm::BudgetExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const llm::AuthError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const llm::ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const llm::TimeoutError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
