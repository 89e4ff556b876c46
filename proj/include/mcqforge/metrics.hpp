#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"

// Hand-implemented evaluation kernels: multilingual tokenization,
// sentence-level BLEU-1..4 with add-1 smoothing on zero higher-order
// counts, ROUGE-L (F-measure, beta = 1), cosine similarity over pluggable
// sentence embeddings, per-pair scoring, grouped aggregation, and
// two-sample significance tests.
namespace mcqforge::metrics {

struct ZeroVectorError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct EmptyTextError : Error {
  using Error::Error;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  Language language = Language::En;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Default word segmentation; punctuation-only and whitespace-only tokens
// never survive. English and German tokens are case-folded; Hindi and
// Bengali tokens are NFC-normalized without folding.
TokenSeq tokenize(std::string_view text, Language language);

// Geometric mean of clipped i-gram precisions (i = 1..n) times the brevity
// penalty min(1, exp(1 - r/c)). Any i-gram precision with a raw numerator
// of zero and i > 1 gets add-1 smoothing on numerator and denominator; a
// candidate shorter than n tokens scores 0.
double bleu_n(const TokenSeq& candidate, const TokenSeq& reference, int n);

// LCS F-measure with beta = 1: 2PR/(P+R), 0 when either side is empty or
// the LCS is empty.
double rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

using Vec = std::vector<double>;

double cosine(const Vec& v, const Vec& w);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Must be safe to call concurrently.
  virtual Vec embed(std::string_view text, Language language) = 0;
  virtual std::string tag() const = 0;
  virtual std::size_t dim() const = 0;
};

// Deterministic test provider: tokens are hashed (FNV-1a 64) into buckets
// of a fixed-dimension count vector which is then L2-normalized. Texts
// with no tokens raise EmptyTextError.
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dim = 64) : dim_(dim) {}
  Vec embed(std::string_view text, Language language) override;
  std::string tag() const override {
    return "test-hash-" + std::to_string(dim_);
  }
  std::size_t dim() const override { return dim_; }

  static std::size_t bucket_of(std::string_view token, std::size_t dim);

 private:
  std::size_t dim_;
};

// Reads a JSONL file of {"id": ..., "vector": [...]} where id is the first
// 16 hex chars of sha256(text). Lets embeddings be produced out-of-band by
// any multilingual sentence-embedding backend and joined here.
class PrecomputedEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedEmbeddingProvider(const std::filesystem::path& path);
  Vec embed(std::string_view text, Language language) override;
  std::string tag() const override { return tag_; }
  std::size_t dim() const override { return dim_; }

  static std::string id_of(std::string_view text);

 private:
  std::map<std::string, Vec> vectors_;
  std::string tag_;
  std::size_t dim_ = 0;
};

// One row per <correct answer, distractor> pair.
struct ScoreRow {
  std::string item_id;
  int distractor_index = 0;  // 1-based
  double bleu1 = 0, bleu2 = 0, bleu3 = 0, bleu4 = 0;
  double rouge_l = 0;
  double cs = 0;
  Language language = Language::En;
  std::string model_tag;
  Approach approach = Approach::MSP;
  Shot shot = Shot::Zero;

  double metric(std::size_t idx) const;
};

constexpr std::size_t kMetricCount = 6;
extern const std::array<const char*, kMetricCount> kMetricNames;
extern const std::array<const char*, kMetricCount> kMetricLabels;

// BLEU/ROUGE cells are reported x100; cosine similarity is reported raw.
double display_scale(std::size_t metric_idx);

json to_json(const ScoreRow& row);
ScoreRow score_row_from_json(const json& j);

struct ScoreStats {
  std::size_t items_scored = 0;
  std::size_t items_skipped = 0;
  std::vector<std::string> skipped_item_ids;
};

// Emits one row per distractor, in item order then distractor order.
// Items whose answer or any distractor tokenizes to empty are skipped and
// recorded in stats. The parallel entry point partitions rows across
// OpenMP threads; the serial one is the reference implementation kept for
// testing and produces bit-identical output.
std::vector<ScoreRow> score_items(std::span<const McqItem> items,
                                  EmbeddingProvider& embedder,
                                  ScoreStats* stats = nullptr);
std::vector<ScoreRow> score_items_serial(std::span<const McqItem> items,
                                         EmbeddingProvider& embedder,
                                         ScoreStats* stats = nullptr);

struct GroupAggregate {
  std::map<std::string, std::string> key;  // group-by field -> value
  std::size_t count = 0;
  std::array<double, kMetricCount> mean{};             // raw [0,1] means
  std::array<std::vector<double>, kMetricCount> values;  // retained rows
};

struct AggregateReport {
  std::vector<std::string> group_by;
  std::vector<GroupAggregate> groups;
};

// Arithmetic mean per metric per group. Valid group-by fields: language,
// model_tag, approach, shot. Empty groups are absent, never zero-filled.
AggregateReport aggregate(const std::vector<ScoreRow>& rows,
                          const std::vector<std::string>& group_by = {
                              "language", "model_tag", "approach", "shot"});

enum class TTestVariant { Student, Welch };

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1;  // two-tailed
  bool significant = false;  // p < 0.05
  bool degenerate = false;   // both variances zero, means equal
};

// Two-sample t-test; Student pools the variance (df = na+nb-2), Welch does
// not (Welch-Satterthwaite df). Requires at least two observations per
// sample. The two-tailed p-value comes from the regularized incomplete
// beta function I_x(df/2, 1/2) with x = df/(df + t^2).
TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b,
                   TTestVariant variant = TTestVariant::Student);

// Regularized incomplete beta I_x(a, b); exposed for the statistics tests.
double incomplete_beta(double a, double b, double x);

// Which groups a report compares against: the matching group within the
// same language (the grouping the tables use).
struct BaselineSelector {
  std::optional<Approach> approach = Approach::SSP;
  std::optional<std::string> model_tag;
  std::optional<Shot> shot;
};

struct RenderedReport {
  std::string table;  // aligned plain text
  json records;       // machine-readable rows
};

// Renders the aggregate grouped by language with one row per remaining
// key. Cells significantly above the language's baseline group (two-sample
// test at alpha = 0.05) are starred; the baseline row is tagged.
RenderedReport render_report(const AggregateReport& report,
                             const BaselineSelector& baseline,
                             TTestVariant variant = TTestVariant::Student);

}  // namespace mcqforge::metrics
