#include "mcqforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <unordered_map>

#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::metrics {
namespace {

constexpr char kGramSep = '\x1f';
constexpr double kAlpha = 0.05;

bool has_word_char(std::string_view token) {
  for (char32_t cp : uni::decode_utf8(token)) {
    if (uni::is_letter(cp) || uni::is_mark(cp) || uni::is_digit(cp)) return true;
  }
  return false;
}

std::unordered_map<std::string, int> count_ngrams(
    const std::vector<std::string>& tokens, int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k > 0) key.push_back(kGramSep);
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

double sample_mean(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs, double mean) {
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

std::string format_cell(double value, bool starred) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s = buf;
  if (starred) s.push_back('*');
  return s;
}

}  // namespace

const std::array<const char*, kMetricCount> kMetricNames = {
    "bleu1", "bleu2", "bleu3", "bleu4", "rouge_l", "cs"};
const std::array<const char*, kMetricCount> kMetricLabels = {
    "BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "ROUGE-L", "CS"};

double display_scale(std::size_t metric_idx) {
  return metric_idx < 5 ? 100.0 : 1.0;
}

double ScoreRow::metric(std::size_t idx) const {
  switch (idx) {
    case 0: return bleu1;
    case 1: return bleu2;
    case 2: return bleu3;
    case 3: return bleu4;
    case 4: return rouge_l;
    case 5: return cs;
    default: throw Error("metric index out of range");
  }
}

TokenSeq tokenize(std::string_view text, Language language) {
  TokenSeq seq;
  seq.language = language;
  std::string normalized = uni::nfc(text);
  for (std::string& word : uni::segment_words(normalized)) {
    if (!has_word_char(word)) continue;  // connector-only runs
    if (language == Language::En || language == Language::De) {
      word = uni::nfc(uni::casefold(word));
    }
    seq.tokens.push_back(std::move(word));
  }
  return seq;
}

double bleu_n(const TokenSeq& candidate, const TokenSeq& reference, int n) {
  if (n < 1 || n > 4) throw Error("bleu_n order must be in [1,4]");
  const auto c = static_cast<std::ptrdiff_t>(candidate.size());
  const auto r = static_cast<std::ptrdiff_t>(reference.size());
  if (c < n) return 0.0;

  double log_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    auto cand_counts = count_ngrams(candidate.tokens, i);
    auto ref_counts = count_ngrams(reference.tokens, i);
    std::int64_t matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) {
        matched += std::min(count, it->second);  // clipped
      }
    }
    std::int64_t total = c - i + 1;
    if (matched == 0 && i > 1) {  // add-1 smoothing for short texts
      matched += 1;
      total += 1;
    }
    if (matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
  }

  double bp = c >= r ? 1.0
                     : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / n);
}

double rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  const std::size_t m = candidate.size(), n = reference.size();
  if (m == 0 || n == 0) return 0.0;
  std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (candidate.tokens[i - 1] == reference.tokens[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  double lcs = static_cast<double>(prev[n]);
  if (lcs == 0) return 0.0;
  double precision = lcs / static_cast<double>(m);
  double recall = lcs / static_cast<double>(n);
  return 2.0 * precision * recall / (precision + recall);
}

double cosine(const Vec& v, const Vec& w) {
  if (v.size() != w.size()) {
    throw DimensionMismatchError("vector dimensions differ: " +
                                 std::to_string(v.size()) + " vs " +
                                 std::to_string(w.size()));
  }
  double dot = 0, nv = 0, nw = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dot += v[i] * w[i];
    nv += v[i] * v[i];
    nw += w[i] * w[i];
  }
  if (nv == 0 || nw == 0) throw ZeroVectorError("cosine of a zero vector");
  return dot / (std::sqrt(nv) * std::sqrt(nw));
}

std::size_t HashEmbeddingProvider::bucket_of(std::string_view token,
                                             std::size_t dim) {
  return static_cast<std::size_t>(fnv1a64(token) % dim);
}

Vec HashEmbeddingProvider::embed(std::string_view text, Language language) {
  TokenSeq seq = tokenize(text, language);
  if (seq.empty()) {
    throw EmptyTextError("no tokens to embed in: " + std::string(text));
  }
  Vec v(dim_, 0.0);
  for (const std::string& token : seq.tokens) {
    v[bucket_of(token, dim_)] += 1.0;
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::string PrecomputedEmbeddingProvider::id_of(std::string_view text) {
  return sha256_hex_prefix(text, 16);
}

PrecomputedEmbeddingProvider::PrecomputedEmbeddingProvider(
    const std::filesystem::path& path) {
  for_each_jsonl(path, [this](const json& j, std::size_t line) {
    if (!j.contains("id") || !j.contains("vector") || !j.at("vector").is_array()) {
      throw FormatError("embedding record needs id and vector", line);
    }
    Vec v = j.at("vector").get<Vec>();
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) {
      throw FormatError("embedding dimension changed mid-file", line);
    }
    vectors_[j.at("id").get<std::string>()] = std::move(v);
  });
  tag_ = "precomputed-" + std::to_string(dim_);
}

Vec PrecomputedEmbeddingProvider::embed(std::string_view text, Language) {
  auto it = vectors_.find(id_of(text));
  if (it == vectors_.end()) {
    throw Error("no precomputed embedding for id " + id_of(text));
  }
  return it->second;
}

json to_json(const ScoreRow& row) {
  return json{{"item_id", row.item_id},
              {"distractor_index", row.distractor_index},
              {"bleu1", row.bleu1},
              {"bleu2", row.bleu2},
              {"bleu3", row.bleu3},
              {"bleu4", row.bleu4},
              {"rouge_l", row.rouge_l},
              {"cs", row.cs},
              {"language", language_code(row.language)},
              {"model_tag", row.model_tag},
              {"approach", approach_code(row.approach)},
              {"shot", shot_code(row.shot)}};
}

ScoreRow score_row_from_json(const json& j) {
  ScoreRow row;
  row.item_id = j.at("item_id").get<std::string>();
  row.distractor_index = j.at("distractor_index").get<int>();
  row.bleu1 = j.at("bleu1").get<double>();
  row.bleu2 = j.at("bleu2").get<double>();
  row.bleu3 = j.at("bleu3").get<double>();
  row.bleu4 = j.at("bleu4").get<double>();
  row.rouge_l = j.at("rouge_l").get<double>();
  row.cs = j.at("cs").get<double>();
  row.language = parse_language(j.at("language").get<std::string>());
  row.model_tag = j.at("model_tag").get<std::string>();
  row.approach = parse_approach(j.at("approach").get<std::string>());
  row.shot = parse_shot(j.at("shot").get<std::string>());
  return row;
}

namespace {

// Scores one item or returns nothing when a side tokenizes to empty.
std::optional<std::vector<ScoreRow>> score_one(const McqItem& item,
                                               EmbeddingProvider& embedder) {
  TokenSeq answer = tokenize(item.question.correct_answer, item.language);
  if (answer.empty()) return std::nullopt;
  std::vector<TokenSeq> distractor_tokens;
  distractor_tokens.reserve(item.distractors.size());
  for (const std::string& d : item.distractors) {
    TokenSeq seq = tokenize(d, item.language);
    if (seq.empty()) return std::nullopt;
    distractor_tokens.push_back(std::move(seq));
  }

  Vec answer_vec = embedder.embed(item.question.correct_answer, item.language);
  std::vector<ScoreRow> rows;
  rows.reserve(item.distractors.size());
  for (std::size_t i = 0; i < item.distractors.size(); ++i) {
    ScoreRow row;
    row.item_id = item.id;
    row.distractor_index = static_cast<int>(i) + 1;
    row.bleu1 = bleu_n(distractor_tokens[i], answer, 1);
    row.bleu2 = bleu_n(distractor_tokens[i], answer, 2);
    row.bleu3 = bleu_n(distractor_tokens[i], answer, 3);
    row.bleu4 = bleu_n(distractor_tokens[i], answer, 4);
    row.rouge_l = rouge_l(distractor_tokens[i], answer);
    row.cs = cosine(embedder.embed(item.distractors[i], item.language), answer_vec);
    row.language = item.language;
    row.model_tag = item.model_tag;
    row.approach = item.approach;
    row.shot = item.question.shot;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScoreRow> collect_rows(
    std::span<const McqItem> items,
    std::vector<std::optional<std::vector<ScoreRow>>>& per_item,
    ScoreStats* stats) {
  std::vector<ScoreRow> rows;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!per_item[i]) {
      if (stats != nullptr) {
        ++stats->items_skipped;
        stats->skipped_item_ids.push_back(items[i].id);
      }
      continue;
    }
    if (stats != nullptr) ++stats->items_scored;
    for (ScoreRow& row : *per_item[i]) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ScoreRow> score_items_serial(std::span<const McqItem> items,
                                         EmbeddingProvider& embedder,
                                         ScoreStats* stats) {
  std::vector<std::optional<std::vector<ScoreRow>>> per_item(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    per_item[i] = score_one(items[i], embedder);
  }
  return collect_rows(items, per_item, stats);
}

std::vector<ScoreRow> score_items(std::span<const McqItem> items,
                                  EmbeddingProvider& embedder,
                                  ScoreStats* stats) {
  std::vector<std::optional<std::vector<ScoreRow>>> per_item(items.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      per_item[static_cast<std::size_t>(i)] =
          score_one(items[static_cast<std::size_t>(i)], embedder);
    } catch (...) {
#pragma omp critical(mcqforge_score_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return collect_rows(items, per_item, stats);
}

AggregateReport aggregate(const std::vector<ScoreRow>& rows,
                          const std::vector<std::string>& group_by) {
  if (rows.empty()) throw Error("aggregate needs at least one score row");
  for (const std::string& field : group_by) {
    if (field != "language" && field != "model_tag" && field != "approach" &&
        field != "shot") {
      throw Error("unknown group-by field: " + field);
    }
  }

  auto field_value = [](const ScoreRow& row, const std::string& field) {
    if (field == "language") return std::string(language_code(row.language));
    if (field == "model_tag") return row.model_tag;
    if (field == "approach") return std::string(approach_code(row.approach));
    return std::string(shot_code(row.shot));
  };

  std::map<std::vector<std::string>, GroupAggregate> groups;
  for (const ScoreRow& row : rows) {
    std::vector<std::string> key_values;
    key_values.reserve(group_by.size());
    for (const std::string& field : group_by) {
      key_values.push_back(field_value(row, field));
    }
    GroupAggregate& g = groups[key_values];
    if (g.count == 0) {
      for (std::size_t i = 0; i < group_by.size(); ++i) {
        g.key[group_by[i]] = key_values[i];
      }
    }
    ++g.count;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      g.values[m].push_back(row.metric(m));
    }
  }

  AggregateReport report;
  report.group_by = group_by;
  for (auto& [_, g] : groups) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      g.mean[m] = sample_mean(g.values[m]);
    }
    report.groups.push_back(std::move(g));
  }
  return report;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1) / (a + b + 2)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1 - front * beta_cf(b, a, 1 - x) / b;
}

TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b,
                   TTestVariant variant) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error("t-test needs at least two observations per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = sample_mean(a), mb = sample_mean(b);
  const double va = sample_variance(a, ma), vb = sample_variance(b, mb);

  TTestResult result;
  if (va == 0 && vb == 0) {
    if (ma == mb) {
      result.degenerate = true;  // t undefined; report the null outcome
      return result;
    }
    result.t = ma > mb ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    result.df = na + nb - 2;
    result.p = 0;
    result.significant = true;
    return result;
  }

  if (variant == TTestVariant::Student) {
    double pooled = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2);
    result.t = (ma - mb) / std::sqrt(pooled * (1 / na + 1 / nb));
    result.df = na + nb - 2;
  } else {
    double sa = va / na, sb = vb / nb;
    result.t = (ma - mb) / std::sqrt(sa + sb);
    result.df = (sa + sb) * (sa + sb) /
                (sa * sa / (na - 1) + sb * sb / (nb - 1));
  }
  result.p = incomplete_beta(result.df / 2, 0.5,
                             result.df / (result.df + result.t * result.t));
  result.significant = result.p < kAlpha;
  return result;
}

RenderedReport render_report(const AggregateReport& report,
                             const BaselineSelector& baseline,
                             TTestVariant variant) {
  auto key_of = [](const GroupAggregate& g, const std::string& field) {
    auto it = g.key.find(field);
    return it == g.key.end() ? std::string() : it->second;
  };
  auto matches_baseline = [&](const GroupAggregate& g) {
    if (baseline.approach &&
        key_of(g, "approach") != approach_code(*baseline.approach)) {
      return false;
    }
    if (baseline.model_tag && key_of(g, "model_tag") != *baseline.model_tag) {
      return false;
    }
    if (baseline.shot && key_of(g, "shot") != shot_code(*baseline.shot)) {
      return false;
    }
    return true;
  };

  // Section per language, in the canonical language order.
  std::vector<std::string> sections;
  for (int l = 0; l < kLanguageCount; ++l) {
    std::string code(language_code(static_cast<Language>(l)));
    for (const GroupAggregate& g : report.groups) {
      if (key_of(g, "language") == code) {
        sections.push_back(code);
        break;
      }
    }
  }
  if (sections.empty()) sections.push_back("");  // not grouped by language

  json records = json::array();
  std::ostringstream table;
  for (const std::string& section : sections) {
    std::vector<const GroupAggregate*> groups;
    for (const GroupAggregate& g : report.groups) {
      if (section.empty() || key_of(g, "language") == section) {
        groups.push_back(&g);
      }
    }
    std::sort(groups.begin(), groups.end(),
              [&](const GroupAggregate* x, const GroupAggregate* y) {
                auto rank = [&](const GroupAggregate* g) {
                  return std::make_tuple(key_of(*g, "model_tag"),
                                         key_of(*g, "approach"),
                                         key_of(*g, "shot") == "one");
                };
                return rank(x) < rank(y);
              });
    const GroupAggregate* base = nullptr;
    for (const GroupAggregate* g : groups) {
      if (matches_baseline(*g)) {
        base = g;
        break;
      }
    }

    if (!section.empty()) {
      table << "== " << language_name(parse_language(section)) << " ==\n";
    }
    if (base == nullptr) {
      table << "(no baseline group matched; significance not marked)\n";
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Model (Approach)", "Setting"};
    for (const char* label : kMetricLabels) header.emplace_back(label);
    header.emplace_back("n");
    cells.push_back(header);

    for (const GroupAggregate* g : groups) {
      std::string model = key_of(*g, "model_tag");
      std::string approach = key_of(*g, "approach");
      std::string shot = key_of(*g, "shot");
      std::string label = model.empty() ? "all" : model;
      if (!approach.empty()) {
        std::string upper = approach;
        std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
        label += " (" + upper + ")";
      }
      if (g == base) label += " [baseline]";
      std::vector<std::string> row{
          label, shot.empty() ? "-" : (shot == "zero" ? "0-shot" : "1-shot")};

      json rec{{"language", section.empty() ? "all" : section},
               {"model_tag", model},
               {"approach", approach},
               {"shot", shot},
               {"n", g->count},
               {"baseline", g == base}};
      json metric_rec = json::object();
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        bool starred = false;
        if (base != nullptr && g != base && g->count >= 2 && base->count >= 2) {
          TTestResult tt = t_test(g->values[m], base->values[m], variant);
          starred = tt.significant && g->mean[m] > base->mean[m];
        }
        double display = g->mean[m] * display_scale(m);
        row.push_back(format_cell(display, starred));
        metric_rec[kMetricNames[m]] =
            json{{"mean", g->mean[m]}, {"display", display}, {"significant", starred}};
      }
      rec["metrics"] = metric_rec;
      records.push_back(std::move(rec));
      row.push_back(std::to_string(g->count));
      cells.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        widths[i] = std::max(widths[i], row[i].size());
      }
    }
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        table << row[i];
        if (i + 1 < row.size()) {
          table << std::string(widths[i] - row[i].size() + 2, ' ');
        }
      }
      table << '\n';
    }
    table << '\n';
  }

  RenderedReport out;
  out.table = table.str();
  out.records = std::move(records);
  return out;
}

}  // namespace mcqforge::metrics
