#include "mcqforge/humaneval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::humaneval {
namespace {

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Same deterministic selection as the context sampler.
std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<std::size_t> index(pool);
  for (std::size_t i = 0; i < pool; ++i) index[i] = i;
  std::mt19937_64 rng(seed);
  std::size_t take = std::min(n, pool);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (pool - i));
    std::swap(index[i], index[j]);
  }
  index.resize(take);
  return index;
}

bool parse_scores(const std::string& line, int out[3]) {
  std::istringstream ss(line);
  for (int i = 0; i < 3; ++i) {
    if (!(ss >> out[i])) return false;
    if (out[i] < 1 || out[i] > 5) return false;
  }
  std::string extra;
  if (ss >> extra) return false;
  return true;
}

}  // namespace

const char* kDefaultInstructions =
    "Rate each question from 1 (worst) to 5 (best) on three criteria: "
    "grammaticality (is the question well-formed in the target language?), "
    "answerability (can it be answered from general knowledge of the "
    "passage topic, with the given answer correct?), and difficulty (do the "
    "distractors make the right answer non-obvious?). Enter the three "
    "scores separated by spaces, e.g. '4 5 3'.";

json to_json(const RatingRecord& r) {
  return json{{"item_id", r.item_id},
              {"rater_id", r.rater_id},
              {"grammaticality", r.grammaticality},
              {"answerability", r.answerability},
              {"difficulty", r.difficulty},
              {"timestamp_ms", r.timestamp_ms}};
}

RatingRecord rating_record_from_json(const json& j) {
  RatingRecord r;
  r.item_id = j.at("item_id").get<std::string>();
  r.rater_id = j.at("rater_id").get<std::string>();
  r.grammaticality = j.at("grammaticality").get<int>();
  r.answerability = j.at("answerability").get<int>();
  r.difficulty = j.at("difficulty").get<int>();
  r.timestamp_ms = j.value("timestamp_ms", static_cast<std::int64_t>(0));
  for (int score : {r.grammaticality, r.answerability, r.difficulty}) {
    if (score < 1 || score > 5) {
      throw Error("rating out of range [1,5] for item " + r.item_id);
    }
  }
  return r;
}

ExportResult export_batch(const std::vector<McqItem>& items, std::size_t n,
                          std::uint64_t seed, bool blind,
                          const std::filesystem::path& batch_path,
                          const std::filesystem::path& key_path) {
  if (items.empty()) throw Error("no items to export");

  // Strata: the shot settings present, zero-shot first.
  std::map<bool, std::vector<std::size_t>> strata;  // key: shot == one
  for (std::size_t i = 0; i < items.size(); ++i) {
    strata[items[i].question.shot == Shot::One].push_back(i);
  }
  std::size_t stratum_count = strata.size();
  std::size_t base_quota = n / stratum_count;
  std::size_t remainder = n % stratum_count;

  std::vector<std::size_t> chosen;
  bool saturated = false;
  std::size_t stratum_idx = 0;
  for (const auto& [is_one, pool] : strata) {
    std::size_t quota = base_quota + (stratum_idx < remainder ? 1 : 0);
    ++stratum_idx;
    if (quota > pool.size()) saturated = true;
    std::uint64_t stratum_seed = fnv1a64(std::to_string(seed) + (is_one ? ":one" : ":zero"));
    for (std::size_t local : sample_indices(pool.size(), quota, stratum_seed)) {
      chosen.push_back(pool[local]);
    }
  }

  JsonlWriter batch(batch_path);
  JsonlWriter keys(key_path);
  batch.write(json{{"type", "meta"},
                   {"requested_n", n},
                   {"exported", chosen.size()},
                   {"seed", seed},
                   {"blind", blind},
                   {"instructions", kDefaultInstructions},
                   {"instructions_digest",
                    sha256_hex_prefix(kDefaultInstructions, 16)}});
  for (std::size_t idx : chosen) {
    const McqItem& item = items[idx];
    json record{{"type", "item"},
                {"item_id", item.id},
                {"question", item.question.text},
                {"correct_answer", item.question.correct_answer},
                {"distractors", item.distractors},
                {"language", language_code(item.language)}};
    if (!blind) {
      record["model_tag"] = item.model_tag;
      record["approach"] = approach_code(item.approach);
      record["shot"] = shot_code(item.question.shot);
    }
    batch.write(record);
    keys.write(json{{"item_id", item.id},
                    {"language", language_code(item.language)},
                    {"model_tag", item.model_tag},
                    {"approach", approach_code(item.approach)},
                    {"shot", shot_code(item.question.shot)}});
  }
  batch.flush();
  keys.flush();
  return ExportResult{chosen.size(), saturated};
}

std::vector<RatingItem> load_batch(const std::filesystem::path& batch_path) {
  std::vector<RatingItem> items;
  for_each_jsonl(batch_path, [&items](const json& j, std::size_t) {
    if (j.value("type", "") != "item") return;
    RatingItem item;
    item.item_id = j.at("item_id").get<std::string>();
    item.question = j.at("question").get<std::string>();
    item.correct_answer = j.at("correct_answer").get<std::string>();
    item.distractors = j.at("distractors").get<std::vector<std::string>>();
    item.language = parse_language(j.at("language").get<std::string>());
    items.push_back(std::move(item));
  });
  return items;
}

std::map<std::string, ItemKey> load_key_file(const std::filesystem::path& key_path) {
  std::map<std::string, ItemKey> keys;
  for_each_jsonl(key_path, [&keys](const json& j, std::size_t) {
    ItemKey key;
    key.language = parse_language(j.at("language").get<std::string>());
    key.model_tag = j.at("model_tag").get<std::string>();
    key.approach = parse_approach(j.at("approach").get<std::string>());
    key.shot = parse_shot(j.at("shot").get<std::string>());
    keys[j.at("item_id").get<std::string>()] = key;
  });
  return keys;
}

std::size_t rate_interactive(const std::filesystem::path& batch_path,
                             const std::filesystem::path& records_path,
                             const std::string& rater_id, std::istream& in,
                             std::ostream& out) {
  std::vector<RatingItem> items = load_batch(batch_path);
  std::unordered_set<std::string> already;
  if (std::filesystem::exists(records_path)) {
    for (const RatingRecord& r : load_ratings(records_path)) {
      if (r.rater_id == rater_id) already.insert(r.item_id);
    }
  }

  JsonlWriter writer(records_path, /*append=*/true);
  out << kDefaultInstructions << "\n";
  out << "Scores: grammaticality answerability difficulty (1-5 each); 'q' to stop.\n\n";

  std::size_t rated = 0;
  std::size_t position = 0;
  for (const RatingItem& item : items) {
    ++position;
    if (already.count(item.item_id)) continue;
    out << "[" << position << "/" << items.size() << "] " << item.question << "\n";
    out << "  answer: " << item.correct_answer << "\n";
    char option_label = 'a';
    for (const std::string& d : item.distractors) {
      out << "  " << option_label++ << ") " << d << "\n";
    }
    while (true) {
      out << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) return rated;  // EOF keeps partial progress
      std::string trimmed = uni::trim(line);
      if (trimmed == "q" || trimmed == "quit") return rated;
      int scores[3];
      if (!parse_scores(trimmed, scores)) {
        out << "enter three integers in 1..5, e.g. '4 5 3'\n";
        continue;
      }
      RatingRecord record;
      record.item_id = item.item_id;
      record.rater_id = rater_id;
      record.grammaticality = scores[0];
      record.answerability = scores[1];
      record.difficulty = scores[2];
      record.timestamp_ms = now_unix_ms();
      writer.write(to_json(record));
      writer.flush();
      ++rated;
      break;
    }
  }
  out << "done: " << rated << " newly rated\n";
  return rated;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  // Peek at the first non-empty byte to pick the format.
  std::string text = read_text_file(path);
  std::size_t first = text.find_first_not_of(" \t\r\n");
  bool looks_json = first != std::string::npos && text[first] == '{';

  std::vector<RatingRecord> records;
  if (looks_json) {
    for_each_jsonl(path, [&records](const json& j, std::size_t) {
      records.push_back(rating_record_from_json(j));
    });
    return records;
  }

  // 5-column delimited text: item id, rater id, g, a, d.
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (uni::trim(line).empty()) continue;
    for (char& c : line) {
      if (c == '\t' || c == ',') c = ' ';
    }
    std::istringstream fields(line);
    RatingRecord r;
    if (!(fields >> r.item_id >> r.rater_id >> r.grammaticality >>
          r.answerability >> r.difficulty)) {
      throw FormatError("expected: item_id rater_id g a d", lineno);
    }
    for (int score : {r.grammaticality, r.answerability, r.difficulty}) {
      if (score < 1 || score > 5) {
        throw FormatError("score out of range [1,5]", lineno);
      }
    }
    r.timestamp_ms = static_cast<std::int64_t>(lineno);  // import order
    records.push_back(std::move(r));
  }
  return records;
}

RatingReport aggregate_ratings(const std::vector<RatingRecord>& records,
                               const std::map<std::string, ItemKey>& keys) {
  // Deduplicate (item, rater): latest timestamp wins, later input breaks ties.
  std::map<std::pair<std::string, std::string>, RatingRecord> latest;
  for (const RatingRecord& r : records) {
    auto key = std::make_pair(r.item_id, r.rater_id);
    auto it = latest.find(key);
    if (it == latest.end() || r.timestamp_ms >= it->second.timestamp_ms) {
      latest[key] = r;
    }
  }

  RatingReport report;
  std::set<std::string> orphans;
  // item -> per-criterion sums over raters.
  struct ItemScores {
    double sums[3] = {0, 0, 0};
    std::size_t raters = 0;
  };
  std::map<std::string, ItemScores> per_item;
  for (const auto& [key, r] : latest) {
    if (!keys.count(r.item_id)) {
      orphans.insert(r.item_id);
      continue;
    }
    ItemScores& scores = per_item[r.item_id];
    scores.sums[0] += r.grammaticality;
    scores.sums[1] += r.answerability;
    scores.sums[2] += r.difficulty;
    ++scores.raters;
  }

  struct GroupSums {
    double sums[3] = {0, 0, 0};
    std::size_t items = 0;
  };
  std::map<std::tuple<int, std::string, int>, GroupSums> groups;
  for (const auto& [item_id, scores] : per_item) {
    const ItemKey& key = keys.at(item_id);
    auto group_key = std::make_tuple(static_cast<int>(key.language),
                                     key.model_tag, static_cast<int>(key.shot));
    GroupSums& g = groups[group_key];
    for (int c = 0; c < 3; ++c) {
      g.sums[c] += scores.sums[c] / static_cast<double>(scores.raters);
    }
    ++g.items;
  }

  for (const auto& [group_key, g] : groups) {
    RatingAggregateRow row;
    row.language = static_cast<Language>(std::get<0>(group_key));
    row.model_tag = std::get<1>(group_key);
    row.shot = static_cast<Shot>(std::get<2>(group_key));
    row.items = g.items;
    row.grammaticality = g.sums[0] / static_cast<double>(g.items);
    row.answerability = g.sums[1] / static_cast<double>(g.items);
    row.difficulty = g.sums[2] / static_cast<double>(g.items);
    report.rows.push_back(std::move(row));
  }
  report.orphan_ids.assign(orphans.begin(), orphans.end());
  return report;
}

std::string render_rating_report(const RatingReport& report) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Language (Model)", "Setting", "Grammaticality",
                   "Answerability", "Difficulty", "n"});
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  for (const RatingAggregateRow& row : report.rows) {
    cells.push_back({std::string(language_name(row.language)) + " (" +
                         row.model_tag + ")",
                     row.shot == Shot::Zero ? "0-shot" : "1-shot",
                     fmt(row.grammaticality), fmt(row.answerability),
                     fmt(row.difficulty), std::to_string(row.items)});
  }

  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i];
      if (i + 1 < row.size()) out << std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << '\n';
  }
  if (!report.orphan_ids.empty()) {
    out << "\nexcluded orphan ratings (no key-file entry):\n";
    for (const std::string& id : report.orphan_ids) out << "  " << id << '\n';
  }
  return out.str();
}

json rating_report_records(const RatingReport& report) {
  json rows = json::array();
  for (const RatingAggregateRow& row : report.rows) {
    rows.push_back(json{{"language", language_code(row.language)},
                        {"model_tag", row.model_tag},
                        {"shot", shot_code(row.shot)},
                        {"items", row.items},
                        {"grammaticality", row.grammaticality},
                        {"answerability", row.answerability},
                        {"difficulty", row.difficulty}});
  }
  return json{{"rows", rows}, {"orphans", report.orphan_ids}};
}

}  // namespace mcqforge::humaneval
