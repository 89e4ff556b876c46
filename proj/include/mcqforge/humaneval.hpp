#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"

// Human-evaluation workflow: export blind rating batches, run a terminal
// rating session with resume, import external rating files, and aggregate
// per-(language, model, shot) means of the three criteria.
namespace mcqforge::humaneval {

struct OrphanRatingError : Error {
  using Error::Error;
};

// What a rater sees. Blind batches omit provenance (approach/model/shot);
// the key file retains it, keyed by item id.
struct RatingItem {
  std::string item_id;
  std::string question;
  std::string correct_answer;
  std::vector<std::string> distractors;
  Language language = Language::En;
};

struct ItemKey {
  Language language = Language::En;
  std::string model_tag;
  Approach approach = Approach::MSP;
  Shot shot = Shot::Zero;
};

struct RatingRecord {
  std::string item_id;
  std::string rater_id;
  int grammaticality = 0;  // 1..5
  int answerability = 0;   // 1..5
  int difficulty = 0;      // 1..5
  std::int64_t timestamp_ms = 0;
};

json to_json(const RatingRecord& r);
RatingRecord rating_record_from_json(const json& j);

// Wording shown to raters; its digest is stamped into every batch header.
extern const char* kDefaultInstructions;

struct ExportResult {
  std::size_t exported = 0;
  bool saturated = false;  // requested more than the pool held
};

// Seeded sample of n items stratified equally across the shot settings
// present in the pool. Writes the rater-facing batch (header record first)
// and the provenance key file.
ExportResult export_batch(const std::vector<McqItem>& items, std::size_t n,
                          std::uint64_t seed, bool blind,
                          const std::filesystem::path& batch_path,
                          const std::filesystem::path& key_path);

std::vector<RatingItem> load_batch(const std::filesystem::path& batch_path);
std::map<std::string, ItemKey> load_key_file(const std::filesystem::path& key_path);

// Interactive session over the given streams: three integers 1..5 per
// item ("g a d"), out-of-range input re-prompts, "q" aborts, already-rated
// items are skipped on resume, records append incrementally.
std::size_t rate_interactive(const std::filesystem::path& batch_path,
                             const std::filesystem::path& records_path,
                             const std::string& rater_id, std::istream& in,
                             std::ostream& out);

// Accepts the JSONL record stream or a 5-column delimited text file
// (item id, rater id, grammaticality, answerability, difficulty).
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);

struct RatingAggregateRow {
  Language language = Language::En;
  std::string model_tag;
  Shot shot = Shot::Zero;
  std::size_t items = 0;
  double grammaticality = 0;
  double answerability = 0;
  double difficulty = 0;
};

struct RatingReport {
  std::vector<RatingAggregateRow> rows;
  std::vector<std::string> orphan_ids;  // unresolvable ratings, excluded
};

// Per-criterion means over raters first, then items, grouped by
// (language, model, shot). Duplicate (item, rater) pairs keep the latest
// timestamp. Ratings whose id is missing from the key map are listed as
// orphans and excluded.
RatingReport aggregate_ratings(const std::vector<RatingRecord>& records,
                               const std::map<std::string, ItemKey>& keys);

std::string render_rating_report(const RatingReport& report);
json rating_report_records(const RatingReport& report);

}  // namespace mcqforge::humaneval
