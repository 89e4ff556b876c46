#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mcqforge {

// Ordered JSON keeps field order stable so that rewritten record files are
// byte-identical across runs.
using json = nlohmann::ordered_json;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownLanguageError : Error {
  using Error::Error;
};

enum class Language { En, De, Hi, Bn };

constexpr int kLanguageCount = 4;

std::string_view language_code(Language lang);   // "en"
std::string_view language_name(Language lang);   // "English"

// Accepts case-insensitive codes and display names ("en", "English", ...).
// Throws UnknownLanguageError for anything outside the four-language set.
Language parse_language(std::string_view code);

enum class Stage { PG, KE, QG, DG, SSP };
enum class Shot { Zero, One };
enum class Approach { MSP, SSP };

std::string_view stage_code(Stage s);
std::string_view shot_code(Shot s);
std::string_view approach_code(Approach a);
Stage parse_stage(std::string_view s);
Shot parse_shot(std::string_view s);
Approach parse_approach(std::string_view s);

// Source passage the pipeline consumes. `text` is non-empty after Unicode
// whitespace trimming; id is a stable digest assigned by the loader.
struct Context {
  std::string id;
  std::string text;
  Language language = Language::En;
  std::string source_dataset;

  bool operator==(const Context&) const = default;
};

struct Paraphrase {
  std::string context_id;
  int index = 0;  // 1-based, unique per context
  std::string text;

  bool operator==(const Paraphrase&) const = default;
};

// A keyword is kept even when it does not occur in the paraphrase; the
// `ungrounded` flag records that instead of discarding it.
struct Keyword {
  std::string text;
  bool ungrounded = false;

  bool operator==(const Keyword&) const = default;
};

struct KeywordSet {
  std::string context_id;
  int paraphrase_index = 0;
  std::vector<Keyword> keywords;

  bool operator==(const KeywordSet&) const = default;
};

struct GeneratedQuestion {
  std::string id;
  std::string context_id;
  int paraphrase_index = 0;  // 0 for single-stage items
  std::string correct_answer;
  std::string text;
  Shot shot = Shot::Zero;

  bool operator==(const GeneratedQuestion&) const = default;
};

// One prompt round-trip. Timestamps and latencies come from the provider
// (or from the cache record on replay) so that replayed runs serialize
// byte-identically.
struct StageRecord {
  Stage stage = Stage::PG;
  std::string prompt;
  std::string completion;
  std::int64_t timestamp_ms = 0;
  std::int64_t latency_ms = 0;

  bool operator==(const StageRecord&) const = default;
};

struct McqItem {
  std::string id;
  GeneratedQuestion question;
  std::vector<std::string> distractors;
  Approach approach = Approach::MSP;
  std::string model_tag;
  Language language = Language::En;
  std::vector<StageRecord> trace;

  bool operator==(const McqItem&) const = default;
};

// Decoding parameters. Defaults mirror the davinci-class profile; the
// gpt-4-class profile zeroes the penalties.
struct GenerationParams {
  int max_tokens = 50;
  double temperature = 0.7;
  double presence_penalty = 1.0;
  double frequency_penalty = 0.0;

  bool operator==(const GenerationParams&) const = default;
};

GenerationParams davinci_params();
GenerationParams gpt4_params();

enum class Violation {
  WrongDistractorCount,
  DuplicateDistractor,
  DistractorEqualsAnswer,
  EmptyQuestionText,
  EmptyCorrectAnswer,
  EmptyDistractor,
  TraceArityMismatch,
};

std::string_view violation_name(Violation v);

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Pure invariant check; violations are data, not errors. Distractor
// equality uses the canonical NFC + casefold key.
ValidationReport validate_mcq(const McqItem& item, int expected_distractors = 3);

json to_json(const Context& c);
Context context_from_json(const json& j);
json to_json(const StageRecord& r);
StageRecord stage_record_from_json(const json& j);
json to_json(const McqItem& item);
McqItem mcq_item_from_json(const json& j);

}  // namespace mcqforge
