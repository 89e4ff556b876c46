#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"
#include "mcqforge/llm.hpp"
#include "mcqforge/prompts.hpp"

// Orchestrates the two generation flows per context: the four-stage chain
// (paraphrase -> keywords -> question -> distractors) and the single-stage
// baseline, plus corpus-scale runs with manifests and failure logs.
namespace mcqforge::pipeline {

struct StageFailureError : Error {
  StageFailureError(Stage stage_arg, const std::string& msg)
      : Error(msg), stage(stage_arg) {}
  Stage stage;
};

struct EmptyKeywordsError : Error {
  using Error::Error;
};

struct InsufficientDistractorsError : Error {
  InsufficientDistractorsError(int found_arg, int wanted_arg)
      : Error("found " + std::to_string(found_arg) + " of " +
              std::to_string(wanted_arg) + " required distractors"),
        found(found_arg),
        wanted(wanted_arg) {}
  int found = 0;
  int wanted = 0;
};

struct ParseFailureError : Error {
  using Error::Error;
};

struct KeywordPolicy {
  enum class Kind { FirstK, All };
  Kind kind = Kind::FirstK;
  int k = 1;
};

// "first:<k>" or "all".
KeywordPolicy parse_keyword_policy(const std::string& text);
std::string keyword_policy_code(const KeywordPolicy& policy);

struct PipelineConfig {
  Approach approach = Approach::MSP;
  Shot shot = Shot::Zero;
  int paraphrases_per_context = 3;   // completions issued per context
  int questions_per_paraphrase = 1;  // keywords turned into questions
  int distractors_per_question = 3;
  KeywordPolicy keyword_policy;
  Language language = Language::En;
  std::string model_tag = "mock";
  GenerationParams params;
  std::map<Language, prompts::ExemplarSet> exemplars;  // required for one-shot
  std::uint64_t seed = 0;
  int workers = 4;
  double failure_tolerance = 0.05;  // context-failure fraction the CLI accepts
};

// Throws Error when a field combination is unusable (one-shot without
// exemplars, single-stage one-shot, non-positive counts).
void validate_config(const PipelineConfig& config);

json config_to_json(const PipelineConfig& config);

// ---- Completion parsers (pure; fully covered by the adversarial corpus) --

// Splits on commas, semicolons, and newlines; strips leading enumerators,
// whitespace and surrounding quotes; drops empties; preserves first-
// occurrence order; dedups on the canonical key. Throws EmptyKeywordsError
// when nothing survives.
std::vector<std::string> parse_keywords(const std::string& raw);

// Same segmentation as parse_keywords, plus punctuation-only candidates
// and trailing punctuation are stripped. Returns the first `wanted`
// distinct candidates differing from the correct answer; throws
// InsufficientDistractorsError otherwise.
std::vector<std::string> parse_distractors(const std::string& raw, int wanted,
                                           const std::string& correct_answer);

// First line ending in '?' (any leading "Q:"/"Question:" label stripped),
// else the whole trimmed completion.
std::string extract_question(const std::string& completion);

struct SspBlock {
  std::string question;
  std::string answer;
  std::vector<std::string> distractor_candidates;  // non-answer options, in order
};

// Parses a single-stage completion into question blocks: a question line,
// enumerated option lines, and an answer line ("Answer:"/"Correct
// answer:", or an option marked with an asterisk). Throws
// ParseFailureError when no block has both a question and a resolvable
// answer.
std::vector<SspBlock> parse_ssp_completion(const std::string& raw);

// ---- Orchestration ------------------------------------------------------

struct StageFailure {
  std::string context_id;
  std::string stage;  // "pg", "ke", "qg", "dg", "ssp", or "context"
  std::string reason;
  std::string detail;  // e.g. the raw completion for parse failures
};

struct RunManifest {
  std::string run_id;
  json config_snapshot;
  std::string dataset_tag;
  std::string input_digest;
  std::uint64_t sample_seed = 0;
  std::string template_digest;
  std::string exemplar_digest;
  std::int64_t started_ms = 0;   // wall-clock fields live only here
  std::int64_t finished_ms = 0;
  std::int64_t contexts_total = 0;
  std::int64_t contexts_failed = 0;
  std::int64_t paraphrase_branches = 0;
  std::int64_t questions = 0;
  std::int64_t items = 0;
  std::int64_t distractors = 0;
  std::int64_t provider_calls = 0;
  std::int64_t cache_hits = 0;
  std::vector<StageFailure> failures;
};

json manifest_to_json(const RunManifest& manifest);

struct RunMeta {
  std::string dataset_tag;
  std::string input_digest;
  std::uint64_t sample_seed = 0;
};

class Runner {
 public:
  Runner(llm::Client& client, prompts::TemplateRegistry registry,
         PipelineConfig config);

  // Issues the paraphrase prompt M separate times (one completion each);
  // empty or duplicate completions are dropped and logged. Throws
  // StageFailureError when none survive. Each surviving paraphrase carries
  // the round-trip record that produced it.
  struct ParaphraseBranch {
    Paraphrase paraphrase;
    StageRecord record;
  };
  std::vector<ParaphraseBranch> generate_paraphrases(
      const Context& context, std::vector<StageFailure>& failures);

  KeywordSet extract_keywords(const Context& context,
                              const Paraphrase& paraphrase,
                              StageRecord& record);

  GeneratedQuestion generate_question(const Context& context,
                                      const Paraphrase& paraphrase,
                                      const std::string& keyword,
                                      StageRecord& record);

  struct ContextOutcome {
    std::vector<McqItem> items;
    std::vector<StageFailure> failures;
    std::int64_t paraphrase_branches = 0;  // paraphrases that survived
    std::int64_t questions = 0;            // question completions accepted
  };

  ContextOutcome run_msp(const Context& context);
  ContextOutcome run_ssp(const Context& context);
  ContextOutcome run_context(const Context& context);

  // Processes contexts with a bounded worker pool; items are written in
  // context order so replays against a warm cache are byte-identical.
  // Aborts only on budget exhaustion or credential failure, leaving the
  // completed prefix of outputs on disk.
  RunManifest run_corpus(const std::vector<Context>& contexts,
                         const RunMeta& meta,
                         const std::filesystem::path& items_path,
                         const std::filesystem::path& failures_path);

  const PipelineConfig& config() const { return config_; }
  const prompts::TemplateRegistry& registry() const { return registry_; }

 private:
  llm::CompletionRequest make_request(const Context& context,
                                      std::string prompt,
                                      std::string_view salt) const;
  StageRecord to_record(Stage stage, const std::string& prompt,
                        const llm::CompletionResponse& response) const;

  llm::Client& client_;
  prompts::TemplateRegistry registry_;
  PipelineConfig config_;
};

}  // namespace mcqforge::pipeline
