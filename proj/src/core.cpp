#include "mcqforge/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "mcqforge/unicode.hpp"

namespace mcqforge {

std::string_view language_code(Language lang) {
  switch (lang) {
    case Language::En: return "en";
    case Language::De: return "de";
    case Language::Hi: return "hi";
    case Language::Bn: return "bn";
  }
  return "en";
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::En: return "English";
    case Language::De: return "German";
    case Language::Hi: return "Hindi";
    case Language::Bn: return "Bengali";
  }
  return "English";
}

Language parse_language(std::string_view code) {
  std::string lower;
  lower.reserve(code.size());
  for (char c : code) {
    lower.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  if (lower == "en" || lower == "english") return Language::En;
  if (lower == "de" || lower == "german") return Language::De;
  if (lower == "hi" || lower == "hindi") return Language::Hi;
  if (lower == "bn" || lower == "bengali") return Language::Bn;
  throw UnknownLanguageError("unknown language: " + std::string(code));
}

std::string_view stage_code(Stage s) {
  switch (s) {
    case Stage::PG: return "pg";
    case Stage::KE: return "ke";
    case Stage::QG: return "qg";
    case Stage::DG: return "dg";
    case Stage::SSP: return "ssp";
  }
  return "pg";
}

std::string_view shot_code(Shot s) {
  return s == Shot::Zero ? "zero" : "one";
}

std::string_view approach_code(Approach a) {
  return a == Approach::MSP ? "msp" : "ssp";
}

Stage parse_stage(std::string_view s) {
  if (s == "pg") return Stage::PG;
  if (s == "ke") return Stage::KE;
  if (s == "qg") return Stage::QG;
  if (s == "dg") return Stage::DG;
  if (s == "ssp") return Stage::SSP;
  throw Error("unknown stage: " + std::string(s));
}

Shot parse_shot(std::string_view s) {
  if (s == "zero" || s == "0") return Shot::Zero;
  if (s == "one" || s == "1") return Shot::One;
  throw Error("unknown shot setting: " + std::string(s));
}

Approach parse_approach(std::string_view s) {
  if (s == "msp") return Approach::MSP;
  if (s == "ssp") return Approach::SSP;
  throw Error("unknown approach: " + std::string(s));
}

GenerationParams davinci_params() { return GenerationParams{}; }

GenerationParams gpt4_params() {
  GenerationParams p;
  p.presence_penalty = 0.0;
  p.frequency_penalty = 0.0;
  return p;
}

std::string_view violation_name(Violation v) {
  switch (v) {
    case Violation::WrongDistractorCount: return "WrongDistractorCount";
    case Violation::DuplicateDistractor: return "DuplicateDistractor";
    case Violation::DistractorEqualsAnswer: return "DistractorEqualsAnswer";
    case Violation::EmptyQuestionText: return "EmptyQuestionText";
    case Violation::EmptyCorrectAnswer: return "EmptyCorrectAnswer";
    case Violation::EmptyDistractor: return "EmptyDistractor";
    case Violation::TraceArityMismatch: return "TraceArityMismatch";
  }
  return "?";
}

ValidationReport validate_mcq(const McqItem& item, int expected_distractors) {
  ValidationReport report;
  auto add = [&report](Violation v) { report.violations.push_back(v); };

  if (uni::trim(item.question.text).empty()) add(Violation::EmptyQuestionText);
  if (uni::trim(item.question.correct_answer).empty()) {
    add(Violation::EmptyCorrectAnswer);
  }
  if (static_cast<int>(item.distractors.size()) != expected_distractors) {
    add(Violation::WrongDistractorCount);
  }

  const std::string answer_key = uni::fold_key(item.question.correct_answer);
  std::unordered_set<std::string> seen;
  bool reported_dup = false, reported_eq = false, reported_empty = false;
  for (const std::string& d : item.distractors) {
    if (uni::trim(d).empty()) {
      if (!reported_empty) add(Violation::EmptyDistractor);
      reported_empty = true;
      continue;
    }
    std::string key = uni::fold_key(d);
    if (key == answer_key && !reported_eq) {
      add(Violation::DistractorEqualsAnswer);
      reported_eq = true;
    }
    if (!seen.insert(key).second && !reported_dup) {
      add(Violation::DuplicateDistractor);
      reported_dup = true;
    }
  }

  if (item.approach == Approach::MSP) {
    static constexpr Stage kMspOrder[4] = {Stage::PG, Stage::KE, Stage::QG,
                                           Stage::DG};
    bool arity_ok = item.trace.size() == 4;
    for (std::size_t i = 0; arity_ok && i < 4; ++i) {
      arity_ok = item.trace[i].stage == kMspOrder[i];
    }
    if (!arity_ok) add(Violation::TraceArityMismatch);
  } else if (item.trace.size() != 1 || item.trace[0].stage != Stage::SSP) {
    add(Violation::TraceArityMismatch);
  }
  return report;
}

json to_json(const Context& c) {
  return json{{"id", c.id},
              {"text", c.text},
              {"language", language_code(c.language)},
              {"source_dataset", c.source_dataset}};
}

Context context_from_json(const json& j) {
  Context c;
  c.id = j.at("id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.language = parse_language(j.at("language").get<std::string>());
  c.source_dataset = j.at("source_dataset").get<std::string>();
  return c;
}

json to_json(const StageRecord& r) {
  return json{{"stage", stage_code(r.stage)},
              {"prompt", r.prompt},
              {"completion", r.completion},
              {"timestamp_ms", r.timestamp_ms},
              {"latency_ms", r.latency_ms}};
}

StageRecord stage_record_from_json(const json& j) {
  StageRecord r;
  r.stage = parse_stage(j.at("stage").get<std::string>());
  r.prompt = j.at("prompt").get<std::string>();
  r.completion = j.at("completion").get<std::string>();
  r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
  r.latency_ms = j.at("latency_ms").get<std::int64_t>();
  return r;
}

json to_json(const McqItem& item) {
  json trace = json::array();
  for (const StageRecord& r : item.trace) trace.push_back(to_json(r));
  return json{{"id", item.id},
              {"question",
               json{{"id", item.question.id},
                    {"context_id", item.question.context_id},
                    {"paraphrase_index", item.question.paraphrase_index},
                    {"correct_answer", item.question.correct_answer},
                    {"text", item.question.text},
                    {"shot", shot_code(item.question.shot)}}},
              {"distractors", item.distractors},
              {"approach", approach_code(item.approach)},
              {"model_tag", item.model_tag},
              {"language", language_code(item.language)},
              {"trace", trace}};
}

McqItem mcq_item_from_json(const json& j) {
  McqItem item;
  item.id = j.at("id").get<std::string>();
  const json& q = j.at("question");
  item.question.id = q.at("id").get<std::string>();
  item.question.context_id = q.at("context_id").get<std::string>();
  item.question.paraphrase_index = q.at("paraphrase_index").get<int>();
  item.question.correct_answer = q.at("correct_answer").get<std::string>();
  item.question.text = q.at("text").get<std::string>();
  item.question.shot = parse_shot(q.at("shot").get<std::string>());
  item.distractors = j.at("distractors").get<std::vector<std::string>>();
  item.approach = parse_approach(j.at("approach").get<std::string>());
  item.model_tag = j.at("model_tag").get<std::string>();
  item.language = parse_language(j.at("language").get<std::string>());
  for (const json& r : j.at("trace")) {
    item.trace.push_back(stage_record_from_json(r));
  }
  return item;
}

}  // namespace mcqforge
