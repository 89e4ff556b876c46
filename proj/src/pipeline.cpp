#include "mcqforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::pipeline {
namespace {

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool ascii_istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char a = s[i], b = prefix[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
    if (a != b) return false;
  }
  return true;
}

bool is_quote_pair(char32_t open, char32_t close) {
  switch (open) {
    case U'"': return close == U'"';
    case U'\'': return close == U'\'';
    case U'“': return close == U'”';  // “ ”
    case U'‘': return close == U'’';  // ‘ ’
    case U'«': return close == U'»';  // « »
    case U'„': return close == U'“' || close == U'”';  // „ “
    default: return false;
  }
}

std::string strip_quotes(std::string_view s) {
  std::u32string cps = uni::decode_utf8(s);
  if (cps.size() >= 2 && is_quote_pair(cps.front(), cps.back())) {
    return uni::trim(uni::encode_utf8(cps.substr(1, cps.size() - 2)));
  }
  return std::string(s);
}

bool is_bullet(char32_t cp) {
  return cp == U'-' || cp == U'–' || cp == U'•' || cp == U'*' ||
         cp == U'·' || cp == U'▪' || cp == U'‣';
}

bool is_trailing_punct(char32_t cp) {
  return cp == U'.' || cp == U',' || cp == U';' || cp == U':' || cp == U'!' ||
         cp == U'?' || cp == U'।' || cp == U'॥' ||  // danda
         cp == U'。' || cp == U'…' || cp == U'？';
}

// Removes one leading list marker: "1." / "1)" / "(2)" / "a)" / "A." /
// bullets, including non-ASCII digits. Returns the untouched input when no
// marker is found.
std::string strip_enumerator(std::string_view line) {
  std::u32string cps = uni::decode_utf8(uni::trim(line));
  std::size_t i = 0;
  auto rest_from = [&cps](std::size_t pos) {
    while (pos < cps.size() && uni::is_space(cps[pos])) ++pos;
    return uni::encode_utf8(cps.substr(pos));
  };

  if (i < cps.size() && is_bullet(cps[i]) && cps.size() > i + 1) {
    return rest_from(i + 1);
  }

  bool parenthesized = i < cps.size() && cps[i] == U'(';
  if (parenthesized) ++i;

  std::size_t digits = 0;
  while (i < cps.size() && uni::is_digit(cps[i]) && digits < 4) {
    ++i;
    ++digits;
  }
  if (digits > 0 && i < cps.size()) {
    char32_t mark = cps[i];
    if (parenthesized ? mark == U')'
                      : (mark == U'.' || mark == U')' || mark == U':')) {
      return rest_from(i + 1);
    }
    return uni::encode_utf8(cps);
  }

  // Single letter marker: "a)" / "ক)" can be tight, "a." needs a space.
  if (digits == 0 && i < cps.size() && uni::is_letter(cps[i]) &&
      i + 1 < cps.size()) {
    char32_t mark = cps[i + 1];
    if (mark == U')') return rest_from(i + 2);
    if (!parenthesized && mark == U'.' && i + 2 < cps.size() &&
        uni::is_space(cps[i + 2])) {
      return rest_from(i + 2);
    }
  }
  return uni::encode_utf8(cps);
}

std::string strip_trailing_punct(std::string_view s) {
  std::u32string cps = uni::decode_utf8(s);
  std::size_t e = cps.size();
  while (e > 0 && (is_trailing_punct(cps[e - 1]) || uni::is_space(cps[e - 1]))) {
    --e;
  }
  return uni::encode_utf8(cps.substr(0, e));
}

bool punctuation_only(std::string_view s) {
  for (char32_t cp : uni::decode_utf8(s)) {
    if (uni::is_letter(cp) || uni::is_mark(cp) || uni::is_digit(cp)) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_segments(const std::string& raw) {
  std::vector<std::string> segments;
  std::string current;
  for (char32_t cp : uni::decode_utf8(raw)) {
    bool sep = cp == U'\n' || cp == U',' || cp == U';' || cp == U'，' ||
               cp == U'；' || cp == U'、' || cp == U'،' ||
               cp == U'؛';
    if (sep) {
      segments.push_back(current);
      current.clear();
    } else {
      std::u32string one(1, cp);
      current += uni::encode_utf8(one);
    }
  }
  segments.push_back(current);
  return segments;
}

std::string clean_segment(const std::string& segment) {
  return strip_quotes(uni::trim(strip_enumerator(uni::trim(segment))));
}

bool ends_with_question_mark(std::string_view s) {
  std::u32string cps = uni::decode_utf8(uni::trim(s));
  return !cps.empty() && (cps.back() == U'?' || cps.back() == U'？');
}

std::string strip_question_label(std::string_view line) {
  std::string t = uni::trim(line);
  for (std::string_view label : {"question:", "q:"}) {
    if (ascii_istarts_with(t, label)) {
      return uni::trim(t.substr(label.size()));
    }
  }
  // "Question 1:" style.
  if (ascii_istarts_with(t, "question")) {
    std::size_t pos = std::string_view("question").size();
    std::size_t k = pos;
    while (k < t.size() && (std::isdigit(static_cast<unsigned char>(t[k])) ||
                            t[k] == ' ')) {
      ++k;
    }
    if (k < t.size() && (t[k] == ':' || t[k] == '.' || t[k] == ')')) {
      return uni::trim(t.substr(k + 1));
    }
  }
  return t;
}

std::optional<std::string> answer_line_value(std::string_view line) {
  std::string t = uni::trim(line);
  for (std::string_view label : {"correct answer:", "answer:", "ans:"}) {
    if (ascii_istarts_with(t, label)) {
      return uni::trim(t.substr(label.size()));
    }
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view salt) {
  return fnv1a64(std::to_string(base) + '\x1f' + std::string(salt));
}

}  // namespace

KeywordPolicy parse_keyword_policy(const std::string& text) {
  KeywordPolicy policy;
  if (text == "all") {
    policy.kind = KeywordPolicy::Kind::All;
    return policy;
  }
  if (ascii_istarts_with(text, "first:")) {
    policy.kind = KeywordPolicy::Kind::FirstK;
    try {
      policy.k = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      throw Error("bad keyword policy: " + text);
    }
    if (policy.k < 1) throw Error("keyword policy needs k >= 1");
    return policy;
  }
  throw Error("unknown keyword policy: " + text + " (expected first:<k> or all)");
}

std::string keyword_policy_code(const KeywordPolicy& policy) {
  return policy.kind == KeywordPolicy::Kind::All
             ? "all"
             : "first:" + std::to_string(policy.k);
}

void validate_config(const PipelineConfig& config) {
  if (config.paraphrases_per_context < 1) throw Error("paraphrases_per_context must be >= 1");
  if (config.questions_per_paraphrase < 1) throw Error("questions_per_paraphrase must be >= 1");
  if (config.distractors_per_question < 1) throw Error("distractors_per_question must be >= 1");
  if (config.workers < 1) throw Error("workers must be >= 1");
  if (config.failure_tolerance < 0 || config.failure_tolerance > 1) {
    throw Error("failure_tolerance must be in [0,1]");
  }
  if (config.keyword_policy.kind == KeywordPolicy::Kind::FirstK &&
      config.keyword_policy.k < config.questions_per_paraphrase) {
    throw Error("keyword policy retains fewer keywords than questions_per_paraphrase");
  }
  if (config.approach == Approach::SSP && config.shot == Shot::One) {
    throw Error("the single-stage baseline has no one-shot variant");
  }
  if (config.shot == Shot::One) {
    auto it = config.exemplars.find(config.language);
    if (it == config.exemplars.end() || !it->second.qg || !it->second.dg) {
      throw Error(std::string("one-shot runs need question and distractor exemplars for ") +
                  std::string(language_name(config.language)));
    }
  }
}

json config_to_json(const PipelineConfig& config) {
  json exemplars = json::object();
  for (const auto& [lang, set] : config.exemplars) {
    json entry = json::object();
    if (set.qg) {
      entry["qg"] = json{{"paraphrased_context", set.qg->paraphrased_context},
                         {"keyword", set.qg->keyword},
                         {"question", set.qg->question}};
    }
    if (set.dg) {
      entry["dg"] = json{{"question", set.dg->question},
                         {"correct_answer", set.dg->correct_answer},
                         {"distractors", set.dg->distractors}};
    }
    exemplars[std::string(language_code(lang))] = entry;
  }
  return json{{"approach", approach_code(config.approach)},
              {"shot", shot_code(config.shot)},
              {"paraphrases_per_context", config.paraphrases_per_context},
              {"questions_per_paraphrase", config.questions_per_paraphrase},
              {"distractors_per_question", config.distractors_per_question},
              {"keyword_policy", keyword_policy_code(config.keyword_policy)},
              {"language", language_code(config.language)},
              {"model_tag", config.model_tag},
              {"params",
               json{{"max_tokens", config.params.max_tokens},
                    {"temperature", config.params.temperature},
                    {"presence_penalty", config.params.presence_penalty},
                    {"frequency_penalty", config.params.frequency_penalty}}},
              {"exemplars", exemplars},
              {"seed", config.seed},
              {"workers", config.workers},
              {"failure_tolerance", config.failure_tolerance}};
}

std::vector<std::string> parse_keywords(const std::string& raw) {
  std::vector<std::string> keywords;
  std::unordered_set<std::string> seen;
  for (const std::string& segment : split_segments(raw)) {
    std::string candidate = clean_segment(segment);
    if (candidate.empty() || punctuation_only(candidate)) continue;
    if (seen.insert(uni::fold_key(candidate)).second) {
      keywords.push_back(candidate);
    }
  }
  if (keywords.empty()) {
    throw EmptyKeywordsError("no keywords recoverable from completion");
  }
  return keywords;
}

std::vector<std::string> parse_distractors(const std::string& raw, int wanted,
                                           const std::string& correct_answer) {
  if (wanted < 1) throw Error("wanted distractor count must be >= 1");
  const std::string answer_key = uni::fold_key(correct_answer);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const std::string& segment : split_segments(raw)) {
    std::string candidate = strip_trailing_punct(clean_segment(segment));
    candidate = uni::trim(candidate);
    if (candidate.empty() || punctuation_only(candidate)) continue;
    std::string key = uni::fold_key(candidate);
    if (key == answer_key) continue;
    if (!seen.insert(key).second) continue;
    out.push_back(candidate);
    if (static_cast<int>(out.size()) == wanted) return out;
  }
  throw InsufficientDistractorsError(static_cast<int>(out.size()), wanted);
}

std::string extract_question(const std::string& completion) {
  std::string trimmed = uni::trim(completion);
  if (trimmed.empty()) return trimmed;
  std::size_t start = 0;
  while (start <= trimmed.size()) {
    std::size_t end = trimmed.find('\n', start);
    std::string line = trimmed.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    if (ends_with_question_mark(line)) {
      return strip_question_label(line);
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return strip_question_label(trimmed);
}

std::vector<SspBlock> parse_ssp_completion(const std::string& raw) {
  struct PendingBlock {
    std::string question;
    std::vector<std::string> options;
    int starred_option = -1;
    std::optional<std::string> answer_raw;
    bool any_content() const {
      return !question.empty() || !options.empty() || answer_raw.has_value();
    }
  };

  std::vector<PendingBlock> pending;
  PendingBlock current;
  auto flush = [&pending, &current]() {
    if (current.any_content()) pending.push_back(std::move(current));
    current = PendingBlock{};
  };

  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    std::string line = raw.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    start = end == std::string::npos ? raw.size() + 1 : end + 1;

    std::string t = uni::trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (auto answer = answer_line_value(t)) {
      current.answer_raw = *answer;
      continue;
    }

    bool starred = false;
    if (!t.empty() && t[0] == '*') {  // "*b) text" marks the correct option
      starred = true;
      t = uni::trim(t.substr(1));
    }
    std::string stripped = strip_enumerator(t);
    bool enumerated = stripped != t;
    if (!starred && !stripped.empty() && stripped[0] == '*') {  // "b) *text"
      starred = true;
      stripped = uni::trim(stripped.substr(1));
    }

    bool question_like =
        ends_with_question_mark(stripped) || ascii_istarts_with(t, "question") ||
        ascii_istarts_with(t, "q:");
    if (question_like) {
      // A fresh question after options (or a second question) opens a new
      // block.
      if (!current.question.empty() || !current.options.empty()) flush();
      current.question = strip_question_label(stripped);
      continue;
    }
    if (enumerated) {
      std::string option = strip_trailing_punct(strip_quotes(stripped));
      option = uni::trim(option);
      if (!option.empty() && !punctuation_only(option)) {
        current.options.push_back(option);
        if (starred && current.starred_option < 0) {
          current.starred_option = static_cast<int>(current.options.size()) - 1;
        }
      }
      continue;
    }
    if (current.question.empty()) {
      current.question = strip_question_label(t);
    }
    // Unenumerated trailing prose inside a block is ignored.
  }
  flush();

  std::vector<SspBlock> blocks;
  for (PendingBlock& b : pending) {
    if (b.question.empty()) continue;
    int answer_idx = b.starred_option;
    std::string answer_text;
    if (answer_idx < 0 && b.answer_raw) {
      std::string value = strip_trailing_punct(strip_quotes(uni::trim(*b.answer_raw)));
      value = uni::trim(value);
      if (value.size() == 1 && std::isalpha(static_cast<unsigned char>(value[0]))) {
        int idx = std::tolower(static_cast<unsigned char>(value[0])) - 'a';
        if (idx >= 0 && idx < static_cast<int>(b.options.size())) answer_idx = idx;
      } else if (!value.empty() && value.size() <= 4 &&
                 std::all_of(value.begin(), value.end(), [](unsigned char c) {
                   return std::isdigit(c);
                 })) {
        int idx = std::stoi(value) - 1;
        if (idx >= 0 && idx < static_cast<int>(b.options.size())) answer_idx = idx;
      }
      if (answer_idx < 0 && !value.empty()) {
        std::string key = uni::fold_key(value);
        for (std::size_t i = 0; i < b.options.size(); ++i) {
          if (uni::fold_key(b.options[i]) == key) {
            answer_idx = static_cast<int>(i);
            break;
          }
        }
        if (answer_idx < 0) answer_text = value;  // literal answer text
      }
    }
    if (answer_idx < 0 && answer_text.empty()) continue;  // no detectable answer

    SspBlock block;
    block.question = b.question;
    block.answer = answer_idx >= 0 ? b.options[static_cast<std::size_t>(answer_idx)]
                                   : answer_text;
    for (std::size_t i = 0; i < b.options.size(); ++i) {
      if (static_cast<int>(i) == answer_idx) continue;
      block.distractor_candidates.push_back(b.options[i]);
    }
    blocks.push_back(std::move(block));
  }
  if (blocks.empty()) {
    throw ParseFailureError("no question block with a detectable answer");
  }
  return blocks;
}

Runner::Runner(llm::Client& client, prompts::TemplateRegistry registry,
               PipelineConfig config)
    : client_(client), registry_(std::move(registry)), config_(std::move(config)) {
  validate_config(config_);
}

llm::CompletionRequest Runner::make_request(const Context& context,
                                            std::string prompt,
                                            std::string_view salt) const {
  llm::CompletionRequest req;
  req.prompt = std::move(prompt);
  req.params = config_.params;
  req.model_tag = config_.model_tag;
  req.language = context.language;
  req.seed = derive_seed(config_.seed, std::string(salt) + '\x1f' + context.id);
  return req;
}

StageRecord Runner::to_record(Stage stage, const std::string& prompt,
                              const llm::CompletionResponse& response) const {
  StageRecord record;
  record.stage = stage;
  record.prompt = prompt;
  record.completion = response.text;
  record.timestamp_ms = response.timestamp_ms;
  record.latency_ms = response.latency_ms;
  return record;
}

std::vector<Runner::ParaphraseBranch> Runner::generate_paraphrases(
    const Context& context, std::vector<StageFailure>& failures) {
  const std::string prompt = prompts::render_pg(registry_, context);
  std::vector<ParaphraseBranch> branches;
  std::unordered_set<std::string> seen;
  for (int rep = 1; rep <= config_.paraphrases_per_context; ++rep) {
    auto response = client_.complete(
        make_request(context, prompt, "pg:" + std::to_string(rep)));
    std::string text = uni::trim(response.text);
    if (text.empty()) {
      failures.push_back({context.id, "pg", "empty completion",
                          "repetition " + std::to_string(rep)});
      continue;
    }
    if (!seen.insert(uni::fold_key(text)).second) {
      failures.push_back({context.id, "pg", "duplicate paraphrase dropped",
                          "repetition " + std::to_string(rep)});
      continue;
    }
    ParaphraseBranch branch;
    branch.paraphrase.context_id = context.id;
    branch.paraphrase.index = static_cast<int>(branches.size()) + 1;
    branch.paraphrase.text = std::move(text);
    branch.record = to_record(Stage::PG, prompt, response);
    branches.push_back(std::move(branch));
  }
  if (branches.empty()) {
    throw StageFailureError(Stage::PG, "no usable paraphrase from " +
                                           std::to_string(config_.paraphrases_per_context) +
                                           " completions");
  }
  return branches;
}

KeywordSet Runner::extract_keywords(const Context& context,
                                    const Paraphrase& paraphrase,
                                    StageRecord& record) {
  const std::string prompt =
      prompts::render_ke(registry_, paraphrase, context.language);
  auto response = client_.complete(make_request(
      context, prompt, "ke:" + std::to_string(paraphrase.index)));
  record = to_record(Stage::KE, prompt, response);

  std::vector<std::string> words = parse_keywords(response.text);
  KeywordSet set;
  set.context_id = context.id;
  set.paraphrase_index = paraphrase.index;
  const std::string paraphrase_key = uni::fold_key(paraphrase.text);
  for (std::string& word : words) {
    Keyword kw;
    kw.ungrounded = paraphrase_key.find(uni::fold_key(word)) == std::string::npos;
    kw.text = std::move(word);
    set.keywords.push_back(std::move(kw));
  }
  return set;
}

GeneratedQuestion Runner::generate_question(const Context& context,
                                            const Paraphrase& paraphrase,
                                            const std::string& keyword,
                                            StageRecord& record) {
  const prompts::QgExemplar* exemplar = nullptr;
  if (config_.shot == Shot::One) {
    exemplar = &*config_.exemplars.at(context.language).qg;
  }
  const std::string prompt = prompts::render_qg(
      registry_, paraphrase, keyword, context.language, config_.shot, exemplar);
  auto response = client_.complete(make_request(
      context, prompt,
      "qg:" + std::to_string(paraphrase.index) + ':' + keyword));
  record = to_record(Stage::QG, prompt, response);

  std::string text = extract_question(response.text);
  if (text.empty()) {
    throw StageFailureError(Stage::QG, "empty question completion");
  }
  GeneratedQuestion question;
  question.context_id = context.id;
  question.paraphrase_index = paraphrase.index;
  question.correct_answer = keyword;
  question.text = std::move(text);
  question.shot = config_.shot;
  question.id = sha256_hex_prefix(
      context.id + '\x1f' + std::to_string(paraphrase.index) + '\x1f' + keyword +
          '\x1f' + question.text + '\x1f' + config_.model_tag + '\x1f' +
          std::string(shot_code(config_.shot)),
      16);
  return question;
}

Runner::ContextOutcome Runner::run_msp(const Context& context) {
  ContextOutcome outcome;
  std::vector<StageFailure>& failures = outcome.failures;
  std::vector<McqItem>& items = outcome.items;
  std::vector<ParaphraseBranch> branches;
  try {
    branches = generate_paraphrases(context, failures);
  } catch (const StageFailureError& e) {
    failures.push_back({context.id, "pg", e.what(), ""});
    failures.push_back({context.id, "context", "all branches failed", ""});
    return outcome;
  }
  outcome.paraphrase_branches = static_cast<std::int64_t>(branches.size());

  for (const ParaphraseBranch& branch : branches) {
    StageRecord ke_record;
    KeywordSet keywords;
    try {
      keywords = extract_keywords(context, branch.paraphrase, ke_record);
    } catch (const EmptyKeywordsError& e) {
      failures.push_back({context.id, "ke", e.what(),
                          "paraphrase " + std::to_string(branch.paraphrase.index)});
      continue;
    }

    std::size_t retained = keywords.keywords.size();
    if (config_.keyword_policy.kind == KeywordPolicy::Kind::FirstK) {
      retained = std::min<std::size_t>(retained,
                                       static_cast<std::size_t>(config_.keyword_policy.k));
    }
    std::size_t targets = std::min<std::size_t>(
        retained, static_cast<std::size_t>(config_.questions_per_paraphrase));

    for (std::size_t k = 0; k < targets; ++k) {
      const std::string& keyword = keywords.keywords[k].text;
      StageRecord qg_record;
      GeneratedQuestion question;
      try {
        question = generate_question(context, branch.paraphrase, keyword, qg_record);
      } catch (const StageFailureError& e) {
        failures.push_back({context.id, "qg", e.what(),
                            "paraphrase " + std::to_string(branch.paraphrase.index)});
        continue;
      }
      ++outcome.questions;

      const prompts::DgExemplar* exemplar = nullptr;
      if (config_.shot == Shot::One) {
        exemplar = &*config_.exemplars.at(context.language).dg;
      }
      const std::string dg_prompt = prompts::render_dg(
          registry_, question, keyword, context.language, config_.shot, exemplar);

      std::vector<std::string> distractors;
      StageRecord dg_record;
      bool ok = false;
      for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
        auto response = client_.complete(make_request(
            context, dg_prompt,
            "dg:" + std::to_string(branch.paraphrase.index) + ':' + keyword +
                ':' + std::to_string(attempt)));
        dg_record = to_record(Stage::DG, dg_prompt, response);
        try {
          distractors = parse_distractors(
              response.text, config_.distractors_per_question, keyword);
          ok = true;
        } catch (const InsufficientDistractorsError& e) {
          if (attempt == 1) {
            failures.push_back({context.id, "dg", e.what(), response.text});
          }
        }
      }
      if (!ok) continue;

      McqItem item;
      item.question = question;
      item.distractors = std::move(distractors);
      item.approach = Approach::MSP;
      item.model_tag = config_.model_tag;
      item.language = context.language;
      item.trace = {branch.record, ke_record, qg_record, dg_record};
      std::string joined;
      for (const std::string& d : item.distractors) joined += d + '\x1f';
      item.id = sha256_hex_prefix(question.id + '\x1f' + joined + "msp", 16);

      ValidationReport report = validate_mcq(item, config_.distractors_per_question);
      if (!report.ok()) {
        std::string reasons;
        for (Violation v : report.violations) {
          reasons += std::string(violation_name(v)) + ' ';
        }
        failures.push_back({context.id, "dg", "validation failed: " + reasons, ""});
        continue;
      }
      items.push_back(std::move(item));
    }
  }
  if (items.empty()) {
    failures.push_back({context.id, "context", "all branches failed", ""});
  }
  return outcome;
}

Runner::ContextOutcome Runner::run_ssp(const Context& context) {
  ContextOutcome outcome;
  std::vector<StageFailure>& failures = outcome.failures;
  std::vector<McqItem>& items = outcome.items;

  const std::string prompt = prompts::render_ssp(registry_, context);
  auto response = client_.complete(make_request(context, prompt, "ssp"));
  StageRecord record = to_record(Stage::SSP, prompt, response);

  std::vector<SspBlock> blocks;
  try {
    blocks = parse_ssp_completion(response.text);
  } catch (const ParseFailureError& e) {
    failures.push_back({context.id, "ssp", e.what(), response.text});
    failures.push_back({context.id, "context", "all branches failed", ""});
    return outcome;
  }

  int block_index = 0;
  for (const SspBlock& block : blocks) {
    ++block_index;
    McqItem item;
    item.question.context_id = context.id;
    item.question.paraphrase_index = 0;
    item.question.correct_answer = block.answer;
    item.question.text = block.question;
    item.question.shot = Shot::Zero;
    item.question.id = sha256_hex_prefix(
        context.id + "\x1f" "ssp\x1f" + std::to_string(block_index) + '\x1f' +
            block.question + '\x1f' + block.answer,
        16);
    item.approach = Approach::SSP;
    item.model_tag = config_.model_tag;
    item.language = context.language;
    item.trace = {record};

    const std::string answer_key = uni::fold_key(block.answer);
    std::unordered_set<std::string> seen;
    for (const std::string& option : block.distractor_candidates) {
      std::string key = uni::fold_key(option);
      if (key == answer_key || !seen.insert(key).second) continue;
      item.distractors.push_back(option);
      if (static_cast<int>(item.distractors.size()) ==
          config_.distractors_per_question) {
        break;
      }
    }
    std::string joined;
    for (const std::string& d : item.distractors) joined += d + '\x1f';
    item.id = sha256_hex_prefix(item.question.id + '\x1f' + joined + "ssp", 16);

    ValidationReport report = validate_mcq(item, config_.distractors_per_question);
    if (!report.ok()) {
      std::string reasons;
      for (Violation v : report.violations) {
        reasons += std::string(violation_name(v)) + ' ';
      }
      failures.push_back({context.id, "ssp",
                          "block " + std::to_string(block_index) +
                              " failed validation: " + reasons,
                          response.text});
      continue;
    }
    items.push_back(std::move(item));
  }
  outcome.questions = static_cast<std::int64_t>(items.size());
  if (items.empty()) {
    failures.push_back({context.id, "context", "all branches failed", ""});
  }
  return outcome;
}

Runner::ContextOutcome Runner::run_context(const Context& context) {
  return config_.approach == Approach::MSP ? run_msp(context) : run_ssp(context);
}

json manifest_to_json(const RunManifest& m) {
  json failures = json::array();
  for (const StageFailure& f : m.failures) {
    failures.push_back(json{{"context_id", f.context_id},
                            {"stage", f.stage},
                            {"reason", f.reason},
                            {"detail", f.detail}});
  }
  return json{{"run_id", m.run_id},
              {"config", m.config_snapshot},
              {"dataset_tag", m.dataset_tag},
              {"input_digest", m.input_digest},
              {"sample_seed", m.sample_seed},
              {"template_digest", m.template_digest},
              {"exemplar_digest", m.exemplar_digest},
              {"started_ms", m.started_ms},
              {"finished_ms", m.finished_ms},
              {"counts",
               json{{"contexts_total", m.contexts_total},
                    {"contexts_failed", m.contexts_failed},
                    {"paraphrase_branches", m.paraphrase_branches},
                    {"questions", m.questions},
                    {"items", m.items},
                    {"distractors", m.distractors}}},
              {"provider_calls", m.provider_calls},
              {"cache_hits", m.cache_hits},
              {"failures", failures}};
}

RunManifest Runner::run_corpus(const std::vector<Context>& contexts,
                               const RunMeta& meta,
                               const std::filesystem::path& items_path,
                               const std::filesystem::path& failures_path) {
  if (contexts.empty()) throw Error("context list is empty");

  RunManifest manifest;
  manifest.config_snapshot = config_to_json(config_);
  manifest.dataset_tag = meta.dataset_tag;
  manifest.input_digest = meta.input_digest;
  manifest.sample_seed = meta.sample_seed;
  manifest.template_digest = registry_.digest();
  {
    auto it = config_.exemplars.find(config_.language);
    manifest.exemplar_digest =
        it == config_.exemplars.end()
            ? "-"
            : sha256_hex_prefix(
                  manifest.config_snapshot["exemplars"].dump(), 16);
  }
  manifest.run_id = sha256_hex_prefix(manifest.config_snapshot.dump() + '\x1f' +
                                          meta.input_digest + '\x1f' +
                                          manifest.template_digest,
                                      16);
  manifest.started_ms = now_unix_ms();
  manifest.contexts_total = static_cast<std::int64_t>(contexts.size());

  JsonlWriter item_writer(items_path);
  JsonlWriter failure_writer(failures_path);

  struct Slot {
    ContextOutcome outcome;
    bool done = false;
  };

  const std::size_t total = contexts.size();
  const std::size_t block_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(config_.workers) * 8);
  std::exception_ptr abort_error;

  for (std::size_t block = 0; block < total && !abort_error; block += block_size) {
    const std::size_t end = std::min(total, block + block_size);
    std::vector<Slot> slots(end - block);
    bool abort_flag = false;

#ifdef _OPENMP
#pragma omp parallel for num_threads(config_.workers) schedule(dynamic)
#endif
    for (std::ptrdiff_t off = 0; off < static_cast<std::ptrdiff_t>(end - block);
         ++off) {
      if (abort_flag) continue;
      Slot& slot = slots[static_cast<std::size_t>(off)];
      const Context& context = contexts[block + static_cast<std::size_t>(off)];
      try {
        slot.outcome = run_context(context);
        slot.done = true;
      } catch (const llm::BudgetExhaustedError&) {
#ifdef _OPENMP
#pragma omp critical(mcqforge_run_abort)
#endif
        {
          abort_flag = true;
          if (!abort_error) abort_error = std::current_exception();
        }
      } catch (const llm::AuthError&) {
#ifdef _OPENMP
#pragma omp critical(mcqforge_run_abort)
#endif
        {
          abort_flag = true;
          if (!abort_error) abort_error = std::current_exception();
        }
      } catch (const std::exception& e) {
        slot.outcome.failures.push_back(
            {context.id, "context", std::string("internal: ") + e.what(), ""});
        slot.done = true;
      }
    }

    // Single appender: items and failures land in context order.
    for (Slot& slot : slots) {
      if (!slot.done) continue;
      if (slot.outcome.items.empty()) ++manifest.contexts_failed;
      manifest.paraphrase_branches += slot.outcome.paraphrase_branches;
      manifest.questions += slot.outcome.questions;
      for (McqItem& item : slot.outcome.items) {
        item_writer.write(to_json(item));
        ++manifest.items;
        manifest.distractors += static_cast<std::int64_t>(item.distractors.size());
      }
      for (StageFailure& f : slot.outcome.failures) {
        failure_writer.write(json{{"context_id", f.context_id},
                                  {"stage", f.stage},
                                  {"reason", f.reason},
                                  {"detail", f.detail}});
        manifest.failures.push_back(std::move(f));
      }
    }
    item_writer.flush();
    failure_writer.flush();
  }

  manifest.provider_calls = client_.provider_calls();
  manifest.cache_hits = client_.cache_hits();
  manifest.finished_ms = now_unix_ms();
  if (abort_error) std::rethrow_exception(abort_error);
  return manifest;
}

}  // namespace mcqforge::pipeline
