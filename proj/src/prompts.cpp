#include "mcqforge/prompts.hpp"

#include <fstream>

#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::prompts {
namespace {

const char* kPgZero =
    "Paraphrase the given context <context> in language <language>";
const char* kKeZero =
    "Extract keywords from the paraphrased context <paraphrased context> in "
    "language <language>";
const char* kQgZero =
    "Generate a question based on the paraphrased context <paraphrased "
    "context> and the correct answer <keyword> in language <language>";
const char* kQgOne =
    "For the paraphrased context <exemplar paraphrased context> and the "
    "correct answer <exemplar keyword>, the question is <exemplar question> "
    "in language <language>. Generate a question based on the paraphrased "
    "context <paraphrased context> and the correct answer <keyword> in "
    "language <language>";
const char* kDgZero =
    "Create three plausible distractors for the question <question> and the "
    "correct answer <keyword> in language <language>";
const char* kDgOne =
    "The distractors for the question <exemplar question> and the correct "
    "answer <exemplar correct answer> are <exemplar distractors> in language "
    "<language>. Create three plausible distractors for the question "
    "<question> and the correct answer <keyword> in language <language>";
const char* kSspZero =
    "Generate MCQs based on the given context <context> along with the "
    "correct answer and three distractors in language <language>";

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> kKnown = {
      "context",
      "paraphrased context",
      "keyword",
      "question",
      "correct answer",
      "language",
      "exemplar paraphrased context",
      "exemplar keyword",
      "exemplar question",
      "exemplar correct answer",
      "exemplar distractors",
  };
  return kKnown;
}

// Placeholder names appearing in a template body.
std::set<std::string> scan_placeholders(const std::string& body) {
  std::set<std::string> found;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '<') {
      ++i;
      continue;
    }
    std::size_t close = body.find('>', i + 1);
    if (close == std::string::npos) break;
    std::string name = body.substr(i + 1, close - i - 1);
    if (known_placeholders().count(name)) {
      found.insert(name);
      i = close + 1;
    } else {
      ++i;  // literal angle bracket
    }
  }
  return found;
}

std::string require_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw TemplateFormatError("exemplar file: missing field '" + std::string(key) +
                              "' in " + where);
  }
  std::string v = j.at(key).get<std::string>();
  if (uni::trim(v).empty()) {
    throw TemplateFormatError("exemplar file: empty field '" + std::string(key) +
                              "' in " + where);
  }
  return v;
}

}  // namespace

void validate_exemplars(const ExemplarSet& ex) {
  if (ex.qg) {
    if (uni::trim(ex.qg->paraphrased_context).empty() ||
        uni::trim(ex.qg->keyword).empty() || uni::trim(ex.qg->question).empty()) {
      throw TemplateFormatError("question exemplar has an empty field");
    }
  }
  if (ex.dg) {
    if (uni::trim(ex.dg->question).empty() ||
        uni::trim(ex.dg->correct_answer).empty()) {
      throw TemplateFormatError("distractor exemplar has an empty field");
    }
    for (const std::string& d : ex.dg->distractors) {
      if (uni::trim(d).empty()) {
        throw TemplateFormatError("distractor exemplar needs three non-empty distractors");
      }
    }
  }
}

std::map<Language, ExemplarSet> load_exemplars(const std::filesystem::path& path) {
  json doc = json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw TemplateFormatError("exemplar file is not a JSON object: " + path.string());
  }
  std::map<Language, ExemplarSet> out;
  for (const auto& [code, entry] : doc.items()) {
    Language lang = parse_language(code);
    ExemplarSet set;
    if (entry.contains("qg")) {
      const json& q = entry.at("qg");
      QgExemplar ex;
      ex.paraphrased_context = require_field(q, "paraphrased_context", code + ".qg");
      ex.keyword = require_field(q, "keyword", code + ".qg");
      ex.question = require_field(q, "question", code + ".qg");
      set.qg = ex;
    }
    if (entry.contains("dg")) {
      const json& d = entry.at("dg");
      DgExemplar ex;
      ex.question = require_field(d, "question", code + ".dg");
      ex.correct_answer = require_field(d, "correct_answer", code + ".dg");
      if (!d.contains("distractors") || !d.at("distractors").is_array() ||
          d.at("distractors").size() != 3) {
        throw TemplateFormatError("exemplar file: " + code +
                                  ".dg needs exactly 3 distractors");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        ex.distractors[i] = d.at("distractors").at(i).get<std::string>();
      }
      set.dg = ex;
    }
    validate_exemplars(set);
    out[lang] = set;
  }
  return out;
}

std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(body.size() + 64);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] != '<') {
      out.push_back(body[i]);
      ++i;
      continue;
    }
    std::size_t close = body.find('>', i + 1);
    std::string name =
        close == std::string::npos ? "" : body.substr(i + 1, close - i - 1);
    if (!known_placeholders().count(name)) {
      out.push_back(body[i]);
      ++i;
      continue;
    }
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw UnboundPlaceholderError("unbound placeholder <" + name + ">");
    }
    out.append(it->second);
    i = close + 1;
  }
  return out;
}

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry reg;
  reg.bodies_[{Stage::PG, Shot::Zero}] = kPgZero;
  reg.bodies_[{Stage::KE, Shot::Zero}] = kKeZero;
  reg.bodies_[{Stage::QG, Shot::Zero}] = kQgZero;
  reg.bodies_[{Stage::QG, Shot::One}] = kQgOne;
  reg.bodies_[{Stage::DG, Shot::Zero}] = kDgZero;
  reg.bodies_[{Stage::DG, Shot::One}] = kDgOne;
  reg.bodies_[{Stage::SSP, Shot::Zero}] = kSspZero;
  return reg;
}

void TemplateRegistry::load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template override file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = uni::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw TemplateFormatError("template override line " + std::to_string(lineno) +
                                ": expected '<stage>.<shot> = <body>'");
    }
    std::string key = uni::trim(trimmed.substr(0, eq));
    std::string body = uni::trim(trimmed.substr(eq + 1));
    std::size_t dot = key.find('.');
    if (dot == std::string::npos) {
      throw TemplateFormatError("template override line " + std::to_string(lineno) +
                                ": key must be '<stage>.<shot>'");
    }
    Stage stage = parse_stage(key.substr(0, dot));
    Shot shot = parse_shot(key.substr(dot + 1));
    if (!bodies_.count({stage, shot})) {
      throw TemplateFormatError("template override line " + std::to_string(lineno) +
                                ": no built-in template for " + key);
    }
    std::set<std::string> required = required_placeholders(stage, shot);
    std::set<std::string> declared = scan_placeholders(body);
    if (declared != required) {
      std::string want, got;
      for (const std::string& p : required) want += "<" + p + "> ";
      for (const std::string& p : declared) got += "<" + p + "> ";
      throw TemplateFormatError("template override line " + std::to_string(lineno) +
                                ": placeholder set mismatch; requires " + want +
                                "but declares " + got);
    }
    bodies_[{stage, shot}] = body;
  }
}

const std::string& TemplateRegistry::body(Stage stage, Shot shot) const {
  auto it = bodies_.find({stage, shot});
  if (it == bodies_.end()) it = bodies_.find({stage, Shot::Zero});
  if (it == bodies_.end()) throw Error("no template registered for stage");
  return it->second;
}

std::string TemplateRegistry::digest() const {
  std::string blob;
  for (const auto& [key, body] : bodies_) {
    blob += stage_code(key.first);
    blob += '.';
    blob += shot_code(key.second);
    blob += '\x1f';
    blob += body;
    blob += '\x1e';
  }
  return sha256_hex_prefix(blob, 16);
}

std::set<std::string> TemplateRegistry::required_placeholders(Stage stage, Shot shot) {
  switch (stage) {
    case Stage::PG:
      return {"context", "language"};
    case Stage::KE:
      return {"paraphrased context", "language"};
    case Stage::QG:
      if (shot == Shot::One) {
        return {"paraphrased context", "keyword", "language",
                "exemplar paraphrased context", "exemplar keyword",
                "exemplar question"};
      }
      return {"paraphrased context", "keyword", "language"};
    case Stage::DG:
      if (shot == Shot::One) {
        return {"question", "keyword", "language", "exemplar question",
                "exemplar correct answer", "exemplar distractors"};
      }
      return {"question", "keyword", "language"};
    case Stage::SSP:
      return {"context", "language"};
  }
  return {};
}

std::string render_pg(const TemplateRegistry& reg, const Context& context) {
  return render_template(reg.body(Stage::PG, Shot::Zero),
                         {{"context", context.text},
                          {"language", std::string(language_name(context.language))}});
}

std::string render_ke(const TemplateRegistry& reg, const Paraphrase& paraphrase,
                      Language language) {
  return render_template(reg.body(Stage::KE, Shot::Zero),
                         {{"paraphrased context", paraphrase.text},
                          {"language", std::string(language_name(language))}});
}

std::string render_qg(const TemplateRegistry& reg, const Paraphrase& paraphrase,
                      const std::string& keyword, Language language, Shot shot,
                      const QgExemplar* exemplar) {
  std::map<std::string, std::string> bindings = {
      {"paraphrased context", paraphrase.text},
      {"keyword", keyword},
      {"language", std::string(language_name(language))}};
  if (shot == Shot::One) {
    if (exemplar == nullptr) {
      throw MissingExemplarError("one-shot question prompt needs an exemplar");
    }
    bindings["exemplar paraphrased context"] = exemplar->paraphrased_context;
    bindings["exemplar keyword"] = exemplar->keyword;
    bindings["exemplar question"] = exemplar->question;
  }
  return render_template(reg.body(Stage::QG, shot), bindings);
}

std::string render_dg(const TemplateRegistry& reg, const GeneratedQuestion& question,
                      const std::string& keyword, Language language, Shot shot,
                      const DgExemplar* exemplar) {
  std::map<std::string, std::string> bindings = {
      {"question", question.text},
      {"keyword", keyword},
      {"language", std::string(language_name(language))}};
  if (shot == Shot::One) {
    if (exemplar == nullptr) {
      throw MissingExemplarError("one-shot distractor prompt needs an exemplar");
    }
    bindings["exemplar question"] = exemplar->question;
    bindings["exemplar correct answer"] = exemplar->correct_answer;
    bindings["exemplar distractors"] = exemplar->distractors[0] + ", " +
                                       exemplar->distractors[1] + ", " +
                                       exemplar->distractors[2];
  }
  return render_template(reg.body(Stage::DG, shot), bindings);
}

std::string render_ssp(const TemplateRegistry& reg, const Context& context) {
  return render_template(reg.body(Stage::SSP, Shot::Zero),
                         {{"context", context.text},
                          {"language", std::string(language_name(context.language))}});
}

}  // namespace mcqforge::prompts
