#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mcqforge/core.hpp"

// Prompt templates for the five generation stages. Template bodies are
// worded in English; the target language is substituted by display name.
// Placeholders are written <like this> and bound at render time.
namespace mcqforge::prompts {

struct UnboundPlaceholderError : Error {
  using Error::Error;
};

struct MissingExemplarError : Error {
  using Error::Error;
};

struct TemplateFormatError : Error {
  using Error::Error;
};

// Worked example prefixed to a one-shot question-generation prompt.
struct QgExemplar {
  std::string paraphrased_context;
  std::string keyword;
  std::string question;
};

// Worked example prefixed to a one-shot distractor-generation prompt.
struct DgExemplar {
  std::string question;
  std::string correct_answer;
  std::array<std::string, 3> distractors;
};

struct ExemplarSet {
  std::optional<QgExemplar> qg;
  std::optional<DgExemplar> dg;
};

// Throws TemplateFormatError when a field is empty or a distractor missing.
void validate_exemplars(const ExemplarSet& ex);

// JSON file keyed by language code: {"en": {"qg": {...}, "dg": {...}}, ...}.
std::map<Language, ExemplarSet> load_exemplars(const std::filesystem::path& path);

// Substitutes bound placeholders in a single pass over the template body.
// Bound values are inserted verbatim and never rescanned. A recognized
// placeholder with no binding raises UnboundPlaceholderError.
std::string render_template(const std::string& body,
                            const std::map<std::string, std::string>& bindings);

class TemplateRegistry {
 public:
  // The built-in template set for all five stages.
  static TemplateRegistry builtin();

  // Override file: one `<stage>.<shot> = <body>` entry per line, `#`
  // comments allowed. Each override must use exactly the placeholder set
  // of the template it replaces.
  void load_overrides(const std::filesystem::path& path);

  // One-shot bodies exist only for the stages that define them (QG, DG);
  // other stages fall back to their zero-shot body.
  const std::string& body(Stage stage, Shot shot) const;

  // Digest over all bodies; stamped into run manifests.
  std::string digest() const;

  // The placeholder names a template for (stage, shot) must bind.
  static std::set<std::string> required_placeholders(Stage stage, Shot shot);

 private:
  std::map<std::pair<Stage, Shot>, std::string> bodies_;
};

std::string render_pg(const TemplateRegistry& reg, const Context& context);
std::string render_ke(const TemplateRegistry& reg, const Paraphrase& paraphrase,
                      Language language);
std::string render_qg(const TemplateRegistry& reg, const Paraphrase& paraphrase,
                      const std::string& keyword, Language language, Shot shot,
                      const QgExemplar* exemplar = nullptr);
std::string render_dg(const TemplateRegistry& reg, const GeneratedQuestion& question,
                      const std::string& keyword, Language language, Shot shot,
                      const DgExemplar* exemplar = nullptr);
std::string render_ssp(const TemplateRegistry& reg, const Context& context);

}  // namespace mcqforge::prompts
