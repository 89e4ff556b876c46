#include "mcqforge/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mcqforge/unicode.hpp"

namespace mcqforge::cli {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Setter {
  std::function<void(RunConfig&, const std::string&)> apply;
};

template <typename T>
T parse_number(const std::string& value, const std::string& where) {
  std::istringstream ss(value);
  T out;
  if (!(ss >> out)) throw ConfigError("bad numeric value for " + where + ": " + value);
  std::string extra;
  if (ss >> extra) throw ConfigError("trailing garbage in " + where + ": " + value);
  return out;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> kSetters = [] {
    std::map<std::string, Setter> m;
    auto str = [&m](const char* key, std::string RunConfig::* field) {
      m[key] = Setter{[field](RunConfig& c, const std::string& v) { c.*field = v; }};
    };
    auto num = [&m](const char* key, auto RunConfig::* field) {
      m[key] = Setter{[field, key = std::string(key)](RunConfig& c, const std::string& v) {
        c.*field = parse_number<std::decay_t<decltype(c.*field)>>(v, key);
      }};
    };
    str("dataset.name", &RunConfig::dataset_name);
    str("dataset.path", &RunConfig::dataset_path);
    str("dataset.format", &RunConfig::dataset_format);
    m["dataset.delimiter"] = Setter{[](RunConfig& c, const std::string& v) {
      c.dataset_delimiter = v == "\\t" ? "\t" : v;
      if (c.dataset_delimiter.size() != 1) {
        throw ConfigError("dataset.delimiter must be one character");
      }
    }};
    num("dataset.context_column", &RunConfig::context_column);
    str("dataset.records_field", &RunConfig::records_field);
    str("dataset.context_field", &RunConfig::context_field);

    num("sampling.n", &RunConfig::sample_n);
    num("sampling.seed", &RunConfig::sample_seed);

    str("pipeline.approach", &RunConfig::approach);
    str("pipeline.shot", &RunConfig::shot);
    num("pipeline.paraphrases_per_context", &RunConfig::paraphrases_per_context);
    num("pipeline.questions_per_paraphrase", &RunConfig::questions_per_paraphrase);
    num("pipeline.distractors_per_question", &RunConfig::distractors_per_question);
    str("pipeline.keyword_policy", &RunConfig::keyword_policy);
    str("pipeline.language", &RunConfig::language);
    num("pipeline.workers", &RunConfig::workers);
    num("pipeline.failure_tolerance", &RunConfig::failure_tolerance);
    num("pipeline.seed", &RunConfig::pipeline_seed);

    str("provider.kind", &RunConfig::provider_kind);
    str("provider.model", &RunConfig::model_tag);
    str("provider.profile", &RunConfig::profile);
    num("provider.max_tokens", &RunConfig::max_tokens);
    num("provider.temperature", &RunConfig::temperature);
    num("provider.presence_penalty", &RunConfig::presence_penalty);
    num("provider.frequency_penalty", &RunConfig::frequency_penalty);
    str("provider.base_url", &RunConfig::base_url);
    str("provider.api_style", &RunConfig::api_style);
    str("provider.endpoint_path", &RunConfig::endpoint_path);
    num("provider.timeout_seconds", &RunConfig::timeout_seconds);
    num("provider.max_in_flight", &RunConfig::max_in_flight);
    num("provider.max_attempts", &RunConfig::max_attempts);
    num("provider.backoff_base_ms", &RunConfig::backoff_base_ms);
    num("provider.backoff_max_ms", &RunConfig::backoff_max_ms);
    num("provider.requests_per_second", &RunConfig::requests_per_second);
    num("provider.max_requests", &RunConfig::max_requests);
    num("provider.max_total_tokens", &RunConfig::max_total_tokens);
    str("provider.mock_script", &RunConfig::mock_script);
    str("provider.cache", &RunConfig::cache);

    str("prompts.overrides", &RunConfig::template_overrides);
    str("prompts.exemplars", &RunConfig::exemplars_path);

    str("metrics.embedding", &RunConfig::embedding);
    num("metrics.embedding_dim", &RunConfig::embedding_dim);
    str("metrics.embedding_path", &RunConfig::embedding_path);
    str("metrics.ttest", &RunConfig::ttest);

    str("output.dir", &RunConfig::out_dir);
    return m;
  }();
  return kSetters;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());

  RunConfig config;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = uni::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      }
      section = uni::trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = uni::trim(t.substr(0, eq));
    std::string value = uni::trim(t.substr(eq + 1));
    std::string qualified = section.empty() ? key : section + "." + key;
    auto it = setters().find(qualified);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        qualified + "'");
    }
    it->second.apply(config, value);
  }
  return config;
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  out << "[dataset]\n";
  out << "name = " << dataset_name << "\n";
  out << "path = " << dataset_path << "\n";
  out << "format = " << dataset_format << "\n";
  out << "delimiter = " << (dataset_delimiter == "\t" ? "\\t" : dataset_delimiter) << "\n";
  out << "context_column = " << context_column << "\n";
  out << "records_field = " << records_field << "\n";
  out << "context_field = " << context_field << "\n";
  out << "\n[sampling]\n";
  out << "n = " << sample_n << "\n";
  out << "seed = " << sample_seed << "\n";
  out << "\n[pipeline]\n";
  out << "approach = " << approach << "\n";
  out << "shot = " << shot << "\n";
  out << "paraphrases_per_context = " << paraphrases_per_context << "\n";
  out << "questions_per_paraphrase = " << questions_per_paraphrase << "\n";
  out << "distractors_per_question = " << distractors_per_question << "\n";
  out << "keyword_policy = " << keyword_policy << "\n";
  out << "language = " << language << "\n";
  out << "workers = " << workers << "\n";
  out << "failure_tolerance = " << format_double(failure_tolerance) << "\n";
  out << "seed = " << pipeline_seed << "\n";
  out << "\n[provider]\n";
  out << "kind = " << provider_kind << "\n";
  out << "model = " << model_tag << "\n";
  out << "profile = " << profile << "\n";
  out << "max_tokens = " << max_tokens << "\n";
  out << "temperature = " << format_double(temperature) << "\n";
  out << "presence_penalty = " << format_double(presence_penalty) << "\n";
  out << "frequency_penalty = " << format_double(frequency_penalty) << "\n";
  out << "base_url = " << base_url << "\n";
  out << "api_style = " << api_style << "\n";
  out << "endpoint_path = " << endpoint_path << "\n";
  out << "timeout_seconds = " << timeout_seconds << "\n";
  out << "max_in_flight = " << max_in_flight << "\n";
  out << "max_attempts = " << max_attempts << "\n";
  out << "backoff_base_ms = " << backoff_base_ms << "\n";
  out << "backoff_max_ms = " << backoff_max_ms << "\n";
  out << "requests_per_second = " << format_double(requests_per_second) << "\n";
  out << "max_requests = " << max_requests << "\n";
  out << "max_total_tokens = " << max_total_tokens << "\n";
  out << "mock_script = " << mock_script << "\n";
  out << "cache = " << cache << "\n";
  out << "\n[prompts]\n";
  out << "overrides = " << template_overrides << "\n";
  out << "exemplars = " << exemplars_path << "\n";
  out << "\n[metrics]\n";
  out << "embedding = " << embedding << "\n";
  out << "embedding_dim = " << embedding_dim << "\n";
  out << "embedding_path = " << embedding_path << "\n";
  out << "ttest = " << ttest << "\n";
  out << "\n[output]\n";
  out << "dir = " << out_dir << "\n";
  return out.str();
}

GenerationParams RunConfig::generation_params() const {
  GenerationParams params;
  if (profile == "davinci") {
    params = davinci_params();
  } else if (profile == "gpt4") {
    params = gpt4_params();
  } else {
    throw ConfigError("unknown provider profile: " + profile);
  }
  if (max_tokens >= 0) params.max_tokens = max_tokens;
  if (temperature >= 0) params.temperature = temperature;
  if (presence_penalty > -1e29) params.presence_penalty = presence_penalty;
  if (frequency_penalty > -1e29) params.frequency_penalty = frequency_penalty;
  return params;
}

llm::ClientConfig RunConfig::client_config() const {
  llm::ClientConfig c;
  c.max_in_flight = max_in_flight;
  c.max_attempts = max_attempts;
  c.backoff_base_ms = backoff_base_ms;
  c.backoff_max_ms = backoff_max_ms;
  c.requests_per_second = requests_per_second;
  c.max_requests = max_requests;
  c.max_total_tokens = max_total_tokens;
  c.jitter_seed = pipeline_seed;
  return c;
}

pipeline::PipelineConfig RunConfig::pipeline_config() const {
  pipeline::PipelineConfig p;
  p.approach = parse_approach(approach);
  p.shot = parse_shot(shot);
  p.paraphrases_per_context = paraphrases_per_context;
  p.questions_per_paraphrase = questions_per_paraphrase;
  p.distractors_per_question = distractors_per_question;
  p.keyword_policy = pipeline::parse_keyword_policy(keyword_policy);
  p.language = parse_language(language);
  p.model_tag = model_tag;
  p.params = generation_params();
  p.seed = pipeline_seed;
  p.workers = workers;
  p.failure_tolerance = failure_tolerance;
  if (p.shot == Shot::One) {
    if (exemplars_path.empty()) {
      throw ConfigError("one-shot runs need prompts.exemplars (an exemplar file)");
    }
    p.exemplars = prompts::load_exemplars(exemplars_path);
  }
  pipeline::validate_config(p);
  return p;
}

}  // namespace mcqforge::cli
