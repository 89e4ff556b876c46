#pragma once

#include <filesystem>
#include <string>

#include "mcqforge/core.hpp"
#include "mcqforge/llm.hpp"
#include "mcqforge/pipeline.hpp"

// Declarative run description: a flat, typed key-value file with one
// section per module. Unknown sections or keys are errors. Every run
// writes back its fully-resolved configuration.
namespace mcqforge::cli {

struct ConfigError : Error {
  using Error::Error;
};

struct RunConfig {
  // [dataset]
  std::string dataset_name;
  std::string dataset_path;
  std::string dataset_format;  // empty = the dataset's default
  std::string dataset_delimiter = "\t";
  int context_column = 0;
  std::string records_field;
  std::string context_field = "context";

  // [sampling]
  std::int64_t sample_n = 850;
  std::uint64_t sample_seed = 0;

  // [pipeline]
  std::string approach = "msp";
  std::string shot = "zero";
  int paraphrases_per_context = 3;
  int questions_per_paraphrase = 1;
  int distractors_per_question = 3;
  std::string keyword_policy = "first:1";
  std::string language = "en";
  int workers = 4;
  double failure_tolerance = 0.05;
  std::uint64_t pipeline_seed = 0;

  // [provider]
  std::string provider_kind = "mock";  // mock | openai-compatible
  std::string model_tag = "mock-davinci";
  std::string profile = "davinci";  // davinci | gpt4
  int max_tokens = -1;              // -1 = profile default
  double temperature = -1;
  double presence_penalty = -1e30;
  double frequency_penalty = -1e30;
  std::string base_url = "https://api.openai.com";
  std::string api_style = "completions";  // completions | chat
  std::string endpoint_path;
  int timeout_seconds = 60;
  int max_in_flight = 4;
  int max_attempts = 5;
  std::int64_t backoff_base_ms = 250;
  std::int64_t backoff_max_ms = 8000;
  double requests_per_second = 0;
  std::int64_t max_requests = 0;
  std::int64_t max_total_tokens = 0;
  std::string mock_script;
  std::string cache = "on";  // on | off | explicit path

  // [prompts]
  std::string template_overrides;
  std::string exemplars_path;

  // [metrics]
  std::string embedding = "test";  // test | precomputed
  int embedding_dim = 64;
  std::string embedding_path;
  std::string ttest = "student";  // student | welch

  // [output]
  std::string out_dir = "out";

  static RunConfig load(const std::filesystem::path& path);

  // The resolved-config echo written at run start; re-loading it
  // reproduces this configuration exactly.
  std::string to_ini() const;

  GenerationParams generation_params() const;
  llm::ClientConfig client_config() const;

  // Builds the pipeline configuration, loading exemplars from
  // exemplars_path when the shot setting requires them.
  pipeline::PipelineConfig pipeline_config() const;
};

}  // namespace mcqforge::cli
