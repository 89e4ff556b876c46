#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <string>
#include <unordered_map>

#include "mcqforge/core.hpp"

// Provider-neutral completion client: retries with backoff, bounded
// concurrency, request pacing, budget guard, and a content-addressed disk
// cache that makes whole runs replayable without provider calls.
namespace mcqforge::llm {

struct ProviderError : Error {
  ProviderError(const std::string& msg, int status_arg, bool retriable_arg)
      : Error(msg), status(status_arg), retriable(retriable_arg) {}
  int status = 0;
  bool retriable = false;
};

struct AuthError : Error {
  using Error::Error;
};

struct TimeoutError : Error {
  using Error::Error;
};

struct BudgetExhaustedError : Error {
  using Error::Error;
};

struct CompletionRequest {
  std::string prompt;
  GenerationParams params;
  std::string model_tag;
  Language language = Language::En;  // metadata for logging only
  // Distinguishes repeated samples of one prompt (and retries that need a
  // fresh sample); folded into the cache key and forwarded to providers.
  std::optional<std::uint64_t> seed;
};

struct CompletionResponse {
  std::string text;  // may be empty; callers must handle
  std::int64_t timestamp_ms = 0;
  std::int64_t latency_ms = 0;
  std::int64_t total_tokens = 0;  // provider-reported usage
  bool cached = false;
  int retries = 0;
};

// Content address over every field that can change the sample.
std::string cache_key(const CompletionRequest& req);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual CompletionResponse complete(const CompletionRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Deterministic offline provider.
//
// Contract: if the whitespace-normalized prompt matches a scripted entry,
// the scripted completion is returned. Otherwise the stage is detected by
// prefix and a synthetic completion is built from slot digests, where
//   slot_digest(prompt, seed, slot) =
//     first 8 hex chars of sha256(normalize_ws(prompt) + US + seed + US + slot)
// with US = 0x1F and seed/slot in decimal (seed 0 when absent):
//   paraphrase prompt  -> "mock-p-<h1>"
//   keyword prompt     -> "mock-k-<h1>, mock-k-<h2>"
//   question prompt    -> "What is mock-q-<h1>?"
//   distractor prompt  -> "1. mock-d-<h1>\n2. mock-d-<h2>\n3. mock-d-<h3>"
//   single-stage prompt-> one question block with options and answer line
//   anything else      -> "mock-completion-<h1>"
// Responses report zero latency and timestamp so runs serialize
// identically on every replay.
class MockProvider : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(std::map<std::string, std::string> scripted);

  static std::string normalize_ws(std::string_view prompt);
  static std::string slot_digest(std::string_view prompt, std::uint64_t seed,
                                 int slot);

  CompletionResponse complete(const CompletionRequest& req) override;
  std::string name() const override { return "mock"; }

  // Test instrumentation.
  void set_delay(std::chrono::milliseconds d) { delay_ = d; }
  int max_observed_in_flight() const { return max_in_flight_.load(); }
  std::int64_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> scripted_;
  std::chrono::milliseconds delay_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::atomic<std::int64_t> calls_{0};
};

// Scripted fixture file: JSONL records {"prompt": ..., "completion": ...}.
std::map<std::string, std::string> load_mock_script(
    const std::filesystem::path& path);

// A provider that fails with the given statuses before succeeding; for
// exercising the retry policy in tests.
class FlakyProvider : public Provider {
 public:
  FlakyProvider(std::shared_ptr<Provider> inner, std::vector<int> failures)
      : inner_(std::move(inner)), failures_(std::move(failures)) {}
  CompletionResponse complete(const CompletionRequest& req) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<Provider> inner_;
  std::vector<int> failures_;
  std::atomic<std::size_t> next_{0};
};

// OpenAI-compatible HTTP provider. Credentials come from the environment
// variable MCQFORGE_API_KEY; the base URL and endpoint style are
// configurable so any compatible server works.
struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com";
  enum class ApiStyle { Completions, Chat } api_style = ApiStyle::Completions;
  std::string endpoint_path;  // defaults by style when empty
  std::string model;          // wire model name; defaults to request model_tag
  std::string api_key_env = "MCQFORGE_API_KEY";
  int timeout_seconds = 60;
};

class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  CompletionResponse complete(const CompletionRequest& req) override;
  std::string name() const override { return "openai-compatible"; }

  // Request body / response extraction, exposed for tests.
  static json build_body(const HttpProviderConfig& cfg, const CompletionRequest& req);
  static std::string extract_text(const HttpProviderConfig& cfg, const json& body);

 private:
  HttpProviderConfig config_;
  std::string api_key_;
};

// Append-friendly cache file: one record per line, last writer wins.
class DiskCache {
 public:
  explicit DiskCache(const std::filesystem::path& path);

  std::optional<CompletionResponse> get(const std::string& key);
  void put(const std::string& key, const CompletionResponse& response);
  std::size_t size() const;

  static void clear(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CompletionResponse> entries_;
};

struct ClientConfig {
  int max_in_flight = 4;
  int max_attempts = 5;
  std::int64_t backoff_base_ms = 250;
  std::int64_t backoff_max_ms = 8000;
  double requests_per_second = 0.0;  // 0 = unpaced
  std::int64_t max_requests = 0;     // 0 = unlimited; counts provider attempts
  std::int64_t max_total_tokens = 0;
  std::uint64_t jitter_seed = 0;
};

class Client {
 public:
  Client(std::shared_ptr<Provider> provider, ClientConfig config,
         std::optional<std::filesystem::path> cache_path);

  // Cache hits return immediately with cached=true and consume no budget,
  // no pacing slot, and no concurrency slot.
  CompletionResponse complete(const CompletionRequest& req);

  std::int64_t provider_calls() const { return provider_calls_.load(); }
  std::int64_t cache_hits() const { return cache_hits_.load(); }
  std::int64_t tokens_used() const { return tokens_used_.load(); }
  DiskCache* cache() { return cache_ ? cache_.get() : nullptr; }

 private:
  std::int64_t backoff_delay_ms(int attempt);
  void pace();

  std::shared_ptr<Provider> provider_;
  ClientConfig config_;
  std::unique_ptr<DiskCache> cache_;
  std::counting_semaphore<256> slots_;
  std::atomic<std::int64_t> provider_calls_{0};
  std::atomic<std::int64_t> cache_hits_{0};
  std::atomic<std::int64_t> tokens_used_{0};
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point next_allowed_{};
  std::mutex jitter_mutex_;
  std::mt19937_64 jitter_rng_;
};

}  // namespace mcqforge::llm
