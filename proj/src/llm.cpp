#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "mcqforge/llm.hpp"

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::llm {
namespace {

constexpr char kUnitSep = '\x1f';

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json cache_record_to_json(const std::string& key, const CompletionResponse& r) {
  return json{{"key", key},
              {"text", r.text},
              {"timestamp_ms", r.timestamp_ms},
              {"latency_ms", r.latency_ms},
              {"total_tokens", r.total_tokens}};
}

}  // namespace

std::string cache_key(const CompletionRequest& req) {
  std::string blob;
  blob.reserve(req.prompt.size() + 128);
  blob += req.model_tag;
  blob += kUnitSep;
  blob += req.prompt;
  blob += kUnitSep;
  blob += std::to_string(req.params.max_tokens);
  blob += kUnitSep;
  blob += format_double(req.params.temperature);
  blob += kUnitSep;
  blob += format_double(req.params.presence_penalty);
  blob += kUnitSep;
  blob += format_double(req.params.frequency_penalty);
  blob += kUnitSep;
  blob += req.seed ? std::to_string(*req.seed) : "-";
  return sha256_hex(blob);
}

MockProvider::MockProvider(std::map<std::string, std::string> scripted)
    : scripted_(std::move(scripted)) {}

std::string MockProvider::normalize_ws(std::string_view prompt) {
  std::u32string cps = uni::decode_utf8(prompt);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (uni::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return uni::encode_utf8(out);
}

std::string MockProvider::slot_digest(std::string_view prompt,
                                      std::uint64_t seed, int slot) {
  std::string blob = normalize_ws(prompt);
  blob += kUnitSep;
  blob += std::to_string(seed);
  blob += kUnitSep;
  blob += std::to_string(slot);
  return sha256_hex_prefix(blob, 8);
}

CompletionResponse MockProvider::complete(const CompletionRequest& req) {
  calls_.fetch_add(1);
  int cur = in_flight_.fetch_add(1) + 1;
  int prev_max = max_in_flight_.load();
  while (cur > prev_max &&
         !max_in_flight_.compare_exchange_weak(prev_max, cur)) {
  }
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

  CompletionResponse resp;
  resp.timestamp_ms = 0;
  resp.latency_ms = 0;

  const std::string norm = normalize_ws(req.prompt);
  const std::uint64_t seed = req.seed.value_or(0);
  auto h = [&](int slot) { return slot_digest(req.prompt, seed, slot); };

  if (auto it = scripted_.find(norm); it != scripted_.end()) {
    resp.text = it->second;
  } else if (starts_with(norm, "Paraphrase the given context")) {
    resp.text = "mock-p-" + h(1);
  } else if (starts_with(norm, "Extract keywords from the paraphrased context")) {
    resp.text = "mock-k-" + h(1) + ", mock-k-" + h(2);
  } else if (starts_with(norm, "Generate a question based on the paraphrased context") ||
             starts_with(norm, "For the paraphrased context")) {
    resp.text = "What is mock-q-" + h(1) + "?";
  } else if (starts_with(norm, "Create three plausible distractors for the question") ||
             starts_with(norm, "The distractors for the question")) {
    resp.text = "1. mock-d-" + h(1) + "\n2. mock-d-" + h(2) + "\n3. mock-d-" + h(3);
  } else if (starts_with(norm, "Generate MCQs based on the given context")) {
    resp.text = "Question: What is mock-q-" + h(1) + "?\nA) mock-o-" + h(2) +
                "\nB) mock-o-" + h(3) + "\nC) mock-o-" + h(4) + "\nD) mock-o-" +
                h(5) + "\nAnswer: A";
  } else {
    resp.text = "mock-completion-" + h(1);
  }
  resp.total_tokens =
      static_cast<std::int64_t>((req.prompt.size() + resp.text.size()) / 4 + 1);

  in_flight_.fetch_sub(1);
  return resp;
}

std::map<std::string, std::string> load_mock_script(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for_each_jsonl(path, [&out](const json& j, std::size_t line) {
    if (!j.contains("prompt") || !j.contains("completion")) {
      throw FormatError("mock script record needs prompt and completion", line);
    }
    out[MockProvider::normalize_ws(j.at("prompt").get<std::string>())] =
        j.at("completion").get<std::string>();
  });
  return out;
}

CompletionResponse FlakyProvider::complete(const CompletionRequest& req) {
  std::size_t idx = next_.fetch_add(1);
  if (idx < failures_.size()) {
    int status = failures_[idx];
    if (status == 401 || status == 403) {
      throw AuthError("credentials rejected (status " + std::to_string(status) + ")");
    }
    if (status == 0) throw TimeoutError("simulated timeout");
    bool retriable = status == 429 || status >= 500;
    throw ProviderError("simulated provider failure", status, retriable);
  }
  return inner_->complete(req);
}

HttpProvider::HttpProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint_path.empty()) {
    config_.endpoint_path =
        config_.api_style == HttpProviderConfig::ApiStyle::Chat
            ? "/v1/chat/completions"
            : "/v1/completions";
  }
  const char* key = std::getenv(config_.api_key_env.c_str());
  api_key_ = key ? key : "";
}

json HttpProvider::build_body(const HttpProviderConfig& cfg,
                              const CompletionRequest& req) {
  json body{{"model", cfg.model.empty() ? req.model_tag : cfg.model}};
  if (cfg.api_style == HttpProviderConfig::ApiStyle::Chat) {
    body["messages"] =
        json::array({json{{"role", "user"}, {"content", req.prompt}}});
  } else {
    body["prompt"] = req.prompt;
  }
  body["max_tokens"] = req.params.max_tokens;
  body["temperature"] = req.params.temperature;
  body["presence_penalty"] = req.params.presence_penalty;
  body["frequency_penalty"] = req.params.frequency_penalty;
  if (req.seed) body["seed"] = *req.seed;
  return body;
}

std::string HttpProvider::extract_text(const HttpProviderConfig& cfg,
                                       const json& body) {
  if (!body.contains("choices") || !body.at("choices").is_array() ||
      body.at("choices").empty()) {
    throw ProviderError("response has no choices", 200, false);
  }
  const json& choice = body.at("choices").at(0);
  if (cfg.api_style == HttpProviderConfig::ApiStyle::Chat) {
    return choice.at("message").at("content").get<std::string>();
  }
  return choice.at("text").get<std::string>();
}

CompletionResponse HttpProvider::complete(const CompletionRequest& req) {
  if (api_key_.empty()) {
    throw AuthError("no API key: set " + config_.api_key_env);
  }
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  auto started = std::chrono::steady_clock::now();
  auto result = client.Post(config_.endpoint_path, headers,
                            build_body(config_, req).dump(), "application/json");
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();

  if (!result) {
    auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw TimeoutError("request timed out: " + httplib::to_string(err));
    }
    throw ProviderError("transport failure: " + httplib::to_string(err), 0, true);
  }
  if (result->status == 401 || result->status == 403) {
    throw AuthError("credentials rejected (status " +
                    std::to_string(result->status) + ")");
  }
  if (result->status == 429 || result->status >= 500) {
    throw ProviderError("provider returned " + std::to_string(result->status),
                        result->status, true);
  }
  if (result->status != 200) {
    throw ProviderError("provider returned " + std::to_string(result->status),
                        result->status, false);
  }

  json body = json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    throw ProviderError("provider returned malformed JSON", result->status, false);
  }
  CompletionResponse resp;
  resp.text = extract_text(config_, body);
  resp.timestamp_ms = now_unix_ms();
  resp.latency_ms = elapsed;
  if (body.contains("usage") && body.at("usage").contains("total_tokens")) {
    resp.total_tokens = body.at("usage").at("total_tokens").get<std::int64_t>();
  }
  return resp;
}

DiskCache::DiskCache(const std::filesystem::path& path) : path_(path) {
  if (!std::filesystem::exists(path_)) return;
  for_each_jsonl(path_, [this](const json& j, std::size_t) {
    CompletionResponse r;
    r.text = j.at("text").get<std::string>();
    r.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    r.total_tokens = j.value("total_tokens", static_cast<std::int64_t>(0));
    entries_[j.at("key").get<std::string>()] = std::move(r);
  });
}

std::optional<CompletionResponse> DiskCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  CompletionResponse r = it->second;
  r.cached = true;
  return r;
}

void DiskCache::put(const std::string& key, const CompletionResponse& response) {
  std::lock_guard lock(mutex_);
  CompletionResponse stored = response;
  stored.cached = false;
  stored.retries = 0;
  entries_[key] = stored;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to cache " + path_.string());
  out << cache_record_to_json(key, stored).dump() << '\n';
}

std::size_t DiskCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void DiskCache::clear(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

Client::Client(std::shared_ptr<Provider> provider, ClientConfig config,
               std::optional<std::filesystem::path> cache_path)
    : provider_(std::move(provider)),
      config_(config),
      slots_(std::max(1, std::min(config.max_in_flight, 256))),
      jitter_rng_(config.jitter_seed) {
  if (cache_path) cache_ = std::make_unique<DiskCache>(*cache_path);
}

std::int64_t Client::backoff_delay_ms(int attempt) {
  std::int64_t base = config_.backoff_base_ms << (attempt - 1);
  if (base > config_.backoff_max_ms) base = config_.backoff_max_ms;
  std::lock_guard lock(jitter_mutex_);
  std::uint64_t jitter = jitter_rng_() % (static_cast<std::uint64_t>(base) / 2 + 1);
  return base / 2 + static_cast<std::int64_t>(jitter);
}

void Client::pace() {
  if (config_.requests_per_second <= 0) return;
  auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / config_.requests_per_second));
  std::chrono::steady_clock::time_point wait_until;
  {
    std::lock_guard lock(pace_mutex_);
    auto now = std::chrono::steady_clock::now();
    if (next_allowed_ < now) next_allowed_ = now;
    wait_until = next_allowed_;
    next_allowed_ += interval;
  }
  std::this_thread::sleep_until(wait_until);
}

CompletionResponse Client::complete(const CompletionRequest& req) {
  if (uni::trim(req.prompt).empty()) throw Error("empty prompt");
  if (req.params.max_tokens < 1) throw Error("max_tokens must be >= 1");

  const std::string key = cache_key(req);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      cache_hits_.fetch_add(1);
      return *hit;
    }
  }

  int attempt = 0;
  while (true) {
    ++attempt;
    if (config_.max_requests > 0 &&
        provider_calls_.load() >= config_.max_requests) {
      throw BudgetExhaustedError("request budget exhausted (" +
                                 std::to_string(config_.max_requests) + ")");
    }
    if (config_.max_total_tokens > 0 &&
        tokens_used_.load() >= config_.max_total_tokens) {
      throw BudgetExhaustedError("token budget exhausted (" +
                                 std::to_string(config_.max_total_tokens) + ")");
    }
    pace();
    try {
      CompletionResponse resp;
      {
        slots_.acquire();
        provider_calls_.fetch_add(1);
        struct Release {
          std::counting_semaphore<256>* s;
          ~Release() { s->release(); }
        } release{&slots_};
        resp = provider_->complete(req);
      }
      tokens_used_.fetch_add(resp.total_tokens);
      resp.cached = false;
      resp.retries = attempt - 1;
      if (cache_) cache_->put(key, resp);
      return resp;
    } catch (const AuthError&) {
      throw;
    } catch (const BudgetExhaustedError&) {
      throw;
    } catch (const Error& e) {
      bool retriable = false;
      if (dynamic_cast<const TimeoutError*>(&e) != nullptr) {
        retriable = true;
      } else if (const auto* pe = dynamic_cast<const ProviderError*>(&e)) {
        retriable = pe->retriable;
      }
      if (!retriable || attempt >= config_.max_attempts) throw;
      std::this_thread::sleep_for(
          std::chrono::milliseconds(backoff_delay_ms(attempt)));
    }
  }
}

}  // namespace mcqforge::llm
