#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "coaeval/errors.hpp"

namespace coaeval {

/// One chat-completion call. The routing tags at the bottom steer scripted
/// backends in tests; they are never sent over the wire and do not enter the
/// cache identity.
struct CompletionRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int n = 1;
    std::optional<int> max_tokens;
    double timeout_seconds = 60.0;

    std::string stage;
    std::string instance_hint;

    void validate() const;
};

struct CompletionResult {
    std::string text;
    bool from_cache = false;
    int attempts = 0;  // 0 for cache hits
    std::optional<std::chrono::milliseconds> latency;
};

struct RetryPolicy {
    int max_attempts = 3;
    double base_backoff_seconds = 0.5;
    double backoff_multiplier = 2.0;
};

enum class BackendKind {
    kHttp,
    kScripted,
    kReplay,
};

BackendKind backend_kind_from_string(const std::string& text);
std::string to_string(BackendKind kind);

struct BackendConfig {
    BackendKind kind = BackendKind::kScripted;
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-3.5-turbo";
    std::string api_key_env_name = "COA_EVAL_API_KEY";
    int max_concurrency = 4;
    RetryPolicy retry;
    std::string cache_dir;     // empty disables the disk cache
    std::string script_path;   // scripted kind
    std::string replay_path;   // replay kind

    void validate() const;
};

/// Deterministic digest over (model, prompt, temperature, n, max_tokens).
/// Insensitive to timeout and routing tags, stable across process restarts.
std::string cache_key(const CompletionRequest& request);

/// A judge endpoint: returns completion text for a request or throws.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
    virtual std::string describe() const = 0;
};

/// Decorator counting calls and concurrent in-flight requests, for tests
/// asserting call economy and concurrency bounds.
class CountingBackend : public Backend {
public:
    explicit CountingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

    std::string complete(const CompletionRequest& request) override;
    std::string describe() const override { return "counting(" + inner_->describe() + ")"; }

    long call_count() const { return calls_.load(); }
    long max_in_flight() const { return max_in_flight_.load(); }
    long stage_call_count(const std::string& stage) const;

private:
    std::shared_ptr<Backend> inner_;
    std::atomic<long> calls_{0};
    std::atomic<long> in_flight_{0};
    std::atomic<long> max_in_flight_{0};
    mutable std::mutex stage_mutex_;
    std::map<std::string, long> stage_calls_;
};

}  // namespace coaeval
