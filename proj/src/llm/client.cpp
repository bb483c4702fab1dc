#include "coaeval/llm/client.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "coaeval/llm/http_backend.hpp"
#include "coaeval/llm/scripted.hpp"

namespace coaeval {

namespace {

class GateGuard {
public:
    GateGuard(std::mutex& mutex, std::condition_variable& cv, int& in_flight, int limit)
        : mutex_(mutex), cv_(cv), in_flight_(in_flight) {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < limit; });
        ++in_flight_;
    }

    ~GateGuard() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::mutex& mutex_;
    std::condition_variable& cv_;
    int& in_flight_;
};

}  // namespace

std::shared_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
        case BackendKind::kScripted:
            if (config.script_path.empty()) {
                throw ConfigError("scripted backend needs script_path");
            }
            return std::make_shared<ScriptedBackend>(
                ScriptedBackend::from_file(config.script_path));
        case BackendKind::kReplay:
            if (config.replay_path.empty()) {
                throw ConfigError("replay backend needs replay_path");
            }
            return std::make_shared<ReplayBackend>(ReplayBackend::from_file(config.replay_path));
        case BackendKind::kHttp:
            return std::make_shared<HttpBackend>(config);
    }
    throw ConfigError("unhandled backend kind");
}

CompletionClient::CompletionClient(std::shared_ptr<Backend> backend, BackendConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
    config_.validate();
    if (!backend_) {
        throw ConfigError("completion client needs a backend");
    }
}

CompletionResult CompletionClient::complete(const CompletionRequest& request, bool bypass_cache) {
    request.validate();
    const std::string digest = cache_key(request);

    if (!bypass_cache && cache_) {
        if (auto cached = cache_->lookup(request.model, digest)) {
            if (recorder_) {
                recorder_->record(digest, request.prompt, *cached);
            }
            CompletionResult result;
            result.text = std::move(*cached);
            result.from_cache = true;
            result.attempts = 0;
            return result;
        }
    }

    GateGuard gate(gate_mutex_, gate_cv_, in_flight_, config_.max_concurrency);

    const auto started = std::chrono::steady_clock::now();
    std::string text;
    int attempt = 0;
    for (;;) {
        ++attempt;
        live_calls_.fetch_add(1);
        try {
            text = backend_->complete(request);
            break;
        } catch (const BackendError& error) {
            if (!error.retryable() || attempt >= config_.retry.max_attempts) {
                if (error.retryable()) {
                    throw BackendUnavailableError(
                        "backend unavailable after " + std::to_string(attempt) +
                        " attempts: " + error.what());
                }
                throw;
            }
            const double backoff =
                config_.retry.base_backoff_seconds *
                std::pow(config_.retry.backoff_multiplier, static_cast<double>(attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        }
    }

    CompletionResult result;
    result.text = std::move(text);
    result.from_cache = false;
    result.attempts = attempt;
    result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (cache_) {
        cache_->store(request, digest, result.text);
    }
    if (recorder_) {
        recorder_->record(digest, request.prompt, result.text);
    }
    return result;
}

}  // namespace coaeval
