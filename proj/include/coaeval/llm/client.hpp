#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>

#include "coaeval/llm/backend.hpp"
#include "coaeval/llm/cache.hpp"
#include "coaeval/llm/transcript.hpp"

namespace coaeval {

/// Builds the backend a config describes (scripted, replay, or http).
std::shared_ptr<Backend> make_backend(const BackendConfig& config);

/// Judge access point shared by every pipeline stage: consults the cache,
/// performs the call under the concurrency limit, retries transient failures,
/// and records transcripts. Shareable across worker threads.
class CompletionClient {
public:
    CompletionClient(std::shared_ptr<Backend> backend, BackendConfig config);

    void attach_cache(std::shared_ptr<CompletionCache> cache) { cache_ = std::move(cache); }
    void attach_recorder(std::shared_ptr<TranscriptWriter> recorder) {
        recorder_ = std::move(recorder);
    }

    /// bypass_cache skips the lookup (used for parse-failure re-queries) but
    /// still writes the fresh result back.
    CompletionResult complete(const CompletionRequest& request, bool bypass_cache = false);

    long live_call_count() const { return live_calls_.load(); }
    const BackendConfig& config() const { return config_; }

private:
    std::shared_ptr<Backend> backend_;
    BackendConfig config_;
    std::shared_ptr<CompletionCache> cache_;
    std::shared_ptr<TranscriptWriter> recorder_;
    std::atomic<long> live_calls_{0};

    std::mutex gate_mutex_;
    std::condition_variable gate_cv_;
    int in_flight_ = 0;
};

}  // namespace coaeval
