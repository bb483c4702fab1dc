#include "coaeval/llm/backend.hpp"

#include <cstdio>

#include <openssl/sha.h>

namespace coaeval {

void CompletionRequest::validate() const {
    if (prompt.empty()) {
        throw InvalidInputError("completion request has an empty prompt");
    }
    if (temperature < 0.0) {
        throw InvalidInputError("completion temperature must be >= 0");
    }
    if (n < 1) {
        throw InvalidInputError("completion sample count n must be >= 1");
    }
}

BackendKind backend_kind_from_string(const std::string& text) {
    if (text == "http") return BackendKind::kHttp;
    if (text == "scripted") return BackendKind::kScripted;
    if (text == "replay") return BackendKind::kReplay;
    throw ConfigError("unknown backend kind: '" + text + "'");
}

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::kHttp: return "http";
        case BackendKind::kScripted: return "scripted";
        case BackendKind::kReplay: return "replay";
    }
    return "scripted";
}

void BackendConfig::validate() const {
    if (max_concurrency < 1) {
        throw ConfigError("max_concurrency must be >= 1");
    }
    if (retry.max_attempts < 1) {
        throw ConfigError("retry.max_attempts must be >= 1");
    }
    if (model.empty()) {
        throw ConfigError("backend model must be set");
    }
}

std::string cache_key(const CompletionRequest& request) {
    std::string canonical;
    canonical.reserve(request.prompt.size() + request.model.size() + 64);
    canonical += "model=";
    canonical += request.model;
    canonical += '\x1e';
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "temperature=%.17g", request.temperature);
    canonical += buffer;
    canonical += '\x1e';
    std::snprintf(buffer, sizeof(buffer), "n=%d", request.n);
    canonical += buffer;
    canonical += '\x1e';
    if (request.max_tokens) {
        std::snprintf(buffer, sizeof(buffer), "max_tokens=%d", *request.max_tokens);
        canonical += buffer;
    } else {
        canonical += "max_tokens=none";
    }
    canonical += '\x1e';
    canonical += "prompt=";
    canonical += request.prompt;

    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(canonical.data()), canonical.size(), digest);
    static const char* kHex = "0123456789abcdef";
    std::string hex(SHA256_DIGEST_LENGTH * 2, '0');
    for (int i = 0; i < SHA256_DIGEST_LENGTH; ++i) {
        hex[2 * i] = kHex[digest[i] >> 4];
        hex[2 * i + 1] = kHex[digest[i] & 0x0f];
    }
    return hex;
}

std::string CountingBackend::complete(const CompletionRequest& request) {
    calls_.fetch_add(1);
    {
        std::lock_guard<std::mutex> lock(stage_mutex_);
        ++stage_calls_[request.stage];
    }
    const long now_in_flight = in_flight_.fetch_add(1) + 1;
    long observed_max = max_in_flight_.load();
    while (now_in_flight > observed_max &&
           !max_in_flight_.compare_exchange_weak(observed_max, now_in_flight)) {
    }
    try {
        std::string text = inner_->complete(request);
        in_flight_.fetch_sub(1);
        return text;
    } catch (...) {
        in_flight_.fetch_sub(1);
        throw;
    }
}

long CountingBackend::stage_call_count(const std::string& stage) const {
    std::lock_guard<std::mutex> lock(stage_mutex_);
    const auto it = stage_calls_.find(stage);
    return it == stage_calls_.end() ? 0 : it->second;
}

}  // namespace coaeval
