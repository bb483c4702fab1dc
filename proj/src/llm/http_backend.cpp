#include "coaeval/llm/http_backend.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace coaeval {

namespace {

bool retryable_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

std::string body_excerpt(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) {
        return body;
    }
    return body.substr(0, kMax) + "...";
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
    const char* key = std::getenv(config_.api_key_env_name.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("environment variable " + config_.api_key_env_name +
                          " is not set; it must hold the API key for " + config_.base_url);
    }
    api_key_ = key;

    // Split "scheme://host[:port]/prefix" into the client target and the
    // path prefix prepended to every endpoint.
    const std::string& url = config_.base_url;
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("base_url must start with http:// or https://: " + url);
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_ = url;
        path_prefix_.clear();
    } else {
        scheme_host_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') {
            path_prefix_.pop_back();
        }
    }
}

std::string HttpBackend::complete(const CompletionRequest& request) {
    request.validate();

    nlohmann::json body;
    body["model"] = request.model;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    body["n"] = request.n;
    if (request.max_tokens) {
        body["max_tokens"] = *request.max_tokens;
    }

    httplib::Client client(scheme_host_);
    const time_t seconds = static_cast<time_t>(request.timeout_seconds);
    const time_t microseconds = static_cast<time_t>(
        (request.timeout_seconds - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, microseconds);
    client.set_read_timeout(seconds, microseconds);
    client.set_write_timeout(seconds, microseconds);

    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    const auto result = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                                    "application/json");
    if (!result) {
        throw BackendError("transport failure contacting " + scheme_host_ + ": " +
                               httplib::to_string(result.error()),
                           /*retryable=*/true);
    }
    if (result->status < 200 || result->status >= 300) {
        if (retryable_status(result->status)) {
            throw BackendError("judge endpoint returned status " +
                                   std::to_string(result->status),
                               /*retryable=*/true, result->status);
        }
        throw RequestRejectedError("judge endpoint rejected request with status " +
                                       std::to_string(result->status),
                                   result->status, body_excerpt(result->body));
    }

    try {
        const auto payload = nlohmann::json::parse(result->body);
        // n > 1 responses carry several choices; only the first sample is used.
        return payload.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& ex) {
        throw BackendError(std::string("malformed completion response: ") + ex.what(),
                           /*retryable=*/false, result->status);
    }
}

}  // namespace coaeval
