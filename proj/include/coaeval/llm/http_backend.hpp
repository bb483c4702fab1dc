#pragma once

#include <string>

#include "coaeval/llm/backend.hpp"

namespace coaeval {

/// OpenAI-compatible chat-completions backend. Sends the rendered prompt as
/// a single user message and reads the first choice's message content.
/// Authorization comes from the environment variable named in the config.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config);

    std::string complete(const CompletionRequest& request) override;
    std::string describe() const override { return "http(" + config_.base_url + ")"; }

private:
    BackendConfig config_;
    std::string api_key_;
    std::string scheme_host_;   // scheme://host[:port]
    std::string path_prefix_;   // e.g. "/v1"
};

}  // namespace coaeval
