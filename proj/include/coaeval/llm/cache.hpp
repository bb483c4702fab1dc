#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "coaeval/llm/backend.hpp"

namespace coaeval {

/// Disk cache for completions: one directory per model, one record per
/// digest. Records hold the request fingerprint and the response text as two
/// structured lines. Corrupt records are skipped with a warning.
class CompletionCache {
public:
    explicit CompletionCache(std::filesystem::path root);

    std::optional<std::string> lookup(const std::string& model, const std::string& digest) const;
    void store(const CompletionRequest& request, const std::string& digest,
               const std::string& text);

    std::vector<std::string> warnings() const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path record_path(const std::string& model, const std::string& digest) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    mutable std::vector<std::string> warnings_;
};

}  // namespace coaeval
