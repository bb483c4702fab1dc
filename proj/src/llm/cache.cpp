#include "coaeval/llm/cache.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace coaeval {

namespace {

std::string sanitize_dir_name(const std::string& model) {
    std::string out = model;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out.empty() ? std::string("_") : out;
}

}  // namespace

CompletionCache::CompletionCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path CompletionCache::record_path(const std::string& model,
                                                   const std::string& digest) const {
    return root_ / sanitize_dir_name(model) / digest;
}

std::optional<std::string> CompletionCache::lookup(const std::string& model,
                                                   const std::string& digest) const {
    const std::filesystem::path path = record_path(model, digest);
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    std::string fingerprint_line, text_line;
    if (!std::getline(in, fingerprint_line) || !std::getline(in, text_line)) {
        std::lock_guard<std::mutex> lock(mutex_);
        warnings_.push_back("skipping truncated cache record " + path.string());
        return std::nullopt;
    }
    try {
        const auto fingerprint = nlohmann::json::parse(fingerprint_line);
        if (fingerprint.value("digest", "") != digest) {
            throw ParseError("digest mismatch");
        }
        const auto payload = nlohmann::json::parse(text_line);
        return payload.at("text").get<std::string>();
    } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(mutex_);
        warnings_.push_back("skipping corrupt cache record " + path.string() + ": " + ex.what());
        return std::nullopt;
    }
}

void CompletionCache::store(const CompletionRequest& request, const std::string& digest,
                            const std::string& text) {
    const std::filesystem::path path = record_path(request.model, digest);
    std::filesystem::create_directories(path.parent_path());

    nlohmann::json fingerprint;
    fingerprint["digest"] = digest;
    fingerprint["model"] = request.model;
    fingerprint["temperature"] = request.temperature;
    fingerprint["n"] = request.n;
    if (request.max_tokens) {
        fingerprint["max_tokens"] = *request.max_tokens;
    }
    fingerprint["prompt_bytes"] = request.prompt.size();
    nlohmann::json payload;
    payload["text"] = text;

    // Write-then-rename so concurrent writers of the same digest (identical
    // content by construction) never expose a half-written record.
    std::ostringstream suffix;
    suffix << ".tmp." << std::this_thread::get_id();
    const std::filesystem::path tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << fingerprint.dump() << '\n' << payload.dump() << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
    }
}

std::vector<std::string> CompletionCache::warnings() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return warnings_;
}

}  // namespace coaeval
