#include "coaeval/llm/transcript.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace coaeval {

std::vector<TranscriptEntry> load_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open transcript: " + path);
    }
    std::vector<TranscriptEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto record = nlohmann::json::parse(line);
            TranscriptEntry entry;
            entry.digest = record.at("digest").get<std::string>();
            entry.prompt = record.value("prompt", "");
            entry.text = record.at("text").get<std::string>();
            entries.push_back(std::move(entry));
        } catch (const std::exception& ex) {
            throw ConfigError("bad transcript record at " + path + ":" +
                              std::to_string(line_no) + ": " + ex.what());
        }
    }
    return entries;
}

TranscriptWriter::TranscriptWriter(std::string path) : path_(std::move(path)) {
    const auto parent = std::filesystem::path(path_).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    if (std::filesystem::exists(path_)) {
        for (const TranscriptEntry& entry : load_transcript(path_)) {
            seen_.insert(entry.digest);
        }
    }
}

void TranscriptWriter::record(const std::string& digest, const std::string& prompt,
                              const std::string& text) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!seen_.insert(digest).second) {
        return;
    }
    nlohmann::json record;
    record["digest"] = digest;
    record["prompt"] = prompt;
    record["text"] = text;
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        throw ConfigError("cannot append to transcript: " + path_);
    }
    out << record.dump() << '\n';
}

ReplayBackend::ReplayBackend(const std::vector<TranscriptEntry>& entries) {
    for (const TranscriptEntry& entry : entries) {
        by_digest_[entry.digest] = entry.text;
    }
}

ReplayBackend ReplayBackend::from_file(const std::string& path) {
    return ReplayBackend(load_transcript(path));
}

std::string ReplayBackend::complete(const CompletionRequest& request) {
    const std::string digest = cache_key(request);
    const auto it = by_digest_.find(digest);
    if (it == by_digest_.end()) {
        throw ReplayMissError("transcript has no entry for digest " + digest, digest);
    }
    return it->second;
}

}  // namespace coaeval
