#pragma once

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "coaeval/llm/backend.hpp"

namespace coaeval {

/// One recorded completion. Transcripts are line-delimited JSON objects
/// {"digest","prompt","text"} so test fixtures can be edited by hand.
struct TranscriptEntry {
    std::string digest;
    std::string prompt;
    std::string text;
};

std::vector<TranscriptEntry> load_transcript(const std::string& path);

/// Appends completions to a transcript file, one record per digest.
/// Reopening an existing transcript continues it without duplicating digests.
class TranscriptWriter {
public:
    explicit TranscriptWriter(std::string path);

    void record(const std::string& digest, const std::string& prompt, const std::string& text);

private:
    std::string path_;
    std::mutex mutex_;
    std::set<std::string> seen_;
};

/// Serves exactly the completions of one transcript, by request digest.
/// Unknown digests are an error naming the digest.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const std::vector<TranscriptEntry>& entries);
    static ReplayBackend from_file(const std::string& path);

    std::string complete(const CompletionRequest& request) override;
    std::string describe() const override { return "replay"; }

    std::size_t size() const { return by_digest_.size(); }

private:
    std::map<std::string, std::string> by_digest_;
};

}  // namespace coaeval
