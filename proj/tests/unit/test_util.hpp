#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "coaeval/llm/backend.hpp"

namespace coaeval::testutil {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(COAEVAL_FIXTURES) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Fresh unique directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("coaeval-" + label + "-" + std::to_string(rd()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& name = "") const {
        return name.empty() ? path_.string() : (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

/// Backend driven by a lambda, for tests that need per-call behavior.
class FnBackend : public Backend {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit FnBackend(Fn fn) : fn_(std::move(fn)) {}

    std::string complete(const CompletionRequest& request) override { return fn_(request); }
    std::string describe() const override { return "fn"; }

private:
    Fn fn_;
};

}  // namespace coaeval::testutil
