#pragma once

#include <string>
#include <vector>

#include "coaeval/llm/backend.hpp"

namespace coaeval {

/// One routing rule for the scripted judge. "*" matches any stage; the
/// instance pattern matches as a substring of the request's instance hint
/// ("*" matches anything, including an empty hint).
struct ScriptRule {
    std::string stage = "*";
    std::string instance = "*";
    std::string text;
};

/// Deterministic judge stand-in serving canned text by (stage, instance)
/// routing rules, first match wins. A request no rule matches is an error,
/// never silently empty.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}

    /// Loads line-delimited rules: one JSON object {"stage","instance","text"}
    /// per line; omitted stage/instance default to "*".
    static ScriptedBackend from_file(const std::string& path);

    void add_rule(std::string stage, std::string instance, std::string text);

    std::string complete(const CompletionRequest& request) override;
    std::string describe() const override { return "scripted"; }

private:
    std::vector<ScriptRule> rules_;
};

}  // namespace coaeval
