#include "coaeval/llm/scripted.hpp"

#include <fstream>

#include <json.hpp>

namespace coaeval {

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open script file: " + path);
    }
    std::vector<ScriptRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto record = nlohmann::json::parse(line);
            ScriptRule rule;
            rule.stage = record.value("stage", "*");
            rule.instance = record.value("instance", "*");
            rule.text = record.at("text").get<std::string>();
            rules.push_back(std::move(rule));
        } catch (const std::exception& ex) {
            throw ConfigError("bad script rule at " + path + ":" + std::to_string(line_no) +
                              ": " + ex.what());
        }
    }
    return ScriptedBackend(std::move(rules));
}

void ScriptedBackend::add_rule(std::string stage, std::string instance, std::string text) {
    rules_.push_back(ScriptRule{std::move(stage), std::move(instance), std::move(text)});
}

std::string ScriptedBackend::complete(const CompletionRequest& request) {
    for (const ScriptRule& rule : rules_) {
        if (rule.stage != "*" && rule.stage != request.stage) {
            continue;
        }
        if (rule.instance != "*" &&
            request.instance_hint.find(rule.instance) == std::string::npos) {
            continue;
        }
        return rule.text;
    }
    throw NoScriptMatchError("no scripted rule matches stage='" + request.stage +
                             "' instance='" + request.instance_hint + "'");
}

}  // namespace coaeval
