#pragma once

#include <map>
#include <string>

#include "coaeval/core/types.hpp"

namespace coaeval {

/// Task-kind specific wording used to assemble prompts: the context block
/// introducing what the judge will see, the one-line task definition used by
/// aspect generation, and the labels/nouns for source and hypothesis.
struct TaskProfile {
    TaskKind kind = TaskKind::kDialog;
    std::string context_block;     // multi-line introduction
    std::string task_definition;   // single sentence
    std::string source_label;      // block label, e.g. "Conversation"
    std::string hypothesis_label;  // block label, e.g. "Response"
    std::string source_noun;       // in-sentence noun, e.g. "conversation"
    std::string hypothesis_noun;   // in-sentence noun, e.g. "response"
};

const TaskProfile& task_profile(TaskKind kind);

/// The five stage templates for one task kind.
struct TemplateSet {
    std::map<PromptStage, PromptTemplate> templates;

    const PromptTemplate& at(PromptStage stage) const;
};

/// Built-in templates for a task kind.
TemplateSet default_templates(TaskKind kind);

/// Default templates with overrides loaded from a directory. Recognized
/// files: "<stage>.body.txt" replaces the body of that stage's template and
/// "<stage>.<task>.desc.txt" replaces its task-description block.
TemplateSet load_templates(TaskKind kind, const std::string& templates_dir);

/// Spells counts the way prompts do: 1..20 as words, larger values as digits.
std::string count_phrase(int count);

/// Hex digest of a template (stage + task description + body), recorded in
/// run manifests so runs are auditable.
std::string template_digest(const PromptTemplate& tmpl);

/// Throws InvalidInputError unless every placeholder the stage's renderer
/// binds appears exactly once in the body.
void validate_template(const PromptTemplate& tmpl);

}  // namespace coaeval
