#include "coaeval/prompt/render.hpp"

#include <cstdio>

#include <openssl/sha.h>

namespace coaeval {

namespace {

std::string short_digest(const std::string& value) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(value.data()), value.size(), digest);
    static const char* kHex = "0123456789abcdef";
    std::string hex(12, '0');
    for (int i = 0; i < 6; ++i) {
        hex[2 * i] = kHex[digest[i] >> 4];
        hex[2 * i + 1] = kHex[digest[i] & 0x0f];
    }
    return hex;
}

std::string format_scale_bound(double bound) {
    // Scale bounds print as integers when integral ("1-5"), else with the
    // shortest decimal form.
    if (bound == static_cast<double>(static_cast<long>(bound))) {
        return std::to_string(static_cast<long>(bound));
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", bound);
    return buffer;
}

/// One-pass substitution: replaces {{name}} with its binding, never rescans
/// substituted values, and rejects any marker without a binding.
std::string substitute(const std::string& body,
                       const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(body.size() + 256);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const std::size_t open = body.find("{{", pos);
        if (open == std::string::npos) {
            out.append(body, pos, body.size() - pos);
            break;
        }
        out.append(body, pos, open - pos);
        const std::size_t close = body.find("}}", open + 2);
        if (close == std::string::npos) {
            throw RenderError("unterminated placeholder marker near offset " +
                              std::to_string(open));
        }
        const std::string name = body.substr(open + 2, close - open - 2);
        const auto it = bindings.find(name);
        if (it == bindings.end()) {
            throw RenderError("unresolved placeholder {{" + name + "}}");
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

std::map<std::string, std::string> digest_bindings(
    const std::map<std::string, std::string>& bindings) {
    std::map<std::string, std::string> digests;
    for (const auto& [name, value] : bindings) {
        digests[name] = short_digest(value);
    }
    return digests;
}

void require_stage(const PromptTemplate& tmpl, PromptStage expected) {
    if (tmpl.stage != expected) {
        throw RenderError("template stage " + to_string(tmpl.stage) + " used where " +
                          to_string(expected) + " was expected");
    }
}

void bind_instance_blocks(std::map<std::string, std::string>& bindings,
                          const EvaluationInstance& instance, const TaskProfile& profile) {
    if (instance.source.empty()) {
        throw RenderError("instance '" + instance.id + "' is missing field 'source' required "
                          "by task " + to_string(profile.kind));
    }
    if (instance.hypothesis.empty()) {
        throw RenderError("instance '" + instance.id + "' is missing field 'hypothesis'");
    }
    bindings["source"] = instance.source;
    bindings["hypothesis"] = instance.hypothesis;
    if (instance.fact && !instance.fact->empty()) {
        bindings["fact_block"] = "Fact:\n" + *instance.fact + "\n\n";
        bindings["fact"] = *instance.fact;
    } else {
        bindings["fact_block"] = "";
        bindings["fact"] = "";
    }
}

void bind_profile(std::map<std::string, std::string>& bindings, const TaskProfile& profile) {
    bindings["source_label"] = profile.source_label;
    bindings["hypothesis_label"] = profile.hypothesis_label;
    bindings["source_noun"] = profile.source_noun;
    bindings["hypothesis_noun"] = profile.hypothesis_noun;
}

void bind_aspect(std::map<std::string, std::string>& bindings, const AspectSpec& aspect) {
    bindings["aspect_name"] = display_aspect_name(aspect.name);
    bindings["aspect_lower"] = aspect.name;
    bindings["aspect_criterion"] = aspect.criterion;
    bindings["scale_min"] = format_scale_bound(aspect.scale_min);
    bindings["scale_max"] = format_scale_bound(aspect.scale_max);
}

RenderedPrompt render_with(const PromptTemplate& tmpl,
                           std::map<std::string, std::string> bindings) {
    bindings["task_description"] = tmpl.task_description;
    RenderedPrompt rendered;
    rendered.stage = tmpl.stage;
    rendered.text = substitute(tmpl.body, bindings);
    rendered.placeholder_bindings = digest_bindings(bindings);
    return rendered;
}

}  // namespace

std::string format_prompt_score(double score) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f", score);
    return buffer;
}

RenderedPrompt render_llmscore_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                      const EvaluationInstance& instance) {
    require_stage(tmpl, PromptStage::kLlmScore);
    const TaskProfile& profile = task_profile(instance.task);
    std::map<std::string, std::string> bindings;
    bind_profile(bindings, profile);
    bind_aspect(bindings, aspect);
    bind_instance_blocks(bindings, instance, profile);
    return render_with(tmpl, std::move(bindings));
}

RenderedPrompt render_cot_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                 const EvaluationInstance& instance) {
    require_stage(tmpl, PromptStage::kLlmScoreCot);
    const TaskProfile& profile = task_profile(instance.task);
    std::map<std::string, std::string> bindings;
    bind_profile(bindings, profile);
    bind_aspect(bindings, aspect);
    bind_instance_blocks(bindings, instance, profile);
    return render_with(tmpl, std::move(bindings));
}

RenderedPrompt render_cot_score_prompt(const RenderedPrompt& first_turn,
                                       const std::string& reasoning, const AspectSpec& aspect) {
    if (first_turn.stage != PromptStage::kLlmScoreCot) {
        throw RenderError("cot score turn must follow a llmscore_cot prompt");
    }
    std::string trimmed = reasoning;
    while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == ' ')) {
        trimmed.pop_back();
    }
    if (trimmed.empty()) {
        throw RenderError("cot reasoning is empty; nothing to score");
    }
    RenderedPrompt rendered;
    rendered.stage = PromptStage::kLlmScoreCot;
    rendered.text = first_turn.text + "\n" + trimmed + "\n\n" +
                    display_aspect_name(aspect.name) + " Score:";
    rendered.placeholder_bindings = first_turn.placeholder_bindings;
    rendered.placeholder_bindings["reasoning"] = short_digest(trimmed);
    return rendered;
}

RenderedPrompt render_aspect_generation_prompt(const PromptTemplate& tmpl,
                                               const AspectSpec& aspect, TaskKind task_kind,
                                               int m) {
    require_stage(tmpl, PromptStage::kAspectGen);
    if (m < 1) {
        throw InvalidInputError("aspect generation needs m >= 1");
    }
    const TaskProfile& profile = task_profile(task_kind);
    std::map<std::string, std::string> bindings;
    bind_profile(bindings, profile);
    bind_aspect(bindings, aspect);
    bindings["m"] = count_phrase(m);
    return render_with(tmpl, std::move(bindings));
}

RenderedPrompt render_aspect_scoring_prompt(const PromptTemplate& tmpl, const AspectChain& chain,
                                            const EvaluationInstance& instance) {
    require_stage(tmpl, PromptStage::kAspectScore);
    if (chain.empty()) {
        throw InvalidInputError("aspect scoring needs a nonempty chain");
    }
    // Re-check distinctness: chains assembled by hand must fail here, not in
    // the judge output.
    AspectChain::make(chain.target, chain.aspects);

    const TaskProfile& profile = task_profile(instance.task);
    std::map<std::string, std::string> bindings;
    bind_profile(bindings, profile);
    bind_aspect(bindings, chain.target);
    bind_instance_blocks(bindings, instance, profile);

    std::string blocks;
    for (std::size_t i = 0; i < chain.aspects.size(); ++i) {
        if (i > 0) blocks += '\n';
        blocks += display_aspect_name(chain.aspects[i].name) + ": " +
                  chain.aspects[i].description;
    }
    bindings["aspect_blocks"] = std::move(blocks);
    return render_with(tmpl, std::move(bindings));
}

RenderedPrompt render_coa_prompt(const PromptTemplate& tmpl, const AspectSpec& aspect,
                                 const EvaluationInstance& instance,
                                 const ChainKnowledge& knowledge, bool include_scores) {
    require_stage(tmpl, PromptStage::kCoaScore);
    if (knowledge.empty()) {
        throw InvalidInputError("chain-of-aspects scoring needs nonempty knowledge");
    }
    const TaskProfile& profile = task_profile(instance.task);
    std::map<std::string, std::string> bindings;
    bind_profile(bindings, profile);
    bind_aspect(bindings, aspect);
    bind_instance_blocks(bindings, instance, profile);

    std::string blocks;
    for (std::size_t i = 0; i < knowledge.entries.size(); ++i) {
        const ChainKnowledge::Entry& entry = knowledge.entries[i];
        if (i > 0) blocks += '\n';
        blocks += display_aspect_name(entry.name) + ": " + entry.description;
        if (include_scores) {
            blocks += "\nScore: " + format_prompt_score(entry.score);
        }
    }
    bindings["knowledge_blocks"] = std::move(blocks);
    return render_with(tmpl, std::move(bindings));
}

}  // namespace coaeval
