#include "coaeval/core/types.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace coaeval {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::kDialog: return "dialog";
        case TaskKind::kSummarization: return "summarization";
        case TaskKind::kStory: return "story";
        case TaskKind::kData2Text: return "data2text";
        case TaskKind::kTranslation: return "translation";
    }
    return "dialog";
}

TaskKind task_kind_from_string(const std::string& text) {
    if (text == "dialog") return TaskKind::kDialog;
    if (text == "summarization") return TaskKind::kSummarization;
    if (text == "story") return TaskKind::kStory;
    if (text == "data2text") return TaskKind::kData2Text;
    if (text == "translation") return TaskKind::kTranslation;
    throw InvalidInputError("unknown task kind: '" + text + "'");
}

std::string normalize_aspect_name(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (out.empty()) {
        throw InvalidInputError("aspect name is empty after trimming");
    }
    return out;
}

std::string display_aspect_name(const std::string& normalized) {
    std::string out = normalized;
    bool at_word_start = true;
    for (char& c : out) {
        if (at_word_start) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        at_word_start = (c == ' ');
    }
    return out;
}

AspectSpec AspectSpec::make(const std::string& name, const std::string& criterion,
                            double scale_min, double scale_max) {
    if (!(scale_min < scale_max)) {
        throw InvalidInputError("aspect scale_min must be below scale_max");
    }
    AspectSpec spec;
    spec.name = normalize_aspect_name(name);
    spec.criterion = criterion;
    spec.scale_min = scale_min;
    spec.scale_max = scale_max;
    return spec;
}

void EvaluationInstance::validate() const {
    if (id.empty()) {
        throw InvalidInputError("instance has an empty id");
    }
    if (hypothesis.empty()) {
        throw InvalidInputError("instance '" + id + "' has an empty hypothesis");
    }
    for (const auto& [aspect, annotator_scores] : human_scores) {
        if (annotator_scores.empty()) {
            throw InvalidInputError("instance '" + id + "' declares aspect '" + aspect +
                                    "' with no annotator scores");
        }
    }
}

Aspect Aspect::make(const std::string& raw_name, const std::string& description) {
    if (description.empty()) {
        throw InvalidInputError("aspect description must be nonempty");
    }
    Aspect aspect;
    aspect.name = normalize_aspect_name(raw_name);
    aspect.description = description;
    return aspect;
}

AspectChain AspectChain::make(AspectSpec target, std::vector<Aspect> aspects) {
    std::set<std::string> seen;
    for (const Aspect& aspect : aspects) {
        if (!seen.insert(aspect.name).second) {
            throw InvalidInputError("aspect chain contains duplicate name '" + aspect.name + "'");
        }
    }
    AspectChain chain;
    chain.target = std::move(target);
    chain.aspects = std::move(aspects);
    return chain;
}

std::vector<std::string> AspectChain::names() const {
    std::vector<std::string> out;
    out.reserve(aspects.size());
    for (const Aspect& aspect : aspects) {
        out.push_back(aspect.name);
    }
    return out;
}

void AspectScoreSet::validate_against(const AspectChain& chain) const {
    const std::vector<std::string> chain_names = chain.names();
    auto in_chain = [&](const std::string& name) {
        return std::find(chain_names.begin(), chain_names.end(), name) != chain_names.end();
    };
    for (const auto& [name, score] : scores) {
        (void)score;
        if (!in_chain(name)) {
            throw InvalidInputError("score set names '" + name + "' which is not in the chain");
        }
        if (std::find(missing.begin(), missing.end(), name) != missing.end()) {
            throw InvalidInputError("aspect '" + name + "' is both scored and missing");
        }
    }
    for (const std::string& name : missing) {
        if (!in_chain(name)) {
            throw InvalidInputError("missing list names '" + name + "' which is not in the chain");
        }
    }
}

std::string to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::kLlm: return "llm";
        case Provenance::kRule: return "rule";
        case Provenance::kIngested: return "ingested";
    }
    return "llm";
}

Provenance provenance_from_string(const std::string& text) {
    if (text == "llm") return Provenance::kLlm;
    if (text == "rule") return Provenance::kRule;
    if (text == "ingested") return Provenance::kIngested;
    throw InvalidInputError("unknown provenance: '" + text + "'");
}

std::string to_string(PromptStage stage) {
    switch (stage) {
        case PromptStage::kLlmScore: return "llmscore";
        case PromptStage::kLlmScoreCot: return "llmscore_cot";
        case PromptStage::kAspectGen: return "aspect_gen";
        case PromptStage::kAspectScore: return "aspect_score";
        case PromptStage::kCoaScore: return "coa_score";
    }
    return "llmscore";
}

PromptStage prompt_stage_from_string(const std::string& text) {
    if (text == "llmscore") return PromptStage::kLlmScore;
    if (text == "llmscore_cot") return PromptStage::kLlmScoreCot;
    if (text == "aspect_gen") return PromptStage::kAspectGen;
    if (text == "aspect_score") return PromptStage::kAspectScore;
    if (text == "coa_score") return PromptStage::kCoaScore;
    throw InvalidInputError("unknown prompt stage: '" + text + "'");
}

}  // namespace coaeval
