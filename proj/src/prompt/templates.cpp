#include "coaeval/prompt/templates.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/sha.h>

namespace coaeval {

namespace {

const TaskProfile kDialogProfile{
    TaskKind::kDialog,
    "You will be given a conversation between two individuals.\n"
    "You will then be given one potential response for the next turn in the conversation.\n"
    "The response concerns an interesting fact, which will be provided as well.",
    "The dialog response evaluation task refers to evaluate the response based on the "
    "conversation.",
    "Conversation",
    "Response",
    "conversation",
    "response",
};

const TaskProfile kSummarizationProfile{
    TaskKind::kSummarization,
    "You will be given one news article.\n"
    "You will then be given one summary written for this article.",
    "The summarization evaluation task refers to evaluate the summary based on the article.",
    "Article",
    "Summary",
    "article",
    "summary",
};

const TaskProfile kStoryProfile{
    TaskKind::kStory,
    "You will be given the beginning of a story.\n"
    "You will then be given one continuation written for this story beginning.",
    "The story generation evaluation task refers to evaluate the story continuation based on "
    "the story beginning.",
    "Story Beginning",
    "Story Continuation",
    "story beginning",
    "story continuation",
};

const TaskProfile kData2TextProfile{
    TaskKind::kData2Text,
    "You will be given a structured data record.\n"
    "You will then be given one text description generated for this data record.",
    "The data-to-text evaluation task refers to evaluate the description based on the data "
    "record.",
    "Data Record",
    "Description",
    "data record",
    "description",
};

const TaskProfile kTranslationProfile{
    TaskKind::kTranslation,
    "You will be given a sentence in the source language.\n"
    "You will then be given one candidate translation of this sentence.",
    "The machine translation evaluation task refers to evaluate the translation based on the "
    "source sentence.",
    "Source Sentence",
    "Translation",
    "source sentence",
    "translation",
};

constexpr const char* kLlmScoreBody =
    "{{task_description}}\n"
    "\n"
    "Evaluation Criteria:\n"
    "{{aspect_name}} ({{scale_min}}-{{scale_max}}) {{aspect_criterion}}\n"
    "\n"
    "{{fact_block}}{{source_label}}:\n"
    "{{source}}\n"
    "\n"
    "{{hypothesis_label}}:\n"
    "{{hypothesis}}\n"
    "\n"
    "Based on the {{source_noun}} and the evaluation criteria for {{aspect_lower}}, please "
    "rate the {{aspect_lower}} of the {{hypothesis_noun}}.\n"
    "{{aspect_name}} Score:";

constexpr const char* kCotBody =
    "{{task_description}}\n"
    "\n"
    "Evaluation Criteria:\n"
    "{{aspect_name}} ({{scale_min}}-{{scale_max}}) {{aspect_criterion}}\n"
    "\n"
    "{{fact_block}}{{source_label}}:\n"
    "{{source}}\n"
    "\n"
    "{{hypothesis_label}}:\n"
    "{{hypothesis}}\n"
    "\n"
    "Based on the {{source_noun}} and the evaluation criteria for {{aspect_lower}}, please "
    "rate the {{aspect_lower}} of the {{hypothesis_noun}}.\n"
    "Let's think step by step:";

constexpr const char* kAspectGenBody =
    "{{task_description}}\n"
    "Your task is to list {{m}} aspects that can be considered when measuring the "
    "{{aspect_lower}} of {{hypothesis_noun}}.\n"
    "{{aspect_name}}: {{aspect_criterion}}";

constexpr const char* kAspectScoreBody =
    "{{task_description}}\n"
    "Scores for each aspect range from {{scale_min}} to {{scale_max}}, representing worst to "
    "best.\n"
    "\n"
    "Aspects:\n"
    "{{aspect_blocks}}\n"
    "\n"
    "{{fact_block}}{{source_label}}:\n"
    "{{source}}\n"
    "\n"
    "{{hypothesis_label}}:\n"
    "{{hypothesis}}\n"
    "\n"
    "Based on the {{source_noun}} and the aspects, please rate the {{hypothesis_noun}} for "
    "each aspect.\n"
    "Provide them in JSON format, aspect as key, score as value:";

constexpr const char* kCoaScoreBody =
    "{{task_description}}\n"
    "\n"
    "Evaluation Criteria:\n"
    "{{aspect_name}} ({{scale_min}}-{{scale_max}}) {{aspect_criterion}}\n"
    "\n"
    "{{fact_block}}{{source_label}}:\n"
    "{{source}}\n"
    "\n"
    "{{hypothesis_label}}:\n"
    "{{hypothesis}}\n"
    "\n"
    "Before you rate the above {{hypothesis_noun}}, some scores for different aspects of this "
    "{{hypothesis_noun}} can help you rate the {{aspect_lower}} of this {{hypothesis_noun}}:\n"
    "{{knowledge_blocks}}\n"
    "\n"
    "Based on the {{source_noun}}, the evaluation criteria for {{aspect_lower}} and the "
    "scores for different aspects of the {{hypothesis_noun}}, please rate the {{aspect_lower}} "
    "of the {{hypothesis_noun}}.\n"
    "{{aspect_name}} Score:";

std::string stage_task_description(PromptStage stage, const TaskProfile& profile) {
    switch (stage) {
        case PromptStage::kAspectGen:
            return profile.task_definition;
        case PromptStage::kAspectScore:
            return profile.context_block + "\nYour task is to rate the " +
                   profile.hypothesis_noun + " based on the given aspects.";
        case PromptStage::kLlmScore:
        case PromptStage::kLlmScoreCot:
        case PromptStage::kCoaScore:
            return profile.context_block + "\nYour task is to rate the " +
                   profile.hypothesis_noun + " on one metric.";
    }
    return profile.context_block;
}

const char* stage_body(PromptStage stage) {
    switch (stage) {
        case PromptStage::kLlmScore: return kLlmScoreBody;
        case PromptStage::kLlmScoreCot: return kCotBody;
        case PromptStage::kAspectGen: return kAspectGenBody;
        case PromptStage::kAspectScore: return kAspectScoreBody;
        case PromptStage::kCoaScore: return kCoaScoreBody;
    }
    return kLlmScoreBody;
}

std::size_t count_marker(const std::string& text, const std::string& name) {
    const std::string marker = "{{" + name + "}}";
    std::size_t count = 0;
    for (std::size_t pos = text.find(marker); pos != std::string::npos;
         pos = text.find(marker, pos + marker.size())) {
        ++count;
    }
    return count;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    // A trailing newline in a hand-edited file is layout noise, not content.
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
    }
    return text;
}

}  // namespace

const TaskProfile& task_profile(TaskKind kind) {
    switch (kind) {
        case TaskKind::kDialog: return kDialogProfile;
        case TaskKind::kSummarization: return kSummarizationProfile;
        case TaskKind::kStory: return kStoryProfile;
        case TaskKind::kData2Text: return kData2TextProfile;
        case TaskKind::kTranslation: return kTranslationProfile;
    }
    return kDialogProfile;
}

const PromptTemplate& TemplateSet::at(PromptStage stage) const {
    const auto it = templates.find(stage);
    if (it == templates.end()) {
        throw InvalidInputError("no template for stage " + to_string(stage));
    }
    return it->second;
}

TemplateSet default_templates(TaskKind kind) {
    const TaskProfile& profile = task_profile(kind);
    TemplateSet set;
    for (PromptStage stage : {PromptStage::kLlmScore, PromptStage::kLlmScoreCot,
                              PromptStage::kAspectGen, PromptStage::kAspectScore,
                              PromptStage::kCoaScore}) {
        PromptTemplate tmpl;
        tmpl.stage = stage;
        tmpl.task_description = stage_task_description(stage, profile);
        tmpl.body = stage_body(stage);
        set.templates[stage] = std::move(tmpl);
    }
    return set;
}

TemplateSet load_templates(TaskKind kind, const std::string& templates_dir) {
    TemplateSet set = default_templates(kind);
    if (templates_dir.empty()) {
        return set;
    }
    const std::filesystem::path dir(templates_dir);
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("templates dir does not exist: " + templates_dir);
    }
    for (auto& [stage, tmpl] : set.templates) {
        const auto body_path = dir / (to_string(stage) + ".body.txt");
        if (std::filesystem::exists(body_path)) {
            tmpl.body = read_file(body_path);
        }
        const auto desc_path = dir / (to_string(stage) + "." + to_string(kind) + ".desc.txt");
        if (std::filesystem::exists(desc_path)) {
            tmpl.task_description = read_file(desc_path);
        }
        validate_template(tmpl);
    }
    return set;
}

std::string count_phrase(int count) {
    static const std::array<const char*, 21> kWords = {
        "zero",     "one",      "two",      "three",   "four",    "five",
        "six",      "seven",    "eight",    "nine",    "ten",     "eleven",
        "twelve",   "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
        "eighteen", "nineteen", "twenty"};
    if (count >= 1 && count <= 20) {
        return kWords[static_cast<std::size_t>(count)];
    }
    return std::to_string(count);
}

std::string template_digest(const PromptTemplate& tmpl) {
    const std::string canonical =
        to_string(tmpl.stage) + '\x1e' + tmpl.task_description + '\x1e' + tmpl.body;
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(canonical.data()), canonical.size(), digest);
    static const char* kHex = "0123456789abcdef";
    std::string hex(16, '0');
    for (int i = 0; i < 8; ++i) {
        hex[2 * i] = kHex[digest[i] >> 4];
        hex[2 * i + 1] = kHex[digest[i] & 0x0f];
    }
    return hex;
}

void validate_template(const PromptTemplate& tmpl) {
    // Placeholders carrying block content must appear exactly once; short
    // phrasing placeholders (names, nouns, scale bounds) may repeat.
    std::vector<std::string> content;
    switch (tmpl.stage) {
        case PromptStage::kLlmScore:
        case PromptStage::kLlmScoreCot:
            content = {"task_description", "aspect_criterion", "fact_block", "source",
                       "hypothesis"};
            break;
        case PromptStage::kAspectGen:
            content = {"task_description", "m", "aspect_criterion"};
            break;
        case PromptStage::kAspectScore:
            content = {"task_description", "aspect_blocks", "fact_block", "source",
                       "hypothesis"};
            break;
        case PromptStage::kCoaScore:
            content = {"task_description", "aspect_criterion", "fact_block", "source",
                       "hypothesis", "knowledge_blocks"};
            break;
    }
    for (const std::string& name : content) {
        const std::size_t count = count_marker(tmpl.body, name);
        if (count != 1) {
            throw InvalidInputError("template for stage " + to_string(tmpl.stage) +
                                    " must reference {{" + name + "}} exactly once, found " +
                                    std::to_string(count));
        }
    }
}

}  // namespace coaeval
