#pragma once

#include <string>
#include <vector>

#include "coaeval/errors.hpp"

namespace coaeval {

/// Word tokens produced by the shared rule-metric tokenizer.
struct TokenSequence {
    std::vector<std::string> tokens;

    bool empty() const { return tokens.empty(); }
    std::size_t size() const { return tokens.size(); }
};

/// Shared convention for every rule metric: lowercase, split on whitespace,
/// strip leading/trailing punctuation from each token.
TokenSequence tokenize(const std::string& text);

/// Sentence-level BLEU. Clipped n-gram precisions for n = 1..max_n with
/// add-one smoothing for n >= 2, geometric mean, brevity penalty against the
/// closest reference length. Empty hypothesis scores 0; an empty reference
/// list is an error.
double bleu(const TokenSequence& hypothesis, const std::vector<TokenSequence>& references,
            int max_n = 4);

enum class RougeVariant {
    kRouge1,
    kRouge2,
    kRougeL,
};

/// ROUGE F1 against a single reference. rouge1/rouge2 use n-gram overlap,
/// rougeL the longest common subsequence. Empty hypothesis scores 0; an
/// empty reference is an error.
double rouge(const TokenSequence& hypothesis, const TokenSequence& reference,
             RougeVariant variant);

/// Unigram-alignment metric without synonym matching. Exact matches first,
/// then a fixed suffix-stripping stem match; Fmean = 10PR/(R+9P) with a
/// 0.5*(chunks/matches)^3 fragmentation penalty.
double meteor_lite(const TokenSequence& hypothesis, const TokenSequence& reference);

/// Suffix-stripping stem used by the meteor_lite stem stage (exposed for tests).
std::string stem_token(const std::string& token);

}  // namespace coaeval
