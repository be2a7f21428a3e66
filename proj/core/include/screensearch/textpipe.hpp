#pragma once

#include "screensearch/corpus.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace screensearch {

struct Token {
    std::string surface;
    std::string lemma;
    bool is_stopword = false;
    bool is_named_entity = false;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Which preprocessing pipeline a content goes through. Screen texts drop
/// stop-words; element descriptions keep them ("arrow up" vs "arrow").
using PipelineKind = ContentKind;

/// Splits on maximal runs of whitespace, '.', ',', '!' and '?'.
std::vector<std::string> tokenize(std::string_view raw);

std::string to_lower(std::string_view s);

/// Word lists driving the pipeline. All entries are stored lowercase.
struct Lexicons {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> named_entities;
    /// surface -> lemma overrides (irregular forms, part-of-speech fixes).
    std::unordered_map<std::string, std::string> lemma_exceptions;

    /// Built-in English stop-words and lemma exceptions; empty entity list.
    static Lexicons defaults();

    /// Reads stopwords.txt, ne_lexicon.txt and lemma_exceptions.tsv from `dir`,
    /// falling back to the built-in list for any file that is absent.
    static Lexicons load(const std::filesystem::path& dir);

    static std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);
    static std::unordered_map<std::string, std::string> load_exceptions(const std::filesystem::path& path);
};

/// Rule-based lemmatizer with an exceptions table. The result is always a
/// fixed point: lemmatize(lemmatize(w)) == lemmatize(w).
class Lemmatizer {
public:
    Lemmatizer() = default;
    explicit Lemmatizer(std::unordered_map<std::string, std::string> exceptions)
        : exceptions_(std::move(exceptions)) {}

    std::string operator()(std::string_view surface) const;

private:
    std::unordered_map<std::string, std::string> exceptions_;
};

/// The two screen-content pipelines plus query-term normalization.
class TextPipeline {
public:
    TextPipeline() : TextPipeline(Lexicons::defaults()) {}
    explicit TextPipeline(Lexicons lexicons);

    std::vector<Token> preprocess(const std::vector<std::string>& tokens, PipelineKind kind) const;

    /// tokenize + preprocess.
    std::vector<Token> run(std::string_view raw, PipelineKind kind) const;

    /// Lowercased lemma for a query word: named entities are only lowercased.
    std::string normalize_term(std::string_view word) const;

    std::string lemmatize(std::string_view surface) const { return lemmatizer_(surface); }
    bool is_stopword(std::string_view word) const;
    bool is_named_entity(std::string_view word) const;

    const Lexicons& lexicons() const { return lexicons_; }

private:
    Lexicons lexicons_;
    Lemmatizer lemmatizer_;
};

} // namespace screensearch
