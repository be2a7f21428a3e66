#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace screensearch {

using ScoredWord = std::pair<std::string, double>;

/// Word-vector model loaded from a text file (`word v1 v2 ... vd` per line).
class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(std::string name, std::size_t dimension);

    static EmbeddingModel load(const std::filesystem::path& path);

    /// Rejects dimension mismatches, zero vectors and duplicate words.
    void add(std::string word, std::vector<double> vector);

    const std::string& name() const { return name_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return words_.size(); }
    bool contains(std::string_view word) const { return index_.contains(std::string(word)); }

    /// The k nearest neighbours by cosine similarity, excluding `word` itself.
    /// Negative cosines clamp to 0. Ties order by word. nullopt when `word` is
    /// not in the model.
    std::optional<std::vector<ScoredWord>> top_similar(std::string_view word, std::size_t k = 10) const;

private:
    std::string name_;
    std::size_t dimension_ = 0;
    std::vector<std::string> words_;
    std::vector<double> unit_vectors_; // row-major, each row L2-normalized
    std::unordered_map<std::string, std::size_t> index_;
};

/// Flat thesaurus (`word: syn1, syn2, ...`). Membership covers headwords and
/// listed synonyms.
class Thesaurus {
public:
    Thesaurus() = default;

    static Thesaurus load(const std::filesystem::path& path);
    static Thesaurus parse(std::string_view text);

    void add(std::string word, std::vector<std::string> synonyms);

    bool contains(std::string_view word) const { return members_.contains(std::string(word)); }
    /// Synonyms in file order; empty when `word` is not a headword.
    const std::vector<std::string>& synonyms(std::string_view word) const;

private:
    std::unordered_map<std::string, std::vector<std::string>> entries_;
    std::unordered_set<std::string> members_;
};

/// Orders two equally scored candidates: words in `primary` first, then words
/// in `secondary`, then lexicographically. Returns true when `a` goes first.
bool lexical_tiebreak(std::string_view a, std::string_view b, const Thesaurus& primary, const Thesaurus& secondary);

/// Unions per-model neighbour lists, summing each word's scores. Sorted by
/// descending sum with lexical_tiebreak on exact ties.
std::vector<ScoredWord> merge_candidates(std::span<const std::vector<ScoredWord>> lists, const Thesaurus& primary,
                                         const Thesaurus& secondary);

/// Lemma -> up to three synonym lemmas. Serialized as Synonym.txt.
class SynonymTable {
public:
    static constexpr std::size_t kMaxSynonyms = 3;

    void set(std::string word, std::vector<std::string> synonyms);
    const std::vector<std::string>* find(std::string_view word) const;

    const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// `word<TAB>syn1,syn2,syn3` per line, sorted by word.
    std::string to_text() const;
    static SynonymTable parse(std::string_view text);
    static SynonymTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    friend bool operator==(const SynonymTable&, const SynonymTable&) = default;

private:
    std::map<std::string, std::vector<std::string>> entries_;
};

struct SynonymSources {
    std::vector<EmbeddingModel> models;
    Thesaurus primary;
    Thesaurus secondary;
    std::unordered_set<std::string> named_entities;
    /// Maps model/thesaurus words into the index's lemma space; identity when unset.
    std::function<std::string(std::string_view)> normalize;
    std::size_t neighbours_per_model = 10;
};

/// Up to three synonyms of `word`: none for named entities, the merged model
/// neighbours when any model knows the word, otherwise the thesauri.
std::vector<std::string> synonyms_for(std::string_view word, const SynonymSources& sources);

/// Builds the table over `vocabulary`. Per-word work runs on `threads` workers;
/// the result does not depend on the thread count.
SynonymTable build_synonym_table(const std::set<std::string>& vocabulary, const SynonymSources& sources,
                                 unsigned threads = 1);

} // namespace screensearch
