#pragma once

#include "screensearch/corpus.hpp"
#include "screensearch/synonyms.hpp"
#include "screensearch/textpipe.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace screensearch {

/// Bit set over quadrants; bit i is Quadrant(i).
struct ZoneSet {
    std::uint8_t mask = 0;

    static constexpr ZoneSet all() { return {0b1111}; }
    static constexpr ZoneSet of(Quadrant q) { return {static_cast<std::uint8_t>(1u << static_cast<unsigned>(q))}; }

    constexpr bool contains(Quadrant q) const { return (mask >> static_cast<unsigned>(q)) & 1u; }
    constexpr bool empty() const { return mask == 0; }
    constexpr ZoneSet operator|(ZoneSet o) const { return {static_cast<std::uint8_t>(mask | o.mask)}; }

    friend constexpr bool operator==(ZoneSet, ZoneSet) = default;
};

/// The twelve positional prefixes (without the trailing ':') and their zones.
struct PositionalKeyword {
    std::string_view prefix;
    ZoneSet zones;
};
extern const std::array<PositionalKeyword, 12> kPositionalKeywords;

std::optional<ZoneSet> zones_for_prefix(std::string_view prefix);

struct Posting {
    DocId doc = 0;
    Quadrant quadrant = Quadrant::TL;
    ContentKind kind = ContentKind::ScreenText;
    std::uint32_t tf = 1;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct TextQuery {
    /// Normalized term (lowercase lemma).
    std::string term;
    /// Lowercased query word before lemmatization; matched alongside `term`.
    std::string surface;
    ZoneSet zones = ZoneSet::all();

    friend bool operator==(const TextQuery&, const TextQuery&) = default;
};

struct MatchWeights {
    double exact = 10.0;
    double synonym = 4.0;
    int max_edit_distance = 1;
};

/// Parses one query chunk such as "tl:twitter" or "necklace".
TextQuery parse_text_query(std::string_view chunk, const TextPipeline& pipeline = TextPipeline());

/// Tokenizes a raw text box entry into queries. A bare prefix chunk ("tl:")
/// applies to the chunk that follows it.
std::vector<TextQuery> parse_text_queries(std::string_view raw, const TextPipeline& pipeline = TextPipeline());

/// Levenshtein distance between a and b is at most k (unit costs).
bool fuzzy_match(std::string_view a, std::string_view b, int k = 1);

using ScoreMap = std::unordered_map<DocId, double>;

/// Quadrant-zoned inverted index over preprocessed screen contents, with the
/// synonym mapping folded in. Immutable after build.
class TextIndex {
public:
    TextIndex() = default;

    static TextIndex build(const Corpus& corpus, const TextPipeline& pipeline, const SynonymTable& synonyms);

    /// Per screen, the best match weight of `q`: exact when the query is within
    /// the edit budget of a posting term in q.zones, synonym when it is within
    /// budget of a synonym of such a term. Unmatched screens are absent.
    ScoreMap score(const TextQuery& q, const MatchWeights& weights = {}) const;

    std::size_t num_docs() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::size_t num_terms() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    const std::vector<Posting>* postings(std::string_view term) const;
    const std::vector<std::string>* synonyms_of(std::string_view term) const;

    const TextPipeline& pipeline() const { return pipeline_; }

    std::string serialize() const;
    static TextIndex deserialize(std::string_view bytes);
    void save(const std::filesystem::path& path) const;
    static TextIndex load(const std::filesystem::path& path);

private:
    void build_dictionary();
    std::vector<std::uint32_t> candidates(std::string_view word) const;

    TextPipeline pipeline_;
    std::vector<std::string> doc_ids_;
    std::vector<std::string> terms_; // sorted
    std::unordered_map<std::string, std::uint32_t> term_ids_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<std::vector<std::string>> synonyms_;

    // Match dictionary: every posting term and every synonym word.
    std::vector<std::string> dict_words_;
    std::vector<std::int32_t> dict_term_;                    // term id or -1
    std::vector<std::vector<std::uint32_t>> dict_synonym_of_; // term ids listing this word as a synonym
    std::unordered_map<std::string, std::vector<std::uint32_t>> deletions_;
};

} // namespace screensearch
