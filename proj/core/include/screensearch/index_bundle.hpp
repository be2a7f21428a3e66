#pragma once

#include "screensearch/ranker.hpp"
#include "screensearch/sketch_index.hpp"
#include "screensearch/text_index.hpp"

#include <filesystem>
#include <set>
#include <string>

namespace screensearch {

/// Text and sketch indexes built from the same corpus, stored side by side
/// as `text.idx` and `sketch.idx` in one directory.
struct IndexBundle {
    TextIndex text;
    SketchIndex sketch;

    static IndexBundle build(const Corpus& corpus, const TextPipeline& pipeline, const SynonymTable& synonyms,
                             const ClassMap& class_map, const TileGrid& grid = {});

    void save(const std::filesystem::path& dir) const;
    /// Throws IoError naming the missing file, ValidationError when the two
    /// indexes disagree on the corpus.
    static IndexBundle load(const std::filesystem::path& dir);

    RankedResult search(const Query& query, const RankingConfig& cfg, std::size_t limit = kDefaultResultLimit) const {
        return rank(query, sketch, text, cfg, limit);
    }
};

inline constexpr const char* kTextIndexFile = "text.idx";
inline constexpr const char* kSketchIndexFile = "sketch.idx";

/// Lemmas of every non-entity, non-stop-word token in the corpus; the words
/// that get synonyms.
std::set<std::string> corpus_vocabulary(const Corpus& corpus, const TextPipeline& pipeline);

} // namespace screensearch
