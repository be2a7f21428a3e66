#include "screensearch/index_bundle.hpp"

#include "screensearch/error.hpp"

namespace screensearch {

IndexBundle IndexBundle::build(const Corpus& corpus, const TextPipeline& pipeline, const SynonymTable& synonyms,
                               const ClassMap& class_map, const TileGrid& grid) {
    return {TextIndex::build(corpus, pipeline, synonyms), SketchIndex::build(corpus, class_map, grid)};
}

void IndexBundle::save(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError(dir.string() + ": cannot create directory: " + ec.message());
    }
    text.save(dir / kTextIndexFile);
    sketch.save(dir / kSketchIndexFile);
}

IndexBundle IndexBundle::load(const std::filesystem::path& dir) {
    IndexBundle b{TextIndex::load(dir / kTextIndexFile), SketchIndex::load(dir / kSketchIndexFile)};
    if (b.text.doc_ids() != b.sketch.doc_ids()) {
        throw ValidationError(dir.string() + ": text and sketch indexes were built from different corpora");
    }
    return b;
}

std::set<std::string> corpus_vocabulary(const Corpus& corpus, const TextPipeline& pipeline) {
    std::set<std::string> vocab;
    for (DocId d = 0; d < corpus.size(); ++d) {
        for (const auto& c : corpus.contents(d)) {
            for (const auto& t : pipeline.run(c.raw_text, c.kind)) {
                if (!t.is_named_entity && !t.is_stopword) vocab.insert(t.lemma);
            }
        }
    }
    return vocab;
}

} // namespace screensearch
