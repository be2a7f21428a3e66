#include "screensearch/ranker.hpp"

#include "screensearch/error.hpp"

#include <algorithm>

namespace screensearch {

namespace {

void check_indexes(const SketchIndex& sketch_index, const TextIndex& text_index) {
    if (sketch_index.num_docs() != text_index.num_docs() ||
        (sketch_index.num_docs() > 0 && (sketch_index.doc_ids().front() != text_index.doc_ids().front() ||
                                         sketch_index.doc_ids().back() != text_index.doc_ids().back()))) {
        throw ValidationError("sketch and text indexes were built from different corpora");
    }
}

std::vector<TextQuery> distinct_texts(const std::vector<TextQuery>& texts) {
    std::vector<TextQuery> out;
    for (const auto& t : texts) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
    return out;
}

double max_score(const ScoreMap& scores) {
    double best = 0.0;
    for (const auto& [doc, s] : scores) best = std::max(best, s);
    return best;
}

// Visits every component as (label, scores, multiplier) in fusion order.
template <typename Fn>
void for_each_component(const Query& query, const SketchIndex& sketch_index, const TextIndex& text_index,
                        const RankingConfig& cfg, Fn&& fn) {
    for (const auto& [cls, placements] : query.sketch) {
        if (placements.empty()) continue;
        fn("icon:" + cls, sketch_index.score_class_doodles(cls, placements, cfg),
           static_cast<double>(placements.size()));
    }
    for (const auto& text : distinct_texts(query.texts)) {
        fn(text_label(text), text_index.score(text, cfg.weights), 1.0);
    }
}

} // namespace

void Query::add_icon(DoodlePlacement placement) {
    auto canonical = canonical_class(placement.icon_class);
    if (!canonical) {
        throw ValidationError("unsupported icon class \"" + placement.icon_class + "\"");
    }
    placement.icon_class = *canonical;
    sketch[*canonical].push_back(std::move(placement));
}

std::size_t Query::num_icons() const {
    std::size_t n = 0;
    for (const auto& [cls, placements] : sketch) n += placements.size();
    return n;
}

std::string text_label(const TextQuery& q) {
    std::string zones;
    for (auto quadrant : kAllQuadrants) {
        if (!q.zones.contains(quadrant)) continue;
        if (!zones.empty()) zones += '+';
        zones += to_string(quadrant);
    }
    return "text:" + zones + ":" + q.term;
}

RankedResult rank(const Query& query, const SketchIndex& sketch_index, const TextIndex& text_index,
                  const RankingConfig& cfg, std::size_t limit) {
    if (query.empty()) {
        throw ValidationError("empty query: add an icon or a text term");
    }
    if (limit == 0) {
        throw ValidationError("result limit must be at least 1");
    }
    check_indexes(sketch_index, text_index);

    const std::size_t n = text_index.num_docs();
    std::vector<double> totals(n, 0.0);
    std::vector<char> present(n, 0);
    for_each_component(query, sketch_index, text_index, cfg,
                       [&](const std::string&, const ScoreMap& scores, double multiplier) {
                           const double best = max_score(scores);
                           if (scores.empty() || !(best > 0)) return;
                           for (const auto& [doc, s] : scores) {
                               totals[doc] += s / best * multiplier;
                               present[doc] = 1;
                           }
                       });

    std::vector<DocId> docs;
    for (DocId d = 0; d < n; ++d) {
        if (present[d]) docs.push_back(d);
    }
    auto better = [&](DocId a, DocId b) {
        if (totals[a] != totals[b]) return totals[a] > totals[b];
        return a < b;
    };
    const std::size_t keep = std::min(limit, docs.size());
    std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(keep), docs.end(), better);

    RankedResult out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.push_back({docs[i], text_index.doc_ids()[docs[i]], totals[docs[i]], i + 1});
    }
    return out;
}

Explanation explain(const Query& query, std::string_view screen_id, const SketchIndex& sketch_index,
                    const TextIndex& text_index, const RankingConfig& cfg) {
    if (query.empty()) {
        throw ValidationError("empty query: add an icon or a text term");
    }
    check_indexes(sketch_index, text_index);
    const auto& ids = text_index.doc_ids();
    auto it = std::lower_bound(ids.begin(), ids.end(), screen_id);
    if (it == ids.end() || *it != screen_id) {
        throw NotFoundError("unknown screen id \"" + std::string(screen_id) + "\"");
    }
    const auto doc = static_cast<DocId>(it - ids.begin());

    Explanation ex;
    ex.screen_id = std::string(screen_id);
    for_each_component(query, sketch_index, text_index, cfg,
                       [&](const std::string& label, const ScoreMap& scores, double multiplier) {
                           const double best = max_score(scores);
                           if (scores.empty() || !(best > 0)) return;
                           auto hit = scores.find(doc);
                           if (hit == scores.end()) return;
                           const double value = hit->second / best * multiplier;
                           ex.components.push_back({label, value});
                           ex.total += value;
                       });
    return ex;
}

} // namespace screensearch
