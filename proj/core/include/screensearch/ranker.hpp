#pragma once

#include "screensearch/sketch_index.hpp"
#include "screensearch/text_index.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace screensearch {

inline constexpr std::size_t kDefaultResultLimit = 50;

/// Confirmed icon doodles grouped by class, plus positional text queries.
struct Query {
    std::map<std::string, std::vector<DoodlePlacement>> sketch; // keyed by canonical class
    std::vector<TextQuery> texts;

    /// Files the placement under its canonical class; throws ValidationError
    /// for an unsupported class.
    void add_icon(DoodlePlacement placement);
    void add_text(TextQuery text) { texts.push_back(std::move(text)); }

    bool empty() const { return sketch.empty() && texts.empty(); }
    std::size_t num_icons() const;
};

struct RankedEntry {
    DocId doc = 0;
    std::string screen_id;
    double score = 0.0;
    std::size_t rank = 0; // 1-based

    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

using RankedResult = std::vector<RankedEntry>;

/// One component's share of a screen's fused score.
struct Contribution {
    std::string label; // "icon:<class>" or "text:<zones>:<term>"
    double value = 0.0;
};

struct Explanation {
    std::string screen_id;
    std::vector<Contribution> components;
    double total = 0.0;
};

/// Fuses per-class doodle scores and per-text scores. Each class's scores are
/// divided by that class's maximum and weighted by its doodle count; each text
/// query's scores are divided by their maximum. Components whose maximum is
/// zero are skipped. Sorted by descending score, then ascending screen id.
RankedResult rank(const Query& query, const SketchIndex& sketch_index, const TextIndex& text_index,
                  const RankingConfig& cfg, std::size_t limit = kDefaultResultLimit);

/// Per-component breakdown of one screen's fused score.
Explanation explain(const Query& query, std::string_view screen_id, const SketchIndex& sketch_index,
                    const TextIndex& text_index, const RankingConfig& cfg);

/// Label used for a text component, e.g. "text:TL+TR:display".
std::string text_label(const TextQuery& q);

} // namespace screensearch
