#pragma once

#include "screensearch/corpus.hpp"
#include "screensearch/text_index.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace screensearch {

inline constexpr std::size_t kTileCount = 24;
using TileVector = std::array<double, kTileCount>;

/// The 23 supported doodle classes, in their canonical spelling.
const std::vector<std::string>& supported_classes();

/// Canonical spelling of `name` (case-insensitive; '_' and ' ' interchangeable),
/// or nullopt when it is not a supported class.
std::optional<std::string> canonical_class(std::string_view name);

/// 24 equal tiles. The default is 6 columns along the width and 4 rows along
/// the height; `transposed` gives 4 columns by 6 rows.
struct TileGrid {
    bool transposed = false;

    std::size_t columns() const { return transposed ? 4 : 6; }
    std::size_t rows() const { return transposed ? 6 : 4; }
    Rect tile(std::size_t t) const;
    /// Edge-adjacent (4-neighbourhood) tiles of t.
    std::vector<std::size_t> neighbours(std::size_t t) const;
};

/// Fraction of each tile's area covered by `bbox` (normalized coordinates).
/// Throws ValidationError for a zero-area bbox or one outside [0,1]^2.
TileVector tile_coverage(const Rect& bbox, const TileGrid& grid = {});

/// Parameters of the doodle placement score and the text match weights.
struct RankingConfig {
    double p1 = 11.0;          // type-presence reward per matched doodle
    double p2 = 1.0;           // position-overlap weight
    double p3 = 1.0;           // shape-similarity weight
    double delta_w = 0.7;      // decay applied to coverage spilling into adjacent tiles
    double c_w = 12.0;         // penalty per unmatched doodle
    MatchWeights weights;

    /// Throws ValidationError unless all parameters are positive and delta_w is in (0,1).
    void validate() const;
};

struct InstanceRecord {
    DocId doc = 0;
    std::string icon_class;
    TileVector coverage{};
    Rect bbox; // normalized to the screen
};

struct DoodlePlacement {
    std::string icon_class;
    Rect bbox; // normalized canvas coordinates
};

/// Maps corpus element/icon labels to doodle classes (class_map.tsv).
class ClassMap {
public:
    ClassMap() = default;
    static ClassMap parse(std::string_view text);
    static ClassMap load(const std::filesystem::path& path);
    /// Identity mapping for every supported class name (any spelling).
    static ClassMap identity();

    /// Throws ValidationError when `doodle_class` is not supported.
    void add(std::string corpus_label, std::string_view doodle_class);
    std::optional<std::string> map(std::string_view corpus_label) const;

    std::string to_text() const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Smoothed coverage: each tile takes the larger of its own coverage and
/// delta_w times its strongest edge neighbour.
TileVector smooth_coverage(const TileVector& coverage, double delta_w, const TileGrid& grid);

/// Per-pair score p1 + p2*position + p3*shape.
double placement_match(const TileVector& placement_coverage, const Rect& placement_bbox,
                       const TileVector& smoothed_instance, const Rect& instance_bbox, const RankingConfig& cfg);

/// class -> screen -> instances. Immutable after build.
class SketchIndex {
public:
    SketchIndex() = default;

    static SketchIndex build(const Corpus& corpus, const ClassMap& class_map, const TileGrid& grid = {});

    /// Per screen holding `cls`: greedy one-to-one matching of placements to
    /// instances, sum of matched pair scores minus c_w per unmatched placement,
    /// clamped at zero. Screens without `cls` are absent.
    ScoreMap score_class_doodles(std::string_view cls, const std::vector<DoodlePlacement>& placements,
                                 const RankingConfig& cfg) const;

    /// Instances of `cls`, grouped by screen; empty when the class is absent.
    const std::map<DocId, std::vector<InstanceRecord>>& lookup(std::string_view cls) const;

    std::size_t num_docs() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::size_t skipped_labels() const { return skipped_labels_; }
    std::size_t num_instances() const;
    const TileGrid& grid() const { return grid_; }

    std::string serialize() const;
    static SketchIndex deserialize(std::string_view bytes);
    void save(const std::filesystem::path& path) const;
    static SketchIndex load(const std::filesystem::path& path);

private:
    TileGrid grid_;
    std::vector<std::string> doc_ids_;
    std::map<std::string, std::map<DocId, std::vector<InstanceRecord>>> classes_;
    std::size_t skipped_labels_ = 0;
};

} // namespace screensearch
