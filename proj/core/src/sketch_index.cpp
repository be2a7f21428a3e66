#include "screensearch/sketch_index.hpp"

#include "binary_io.hpp"
#include "screensearch/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace screensearch {

namespace {

constexpr std::string_view kMagic = "SSSKTIDX";
constexpr std::uint32_t kVersion = 1;
constexpr double kBoundsSlack = 1e-9;

std::string class_key(std::string_view name) {
    std::string key;
    key.reserve(name.size());
    for (unsigned char c : name) {
        key.push_back(c == '_' || c == '-' ? ' ' : static_cast<char>(std::tolower(c)));
    }
    return key;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<DocId, std::vector<InstanceRecord>> kNoInstances;

} // namespace

const std::vector<std::string>& supported_classes() {
    static const std::vector<std::string> classes{
        "Camera", "Cloud", "Envelope", "House", "Jail-window", "Square",  "Star",     "Avatar",
        "Back",   "Cancel", "Checkbox", "Drop-down", "Forward", "Left arrow", "Menu", "Play",
        "Plus",   "Search", "Setting",  "Share",  "Slider",  "Squiggle", "Switch",
    };
    return classes;
}

std::optional<std::string> canonical_class(std::string_view name) {
    const auto key = class_key(trim(name));
    for (const auto& c : supported_classes()) {
        if (class_key(c) == key) return c;
    }
    return std::nullopt;
}

// --- grid -----------------------------------------------------------------

Rect TileGrid::tile(std::size_t t) const {
    const double cols = static_cast<double>(columns());
    const double rs = static_cast<double>(rows());
    const auto col = static_cast<double>(t % columns());
    const auto row = static_cast<double>(t / columns());
    return {col / cols, row / rs, (col + 1) / cols, (row + 1) / rs};
}

std::vector<std::size_t> TileGrid::neighbours(std::size_t t) const {
    const std::size_t cols = columns(), rs = rows();
    const std::size_t col = t % cols, row = t / cols;
    std::vector<std::size_t> out;
    if (col > 0) out.push_back(t - 1);
    if (col + 1 < cols) out.push_back(t + 1);
    if (row > 0) out.push_back(t - cols);
    if (row + 1 < rs) out.push_back(t + cols);
    return out;
}

TileVector tile_coverage(const Rect& bbox, const TileGrid& grid) {
    if (!(bbox.left >= -kBoundsSlack && bbox.top >= -kBoundsSlack && bbox.right <= 1 + kBoundsSlack &&
          bbox.bottom <= 1 + kBoundsSlack)) {
        throw ValidationError("bbox outside the unit square");
    }
    const Rect box{std::clamp(bbox.left, 0.0, 1.0), std::clamp(bbox.top, 0.0, 1.0), std::clamp(bbox.right, 0.0, 1.0),
                   std::clamp(bbox.bottom, 0.0, 1.0)};
    if (box.degenerate()) {
        throw ValidationError("bbox has zero area");
    }
    TileVector coverage{};
    for (std::size_t t = 0; t < kTileCount; ++t) {
        const Rect tile = grid.tile(t);
        const double w = std::min(box.right, tile.right) - std::max(box.left, tile.left);
        const double h = std::min(box.bottom, tile.bottom) - std::max(box.top, tile.top);
        if (w > 0 && h > 0) {
            coverage[t] = std::min(1.0, (w * h) / tile.area());
        }
    }
    return coverage;
}

void RankingConfig::validate() const {
    if (!(p1 > 0 && p2 > 0 && p3 > 0 && c_w > 0)) {
        throw ValidationError("ranking parameters p1, p2, p3 and c_w must be positive");
    }
    if (!(delta_w > 0 && delta_w < 1)) {
        throw ValidationError("delta_w must lie in (0, 1)");
    }
    if (!(weights.exact > weights.synonym && weights.synonym > 0)) {
        throw ValidationError("match weights must satisfy exact > synonym > 0");
    }
    if (weights.max_edit_distance < 0) {
        throw ValidationError("max_edit_distance must be non-negative");
    }
}

// --- class map ------------------------------------------------------------

void ClassMap::add(std::string corpus_label, std::string_view doodle_class) {
    auto canonical = canonical_class(doodle_class);
    if (!canonical) {
        throw ValidationError("unsupported doodle class \"" + std::string(doodle_class) + "\"");
    }
    entries_[class_key(corpus_label)] = *canonical;
}

std::optional<std::string> ClassMap::map(std::string_view corpus_label) const {
    auto it = entries_.find(class_key(corpus_label));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

ClassMap ClassMap::identity() {
    ClassMap m;
    for (const auto& c : supported_classes()) m.add(c, c);
    return m;
}

ClassMap ClassMap::parse(std::string_view text) {
    ClassMap m;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("class_map.tsv line " + std::to_string(lineno) + ": expected corpus_label<TAB>doodle_class");
        }
        try {
            m.add(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
        } catch (const ValidationError& e) {
            throw ParseError("class_map.tsv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return m;
}

ClassMap ClassMap::load(const std::filesystem::path& path) {
    return parse(detail::read_binary_file(path.string()));
}

std::string ClassMap::to_text() const {
    std::string out;
    for (const auto& [label, cls] : entries_) out += label + '\t' + cls + '\n';
    return out;
}

// --- scoring --------------------------------------------------------------

TileVector smooth_coverage(const TileVector& coverage, double delta_w, const TileGrid& grid) {
    TileVector out{};
    for (std::size_t t = 0; t < kTileCount; ++t) {
        double spill = 0.0;
        for (auto n : grid.neighbours(t)) spill = std::max(spill, coverage[n]);
        out[t] = std::max(coverage[t], delta_w * spill);
    }
    return out;
}

double placement_match(const TileVector& placement_coverage, const Rect& placement_bbox,
                       const TileVector& smoothed_instance, const Rect& instance_bbox, const RankingConfig& cfg) {
    double overlap = 0.0, mass = 0.0;
    for (std::size_t t = 0; t < kTileCount; ++t) {
        overlap += std::min(placement_coverage[t], smoothed_instance[t]);
        mass += placement_coverage[t];
    }
    const double position = mass > 0 ? overlap / mass : 0.0;
    const double ar_d = placement_bbox.width() / placement_bbox.height();
    const double ar_i = instance_bbox.width() / instance_bbox.height();
    const double shape = std::min(ar_d, ar_i) / std::max(ar_d, ar_i);
    return cfg.p1 + cfg.p2 * position + cfg.p3 * shape;
}

const std::map<DocId, std::vector<InstanceRecord>>& SketchIndex::lookup(std::string_view cls) const {
    auto canonical = canonical_class(cls);
    if (!canonical) return kNoInstances;
    auto it = classes_.find(*canonical);
    return it == classes_.end() ? kNoInstances : it->second;
}

std::size_t SketchIndex::num_instances() const {
    std::size_t n = 0;
    for (const auto& [cls, screens] : classes_) {
        for (const auto& [doc, instances] : screens) n += instances.size();
    }
    return n;
}

ScoreMap SketchIndex::score_class_doodles(std::string_view cls, const std::vector<DoodlePlacement>& placements,
                                          const RankingConfig& cfg) const {
    if (placements.empty()) {
        throw ValidationError("no doodles given for class \"" + std::string(cls) + "\"");
    }
    const auto canonical = canonical_class(cls);
    if (!canonical) {
        throw ValidationError("unsupported doodle class \"" + std::string(cls) + "\"");
    }
    std::vector<TileVector> placement_cov;
    placement_cov.reserve(placements.size());
    for (const auto& p : placements) {
        if (auto pc = canonical_class(p.icon_class); !pc || *pc != *canonical) {
            throw ValidationError("doodle of class \"" + p.icon_class + "\" scored as \"" + *canonical + "\"");
        }
        placement_cov.push_back(tile_coverage(p.bbox, grid_));
    }

    struct Pair {
        double score;
        std::uint32_t placement;
        std::uint32_t instance;
    };

    ScoreMap out;
    std::vector<Pair> pairs;
    std::vector<char> placement_used, instance_used;
    for (const auto& [doc, instances] : lookup(*canonical)) {
        pairs.clear();
        for (std::uint32_t i = 0; i < instances.size(); ++i) {
            const auto smoothed = smooth_coverage(instances[i].coverage, cfg.delta_w, grid_);
            for (std::uint32_t d = 0; d < placements.size(); ++d) {
                pairs.push_back({placement_match(placement_cov[d], placements[d].bbox, smoothed, instances[i].bbox, cfg),
                                 d, i});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.placement != b.placement) return a.placement < b.placement;
            return a.instance < b.instance;
        });
        placement_used.assign(placements.size(), 0);
        instance_used.assign(instances.size(), 0);
        double total = 0.0;
        std::size_t matched = 0;
        for (const auto& p : pairs) {
            if (placement_used[p.placement] || instance_used[p.instance]) continue;
            placement_used[p.placement] = instance_used[p.instance] = 1;
            total += p.score;
            if (++matched == std::min(placements.size(), instances.size())) break;
        }
        total -= cfg.c_w * static_cast<double>(placements.size() - matched);
        out.emplace(doc, std::max(0.0, total));
    }
    return out;
}

SketchIndex SketchIndex::build(const Corpus& corpus, const ClassMap& class_map, const TileGrid& grid) {
    SketchIndex index;
    index.grid_ = grid;
    index.doc_ids_.reserve(corpus.size());
    for (DocId doc = 0; doc < corpus.size(); ++doc) {
        const Screen& screen = corpus.screen(doc);
        index.doc_ids_.push_back(screen.id);
        const double w = screen.width, h = screen.height;
        auto visit = [&](auto&& self, const UiElement& e) -> void {
            std::optional<std::string> cls;
            if (e.icon_class) cls = class_map.map(*e.icon_class);
            if (!cls && e.element_class) cls = class_map.map(*e.element_class);
            if (cls) {
                InstanceRecord rec;
                rec.doc = doc;
                rec.icon_class = *cls;
                rec.bbox = {e.bounds.left / w, e.bounds.top / h, e.bounds.right / w, e.bounds.bottom / h};
                rec.coverage = tile_coverage(rec.bbox, grid);
                index.classes_[*cls][doc].push_back(std::move(rec));
            } else if (e.icon_class || e.element_class) {
                ++index.skipped_labels_;
            }
            for (const auto& c : e.children) self(self, c);
        };
        visit(visit, screen.root);
    }
    return index;
}

std::string SketchIndex::serialize() const {
    detail::BinaryWriter w;
    w.put_magic(kMagic, kVersion);
    w.put<std::uint8_t>(grid_.transposed ? 1 : 0);
    w.put<std::uint64_t>(skipped_labels_);
    w.put<std::uint64_t>(doc_ids_.size());
    for (const auto& id : doc_ids_) w.put_string(id);
    w.put<std::uint64_t>(classes_.size());
    for (const auto& [cls, screens] : classes_) {
        w.put_string(cls);
        w.put<std::uint64_t>(screens.size());
        for (const auto& [doc, instances] : screens) {
            w.put<std::uint32_t>(doc);
            w.put<std::uint64_t>(instances.size());
            for (const auto& rec : instances) {
                for (double c : rec.coverage) w.put(c);
                w.put(rec.bbox.left);
                w.put(rec.bbox.top);
                w.put(rec.bbox.right);
                w.put(rec.bbox.bottom);
            }
        }
    }
    return w.take();
}

SketchIndex SketchIndex::deserialize(std::string_view bytes) {
    detail::BinaryReader r(bytes);
    if (const auto version = r.expect_magic(kMagic); version != kVersion) {
        throw ParseError("unsupported sketch index version " + std::to_string(version));
    }
    SketchIndex index;
    index.grid_.transposed = r.get<std::uint8_t>() != 0;
    index.skipped_labels_ = static_cast<std::size_t>(r.get<std::uint64_t>());
    index.doc_ids_.resize(r.get_count(4));
    for (auto& id : index.doc_ids_) id = r.get_string();
    const auto n_classes = r.get_count(12);
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto cls = r.get_string();
        if (!canonical_class(cls) || *canonical_class(cls) != cls) {
            throw ParseError("corrupt sketch index: unknown class \"" + cls + "\"");
        }
        auto& screens = index.classes_[cls];
        const auto n_screens = r.get_count(12);
        for (std::size_t s = 0; s < n_screens; ++s) {
            const auto doc = r.get<std::uint32_t>();
            if (doc >= index.doc_ids_.size()) throw ParseError("corrupt sketch index: doc out of range");
            auto& instances = screens[doc];
            instances.resize(r.get_count(sizeof(double) * (kTileCount + 4)));
            for (auto& rec : instances) {
                rec.doc = doc;
                rec.icon_class = cls;
                for (double& v : rec.coverage) v = r.get<double>();
                rec.bbox.left = r.get<double>();
                rec.bbox.top = r.get<double>();
                rec.bbox.right = r.get<double>();
                rec.bbox.bottom = r.get<double>();
            }
        }
    }
    if (!r.done()) throw ParseError("trailing bytes after sketch index");
    return index;
}

void SketchIndex::save(const std::filesystem::path& path) const {
    detail::write_binary_file(path.string(), serialize());
}

SketchIndex SketchIndex::load(const std::filesystem::path& path) {
    const auto bytes = detail::read_binary_file(path.string());
    try {
        return deserialize(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace screensearch
