#include "screensearch/recognizer.hpp"

#include "binary_io.hpp"
#include "screensearch/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace screensearch {

namespace {

constexpr std::string_view kMagic = "SSKNNMDL";
constexpr std::uint32_t kVersion = 1;
constexpr double kPointsPerUnit = 20.0;
constexpr double kStrokeCountWeight = 0.5;
constexpr double kDirectionWeight = 1.0;
constexpr std::size_t kMaxStrokeCount = 8;

double dist(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Samples `n` points at equal arc-length steps along the segments of all
// strokes, ignoring the pen-up jumps between strokes.
std::vector<Point> sample_path(const Sketch& sketch, std::size_t n) {
    struct Segment {
        Point a, b;
        double start, length;
    };
    std::vector<Segment> segments;
    double total = 0.0;
    for (const auto& stroke : sketch) {
        for (std::size_t i = 1; i < stroke.size(); ++i) {
            const double len = dist(stroke[i - 1], stroke[i]);
            if (len > 0) {
                segments.push_back({stroke[i - 1], stroke[i], total, len});
                total += len;
            }
        }
    }
    std::vector<Point> out(n);
    if (segments.empty()) {
        Point c{0, 0};
        std::size_t count = 0;
        for (const auto& stroke : sketch) {
            for (const auto& p : stroke) {
                c.x += p.x;
                c.y += p.y;
                ++count;
            }
        }
        if (count) c = {c.x / double(count), c.y / double(count)};
        std::fill(out.begin(), out.end(), c);
        return out;
    }
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double target = n == 1 ? 0.0 : total * double(k) / double(n - 1);
        while (seg + 1 < segments.size() && segments[seg].start + segments[seg].length < target) ++seg;
        const auto& s = segments[seg];
        const double t = std::clamp((target - s.start) / s.length, 0.0, 1.0);
        out[k] = {s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y)};
    }
    return out;
}

} // namespace

double max_pairwise_distance(const Stroke& stroke) {
    double best = 0.0;
    for (std::size_t i = 0; i < stroke.size(); ++i) {
        for (std::size_t j = i + 1; j < stroke.size(); ++j) {
            best = std::max(best, dist(stroke[i], stroke[j]));
        }
    }
    return best;
}

std::size_t resample_count(const Stroke& stroke) {
    const double n = std::round(kPointsPerUnit * max_pairwise_distance(stroke));
    return std::max<std::size_t>(2, static_cast<std::size_t>(n));
}

Stroke resample_stroke(const Stroke& stroke) {
    if (stroke.size() < 2) return stroke;

    std::vector<double> cumulative(stroke.size(), 0.0);
    for (std::size_t i = 1; i < stroke.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + dist(stroke[i - 1], stroke[i]);
    }
    const double total = cumulative.back();
    if (!(total > 0)) return stroke;

    const std::size_t n = resample_count(stroke);
    Stroke out;
    out.reserve(n);
    out.push_back(stroke.front());
    std::size_t seg = 1;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double target = total * double(k) / double(n - 1);
        while (seg + 1 < stroke.size() && cumulative[seg] < target) ++seg;
        const double len = cumulative[seg] - cumulative[seg - 1];
        const double t = len > 0 ? (target - cumulative[seg - 1]) / len : 0.0;
        const Point& a = stroke[seg - 1];
        const Point& b = stroke[seg];
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    out.push_back(stroke.back());
    return out;
}

Sketch normalize_sketch(const Sketch& sketch) {
    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    for (const auto& stroke : sketch) {
        for (const auto& p : stroke) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        }
    }
    Sketch out = sketch;
    if (!(max_x >= min_x)) return out; // no points at all

    const double w = max_x - min_x, h = max_y - min_y;
    const double extent = std::max(w, h);
    if (!(extent > 0)) {
        for (auto& stroke : out) {
            for (auto& p : stroke) p = {0.5, 0.5};
        }
        return out;
    }
    const double scale = 1.0 / extent;
    const double off_x = (1.0 - w * scale) / 2.0;
    const double off_y = (1.0 - h * scale) / 2.0;
    for (auto& stroke : out) {
        for (auto& p : stroke) {
            p = {(p.x - min_x) * scale + off_x, (p.y - min_y) * scale + off_y};
        }
    }
    return out;
}

void validate_sketch(const Sketch& sketch) {
    if (sketch.empty()) {
        throw ValidationError("empty sketch");
    }
    for (std::size_t s = 0; s < sketch.size(); ++s) {
        if (sketch[s].empty()) {
            throw ValidationError("stroke " + std::to_string(s) + " has no points");
        }
        for (const auto& p : sketch[s]) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw ValidationError("stroke " + std::to_string(s) + " has a non-finite coordinate");
            }
        }
    }
}

std::vector<double> KnnClassifier::features(const Sketch& sketch) {
    validate_sketch(sketch);
    Sketch prepared = normalize_sketch(sketch);
    for (auto& stroke : prepared) stroke = resample_stroke(stroke);

    std::vector<double> f;
    f.reserve(2 * kPathPoints + 1 + kDirectionBins);
    for (const auto& p : sample_path(prepared, kPathPoints)) {
        f.push_back(p.x);
        f.push_back(p.y);
    }
    f.push_back(kStrokeCountWeight * double(std::min(prepared.size(), kMaxStrokeCount)) / double(kMaxStrokeCount));

    std::vector<double> hist(kDirectionBins, 0.0);
    double total = 0.0;
    for (const auto& stroke : prepared) {
        for (std::size_t i = 1; i < stroke.size(); ++i) {
            const double dx = stroke[i].x - stroke[i - 1].x, dy = stroke[i].y - stroke[i - 1].y;
            const double len = std::hypot(dx, dy);
            if (!(len > 0)) continue;
            // Linear split between the two nearest bin centres.
            const double u = (std::atan2(dy, dx) + std::numbers::pi) / (2 * std::numbers::pi) * double(kDirectionBins) - 0.5;
            const double lo = std::floor(u);
            const double frac = u - lo;
            const auto bin = static_cast<std::size_t>((static_cast<long>(lo) + long(kDirectionBins)) % long(kDirectionBins));
            hist[bin] += len * (1.0 - frac);
            hist[(bin + 1) % kDirectionBins] += len * frac;
            total += len;
        }
    }
    for (double h : hist) f.push_back(total > 0 ? kDirectionWeight * h / total : 0.0);
    return f;
}

KnnClassifier KnnClassifier::train(const std::vector<LabeledSketch>& examples, const std::vector<std::string>& classes) {
    KnnClassifier model;
    model.classes_ = classes;
    std::map<std::string, std::uint32_t> ids;
    for (std::uint32_t i = 0; i < classes.size(); ++i) {
        if (!ids.emplace(classes[i], i).second) {
            throw ValidationError("duplicate class \"" + classes[i] + "\"");
        }
    }
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& ex : examples) {
        auto it = ids.find(ex.icon_class);
        if (it == ids.end()) {
            throw ValidationError("example labeled with undeclared class \"" + ex.icon_class + "\"");
        }
        model.labels_.push_back(it->second);
        model.exemplars_.push_back(features(ex.sketch));
        ++counts[it->second];
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (counts[c] == 0) {
            throw ValidationError("class \"" + classes[c] + "\" has no training examples");
        }
    }
    return model;
}

std::vector<Prediction> KnnClassifier::classify(const Sketch& sketch) const {
    const auto f = features(sketch);
    if (exemplars_.empty()) return {};

    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(exemplars_.size());
    for (std::size_t e = 0; e < exemplars_.size(); ++e) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double diff = f[i] - exemplars_[e][i];
            d2 += diff * diff;
        }
        dists.emplace_back(std::sqrt(d2), e);
    }
    std::sort(dists.begin(), dists.end());

    // k nearest exemplars, extended until three distinct classes have a vote
    // so a top-3 list is always available.
    std::vector<double> votes(classes_.size(), 0.0);
    std::size_t distinct = 0;
    double total = 0.0;
    for (std::size_t n = 0; n < dists.size(); ++n) {
        if (n >= kNeighbours && distinct >= 3) break;
        const auto label = labels_[dists[n].second];
        const double w = 1.0 / (dists[n].first + 1e-9);
        if (votes[label] == 0.0) ++distinct;
        votes[label] += w;
        total += w;
    }

    std::vector<Prediction> out;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        if (votes[c] > 0) out.push_back({classes_[c], votes[c] / total});
    }
    std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.icon_class < b.icon_class;
    });
    if (out.size() > 3) out.resize(3);
    return out;
}

std::string KnnClassifier::serialize() const {
    detail::BinaryWriter w;
    w.put_magic(kMagic, kVersion);
    w.put<std::uint64_t>(classes_.size());
    for (const auto& c : classes_) w.put_string(c);
    const std::size_t dim = exemplars_.empty() ? 0 : exemplars_.front().size();
    w.put<std::uint64_t>(dim);
    w.put<std::uint64_t>(exemplars_.size());
    for (std::size_t e = 0; e < exemplars_.size(); ++e) {
        w.put<std::uint32_t>(labels_[e]);
        for (double v : exemplars_[e]) w.put(v);
    }
    return w.take();
}

KnnClassifier KnnClassifier::deserialize(std::string_view bytes) {
    detail::BinaryReader r(bytes);
    if (const auto version = r.expect_magic(kMagic); version != kVersion) {
        throw ParseError("unsupported recognizer model version " + std::to_string(version));
    }
    KnnClassifier model;
    model.classes_.resize(r.get_count(4));
    for (auto& c : model.classes_) c = r.get_string();
    const auto dim = r.get<std::uint64_t>();
    const std::size_t expected = 2 * kPathPoints + 1 + kDirectionBins;
    const auto n = r.get_count(4);
    if (n > 0 && dim != expected) {
        throw ParseError("recognizer model feature dimension " + std::to_string(dim) + ", expected " +
                         std::to_string(expected));
    }
    for (std::size_t e = 0; e < n; ++e) {
        const auto label = r.get<std::uint32_t>();
        if (label >= model.classes_.size()) throw ParseError("corrupt recognizer model: label out of range");
        std::vector<double> f(dim);
        for (double& v : f) v = r.get<double>();
        model.labels_.push_back(label);
        model.exemplars_.push_back(std::move(f));
    }
    if (!r.done()) throw ParseError("trailing bytes after recognizer model");
    return model;
}

void KnnClassifier::save(const std::filesystem::path& path) const {
    detail::write_binary_file(path.string(), serialize());
}

KnnClassifier KnnClassifier::load(const std::filesystem::path& path) {
    const auto bytes = detail::read_binary_file(path.string());
    try {
        return deserialize(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace screensearch
