#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace screensearch {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered pen positions in normalized canvas coordinates.
using Stroke = std::vector<Point>;
/// All strokes of one UI element's doodle.
using Sketch = std::vector<Stroke>;

struct Prediction {
    std::string icon_class;
    double confidence = 0.0;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Largest Euclidean distance over all pairs of points of the stroke.
double max_pairwise_distance(const Stroke& stroke);

/// Number of points the resampled stroke gets: max(2, round(20 * dmax)).
std::size_t resample_count(const Stroke& stroke);

/// Re-places the stroke's points at equal arc-length steps along the original
/// polyline, keeping both endpoints. Strokes with fewer than two points or
/// zero length come back unchanged.
Stroke resample_stroke(const Stroke& stroke);

/// Translates and uniformly scales the sketch so its bounding box fits the
/// unit square, centered. A zero-extent sketch collapses to (0.5, 0.5).
Sketch normalize_sketch(const Sketch& sketch);

/// Throws ValidationError for an empty sketch, an empty stroke, or coordinates
/// that are not finite.
void validate_sketch(const Sketch& sketch);

/// Source of top-3 doodle predictions.
class Classifier {
public:
    virtual ~Classifier() = default;

    /// At most three predictions, descending confidence. Throws ValidationError
    /// on an empty sketch.
    virtual std::vector<Prediction> classify(const Sketch& sketch) const = 0;
};

struct LabeledSketch {
    Sketch sketch;
    std::string icon_class;
};

/// Reference classifier: normalize, resample, fixed-length features, then a
/// distance-weighted k-nearest-neighbour vote over stored exemplars.
class KnnClassifier final : public Classifier {
public:
    static constexpr std::size_t kNeighbours = 3;
    static constexpr std::size_t kPathPoints = 32;
    static constexpr std::size_t kDirectionBins = 8;

    KnnClassifier() = default;

    /// Every class in `classes` needs at least one example; examples of other
    /// classes are rejected.
    static KnnClassifier train(const std::vector<LabeledSketch>& examples, const std::vector<std::string>& classes);

    std::vector<Prediction> classify(const Sketch& sketch) const override;

    /// Feature vector of a sketch (after normalization and resampling).
    static std::vector<double> features(const Sketch& sketch);

    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t num_exemplars() const { return labels_.size(); }

    std::string serialize() const;
    static KnnClassifier deserialize(std::string_view bytes);
    void save(const std::filesystem::path& path) const;
    static KnnClassifier load(const std::filesystem::path& path);

private:
    std::vector<std::string> classes_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::vector<double>> exemplars_;
};

} // namespace screensearch
