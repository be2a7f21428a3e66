#pragma once

#include "screensearch/corpus.hpp"
#include "screensearch/ranker.hpp"
#include "screensearch/recognizer.hpp"
#include "screensearch/sketch_index.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace screensearch {

/// SplitMix64-seeded xoshiro256** with portable uniform/normal helpers, so
/// generated files do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal(double mean = 0.0, double stddev = 1.0);
    bool chance(double p) { return uniform() < p; }

private:
    std::uint64_t s_[4];
};

// --- doodles --------------------------------------------------------------

/// Clean template strokes of a supported class inside the unit square.
/// Throws ValidationError for an unsupported class.
Sketch doodle_template(std::string_view icon_class);

struct DoodleNoise {
    double max_rotation = 0.12;   // radians
    double scale_jitter = 0.12;   // independent x/y scale in [1-j, 1+j]
    double point_sigma = 0.012;   // Gaussian jitter per point
    double dropout = 0.10;        // chance of dropping an interior point
};

/// One jittered doodle of `icon_class`, placed somewhere on the unit canvas.
Sketch generate_doodle(std::string_view icon_class, Rng& rng, const DoodleNoise& noise = {});

/// `per_class` doodles for each class, in class order. Throws ValidationError
/// when per_class is zero.
std::vector<LabeledSketch> generate_doodle_set(const std::vector<std::string>& classes, std::size_t per_class,
                                               std::uint64_t seed, const DoodleNoise& noise = {});

// --- corpus ---------------------------------------------------------------

/// The 25 element categories used as the corpus label vocabulary.
const std::vector<std::string>& element_categories();

/// Corpus icon/element labels of the synthetic corpus and their doodle classes.
ClassMap synthetic_class_map();

/// The synthetic corpus icon label used for a doodle class.
std::string synthetic_icon_label(std::string_view doodle_class);

struct CorpusOptions {
    std::size_t screens = 1000;
    std::uint64_t seed = 1;
    int width = 1440;
    int height = 2560;
    std::size_t vocabulary = 20000; // distinct words available for screen text
    std::string id_prefix = "s";
};

/// Random screens with icons, texts and other labeled elements. Throws
/// ValidationError when options.screens is zero.
std::vector<Screen> generate_corpus(const CorpusOptions& options);

/// Word `rank` of the synthetic text vocabulary (real UI words first).
std::string synthetic_word(std::size_t rank);

// --- planted-target benchmark ---------------------------------------------

struct PlantedQuery {
    std::string target_id;
    Query query;
    /// Raw form of the text queries, e.g. "tl:editor".
    std::vector<std::string> raw_texts;
};

struct PlantedBenchmark {
    std::vector<Screen> screens; // distractors plus targets
    std::vector<PlantedQuery> queries;
};

struct PlantedOptions {
    std::size_t distractors = 10000;
    std::size_t targets = 200;
    std::uint64_t seed = 7;
    /// Std-dev of the user's placement error, as a fraction of the element size.
    double placement_noise = 0.15;
};

/// Plants targets that each carry a unique (icon pair, positional word)
/// combination among generated distractors, and the query describing each.
PlantedBenchmark generate_planted_benchmark(const PlantedOptions& options);

} // namespace screensearch
