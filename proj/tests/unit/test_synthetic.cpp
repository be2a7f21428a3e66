#include "oracles.hpp"

#include "screensearch/error.hpp"
#include "screensearch/synthetic.hpp"

#include <doctest.h>

#include <set>

using namespace screensearch;

namespace {

bool has_class(const Screen& s, const std::string& cls, const ClassMap& map) {
    bool found = false;
    auto visit = [&](auto&& self, const UiElement& e) -> void {
        std::optional<std::string> m;
        if (e.icon_class) m = map.map(*e.icon_class);
        if (!m && e.element_class) m = map.map(*e.element_class);
        if (m == cls) found = true;
        for (const auto& c : e.children) self(self, c);
    };
    visit(visit, s.root);
    return found;
}

} // namespace

TEST_CASE("the generator is reproducible across runs") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
    }
}

TEST_CASE("normal draws have the requested moments") {
    Rng r(5);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("every supported class has a template and doodles stay on the canvas") {
    Rng rng(3);
    for (const auto& cls : supported_classes()) {
        const auto t = doodle_template(cls);
        CHECK_FALSE(t.empty());
        CHECK_NOTHROW(validate_sketch(t));
        for (int i = 0; i < 20; ++i) {
            const auto d = generate_doodle(cls, rng);
            CHECK_NOTHROW(validate_sketch(d));
            for (const auto& s : d) {
                for (const auto& p : s) {
                    CHECK(p.x >= 0.0);
                    CHECK(p.x <= 1.0);
                    CHECK(p.y >= 0.0);
                    CHECK(p.y <= 1.0);
                }
            }
        }
    }
    CHECK_THROWS_AS(doodle_template("Unicorn"), ValidationError);
    CHECK_THROWS_AS(generate_doodle_set({"Star"}, 0, 1), ValidationError);
}

TEST_CASE("doodle sets depend only on the seed") {
    const auto a = generate_doodle_set({"Star", "Menu"}, 3, 9);
    const auto b = generate_doodle_set({"Star", "Menu"}, 3, 9);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].icon_class == b[i].icon_class);
        CHECK(a[i].sketch == b[i].sketch);
    }
    CHECK(a[0].icon_class == "Star");
    CHECK(a[5].icon_class == "Menu");
}

TEST_CASE("synthetic labels map back to doodle classes") {
    const auto map = synthetic_class_map();
    for (const auto& cls : supported_classes()) CHECK(map.map(synthetic_icon_label(cls)) == cls);
    CHECK_THROWS_AS(synthetic_icon_label("Unicorn"), ValidationError);
}

TEST_CASE("vocabulary words are distinct") {
    std::set<std::string> seen;
    for (std::size_t r = 0; r < 20000; ++r) CHECK(seen.insert(synthetic_word(r)).second);
}

TEST_CASE("generated corpora are valid and reproducible") {
    CorpusOptions opt;
    opt.screens = 200;
    opt.seed = 17;
    const auto a = generate_corpus(opt);
    const auto b = generate_corpus(opt);
    REQUIRE(a.size() == 200);
    const auto& cats = element_categories();
    const Vocabulary vocab{std::set<std::string>(cats.begin(), cats.end())};
    std::set<std::string> ids;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(screen_to_json(a[i]) == screen_to_json(b[i]));
        CHECK(ids.insert(a[i].id).second);
        CHECK_NOTHROW(parse_screen(screen_to_json(a[i]), &vocab));
    }
    CHECK_NOTHROW(Corpus{a});
    opt.screens = 0;
    CHECK_THROWS_AS(generate_corpus(opt), ValidationError);
}

TEST_CASE("planted targets are unique for their query") {
    PlantedOptions opt;
    opt.distractors = 400;
    opt.targets = 25;
    opt.seed = 3;
    const auto bench = generate_planted_benchmark(opt);
    CHECK(bench.screens.size() == 425);
    REQUIRE(bench.queries.size() == 25);

    const auto map = synthetic_class_map();
    const TextPipeline pipeline;
    MatchWeights exact_only;
    for (const auto& q : bench.queries) {
        REQUIRE(q.query.sketch.size() == 2);
        REQUIRE(q.query.texts.size() == 1);
        const auto& text = q.query.texts[0];
        std::size_t matching = 0;
        std::string who;
        for (const auto& s : bench.screens) {
            bool all = oracle::text_score(s, text, pipeline, {}, exact_only) > 0;
            for (const auto& [cls, placements] : q.query.sketch) all = all && has_class(s, cls, map);
            if (all) {
                ++matching;
                who = s.id;
            }
        }
        CHECK(matching == 1);
        CHECK(who == q.target_id);
    }
}
