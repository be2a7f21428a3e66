#include "oracles.hpp"

#include "screensearch/error.hpp"
#include "screensearch/ranker.hpp"

#include <doctest.h>

#include <cmath>

using namespace screensearch;

namespace {

struct Built {
    Corpus corpus;
    TextIndex text;
    SketchIndex sketch;
};

Built build(const oracle::Instance& inst) {
    Built b{Corpus(inst.screens), {}, {}};
    b.text = TextIndex::build(b.corpus, TextPipeline(), inst.synonyms);
    b.sketch = SketchIndex::build(b.corpus, ClassMap::identity());
    return b;
}

} // namespace

TEST_CASE("query construction") {
    Query q;
    CHECK(q.empty());
    q.add_icon({"left_arrow", {0, 0, 0.1, 0.1}});
    q.add_icon({"Left arrow", {0.2, 0, 0.3, 0.1}});
    CHECK(q.sketch.size() == 1);
    CHECK(q.num_icons() == 2);
    CHECK_THROWS_AS(q.add_icon({"Unicorn", {0, 0, 0.1, 0.1}}), ValidationError);
    CHECK(text_label(parse_text_query("t:Editors")) == "text:TL+TR:editor");
    CHECK(text_label(parse_text_query("x")) == "text:TL+TR+BL+BR:x");
}

TEST_CASE("rank agrees with the literal fusion oracle") {
    Rng rng(1234);
    const TextPipeline pipeline;
    for (int round = 0; round < 300; ++round) {
        const auto inst = oracle::random_instance(rng);
        const auto b = build(inst);
        const auto got = rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit);
        const auto want = oracle::rank(inst.screens, inst.query, pipeline, inst.synonyms, ClassMap::identity(), inst.cfg);
        CHECK(oracle::compare(got, want, inst.limit, 1e-9) == "");
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].rank == i + 1);
            if (i > 0) {
                CHECK(got[i - 1].score >= got[i].score);
                if (got[i - 1].score == got[i].score) CHECK(got[i - 1].screen_id < got[i].screen_id);
            }
        }
    }
}

TEST_CASE("explanations sum to the fused score") {
    Rng rng(99);
    for (int round = 0; round < 150; ++round) {
        const auto inst = oracle::random_instance(rng);
        const auto b = build(inst);
        for (const auto& e : rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit)) {
            const auto ex = explain(inst.query, e.screen_id, b.sketch, b.text, inst.cfg);
            double sum = 0.0;
            for (const auto& c : ex.components) {
                CHECK(c.value >= 0.0);
                sum += c.value;
            }
            CHECK(ex.total == doctest::Approx(e.score).epsilon(1e-12));
            CHECK(sum == doctest::Approx(e.score).epsilon(1e-12));
        }
    }
}

TEST_CASE("a shorter limit returns a prefix of a longer one") {
    Rng rng(7);
    for (int round = 0; round < 100; ++round) {
        const auto inst = oracle::random_instance(rng);
        const auto b = build(inst);
        const auto full = rank(inst.query, b.sketch, b.text, inst.cfg, 1000);
        const auto cut = rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit);
        REQUIRE(cut.size() == std::min(inst.limit, full.size()));
        for (std::size_t i = 0; i < cut.size(); ++i) CHECK(cut[i] == full[i]);
    }
}

TEST_CASE("scaling all placement parameters leaves the ranking unchanged") {
    Rng rng(8);
    for (int round = 0; round < 100; ++round) {
        const auto inst = oracle::random_instance(rng);
        const auto b = build(inst);
        RankingConfig doubled = inst.cfg;
        doubled.p1 *= 2;
        doubled.p2 *= 2;
        doubled.p3 *= 2;
        doubled.c_w *= 2;
        doubled.weights.exact *= 2;
        doubled.weights.synonym *= 2;
        const auto a = rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit);
        const auto c = rank(inst.query, b.sketch, b.text, doubled, inst.limit);
        REQUIRE(a.size() == c.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(c[i].score == doctest::Approx(a[i].score).epsilon(1e-12));
    }
}

TEST_CASE("repeating a text query does not change the result") {
    Rng rng(17);
    for (int round = 0; round < 100; ++round) {
        auto inst = oracle::random_instance(rng);
        if (inst.query.texts.empty()) continue;
        const auto b = build(inst);
        const auto a = rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit);
        inst.query.add_text(inst.query.texts.front());
        CHECK(rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit) == a);
    }
}

TEST_CASE("rank is a pure function of its inputs") {
    Rng rng(18);
    const auto inst = oracle::random_instance(rng);
    const auto b = build(inst);
    const auto first = rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit);
    for (int i = 0; i < 5; ++i) CHECK(rank(inst.query, b.sketch, b.text, inst.cfg, inst.limit) == first);
}

TEST_CASE("rejected inputs") {
    Rng rng(19);
    const auto inst = oracle::random_instance(rng);
    const auto b = build(inst);
    CHECK_THROWS_AS(rank(Query{}, b.sketch, b.text, inst.cfg), ValidationError);
    CHECK_THROWS_AS(rank(inst.query, b.sketch, b.text, inst.cfg, 0), ValidationError);
    CHECK_THROWS_AS(explain(inst.query, "no-such-screen", b.sketch, b.text, inst.cfg), NotFoundError);

    const auto other = SketchIndex::build(Corpus(), ClassMap::identity());
    CHECK_THROWS_AS(rank(inst.query, other, b.text, inst.cfg), ValidationError);
}

TEST_CASE("a component with zero maximum contributes nothing") {
    Screen s;
    s.id = "only";
    s.width = s.height = 100;
    s.root.bounds = {0, 0, 100, 100};
    UiElement star;
    star.icon_class = "Star";
    star.bounds = {0, 0, 10, 10};
    s.root.children.push_back(star);
    const Corpus corpus({s});
    const auto text = TextIndex::build(corpus, TextPipeline(), {});
    const auto sketch = SketchIndex::build(corpus, ClassMap::identity());

    RankingConfig cfg;
    cfg.c_w = 100.0;
    Query q;
    for (int i = 0; i < 3; ++i) q.add_icon({"Star", {0.5, 0.5, 0.6, 0.6}});
    CHECK(sketch.score_class_doodles("Star", q.sketch.at("Star"), cfg).at(0) == 0.0);
    CHECK(rank(q, sketch, text, cfg).empty());

    q.add_text(parse_text_query("star"));
    const auto r = rank(q, sketch, text, cfg);
    REQUIRE(r.size() == 1);
    CHECK(r[0].score == doctest::Approx(1.0));
}

TEST_CASE("per-component contributions are bounded and the best screen gets the full share") {
    Rng rng(20);
    for (int round = 0; round < 100; ++round) {
        const auto inst = oracle::random_instance(rng);
        const auto b = build(inst);
        std::map<std::string, double> best;
        for (const auto& s : inst.screens) {
            const auto ex = explain(inst.query, s.id, b.sketch, b.text, inst.cfg);
            for (const auto& c : ex.components) {
                double bound = 1.0;
                if (c.label.starts_with("icon:")) bound = double(inst.query.sketch.at(c.label.substr(5)).size());
                CHECK(c.value >= 0.0);
                CHECK(c.value <= bound + 1e-12);
                best[c.label] = std::max(best[c.label], c.value / bound);
            }
        }
        for (const auto& [label, v] : best) CHECK((v == 0.0 || v == doctest::Approx(1.0)));
    }
}

TEST_CASE("hand-evaluated fusion") {
    auto screen = [](std::string id, std::vector<std::pair<std::string, Rect>> icons, std::string text) {
        Screen s;
        s.id = std::move(id);
        s.width = s.height = 1000;
        s.root.bounds = {0, 0, 1000, 1000};
        for (auto& [cls, r] : icons) {
            UiElement e;
            e.icon_class = cls;
            e.bounds = {r.left * 1000, r.top * 1000, r.right * 1000, r.bottom * 1000};
            s.root.children.push_back(e);
        }
        if (!text.empty()) {
            UiElement e;
            e.text = text;
            e.bounds = {600, 600, 700, 700};
            s.root.children.push_back(e);
        }
        return s;
    };
    const Rect tile0{0, 0, 1.0 / 6, 0.25};
    // A has one star for two doodles: 13 - 12 = 1. B has two: 26.
    const Corpus corpus({screen("A", {{"Star", tile0}}, "lift"), screen("B", {{"Star", tile0}, {"Star", tile0}}, "hoist")});
    SynonymTable syn;
    syn.set("hoist", {"lift"});
    const auto text = TextIndex::build(corpus, TextPipeline(), syn);
    const auto sketch = SketchIndex::build(corpus, ClassMap::identity());

    Query q;
    q.add_icon({"Star", tile0});
    q.add_icon({"Star", tile0});
    q.add_text(parse_text_query("lift"));
    const RankingConfig cfg;
    const auto r = rank(q, sketch, text, cfg);
    REQUIRE(r.size() == 2);
    CHECK(r[0].screen_id == "B");
    CHECK(r[0].score == doctest::Approx(2.0 + 0.4));
    CHECK(r[1].score == doctest::Approx(1.0 / 26 * 2 + 1.0));

    const auto ex = explain(q, "B", sketch, text, cfg);
    REQUIRE(ex.components.size() == 2);
    CHECK(ex.components[0].label == "icon:Star");
    CHECK(ex.components[0].value == doctest::Approx(2.0));
    CHECK(ex.components[1].value == doctest::Approx(0.4));

    Query only_text;
    only_text.add_text(parse_text_query("hoist"));
    const auto single = rank(only_text, sketch, text, cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0].score == 1.0);

    Query nothing;
    nothing.add_text(parse_text_query("zebra"));
    CHECK(rank(nothing, sketch, text, cfg).empty());
    CHECK(explain(nothing, "A", sketch, text, cfg).components.empty());
    CHECK(explain(nothing, "A", sketch, text, cfg).total == 0.0);
}
