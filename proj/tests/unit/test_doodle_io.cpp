#include "temp_dir.hpp"

#include "screensearch/doodle_io.hpp"
#include "screensearch/error.hpp"
#include "screensearch/synthetic.hpp"

#include <doctest.h>

#include <fstream>

using namespace screensearch;

TEST_CASE("sketch JSON round trip") {
    const Sketch s{{{0, 0}, {0.5, 0.25}}, {{1, 1}}};
    CHECK(sketch_from_json(sketch_to_json(s)) == s);
    CHECK(sketch_from_json("[[[0.1, 0.2]]]") == Sketch{{{0.1, 0.2}}});
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto d = generate_doodle(supported_classes()[rng.below(23)], rng);
        CHECK(sketch_from_json(sketch_to_json(d)) == d);
    }
}

TEST_CASE("malformed sketches") {
    CHECK_THROWS_AS(sketch_from_json("{}"), ParseError);
    CHECK_THROWS_AS(sketch_from_json("[1]"), ParseError);
    CHECK_THROWS_WITH_AS(sketch_from_json("[[[0, 0]], [[1]]]"), doctest::Contains("strokes[1][0]"), ParseError);
    CHECK_THROWS_AS(sketch_from_json("[[[0, \"a\"]]]"), ParseError);
    CHECK_THROWS_AS(sketch_from_json("not json"), ParseError);
}

TEST_CASE("doodle sets round trip through JSONL files") {
    const auto set = generate_doodle_set({"Star", "Menu", "Play"}, 4, 2);
    const auto text = doodles_to_jsonl(set);
    const auto back = doodles_from_jsonl(text);
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(back[i].icon_class == set[i].icon_class);
        CHECK(back[i].sketch == set[i].sketch);
    }
    CHECK(doodles_from_jsonl("\n\n").empty());

    TempDir dir;
    save_doodles(set, dir.path() / "d.jsonl");
    CHECK(load_doodles(dir.path() / "d.jsonl").size() == set.size());

    std::ofstream(dir.path() / "bad.jsonl") << doodles_to_jsonl({set[0]}) << "{\"class\": \"Star\"}\n";
    CHECK_THROWS_WITH_AS(load_doodles(dir.path() / "bad.jsonl"), doctest::Contains("bad.jsonl"), ParseError);
    CHECK_THROWS_WITH_AS(load_doodles(dir.path() / "bad.jsonl"), doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(load_doodles(dir.path() / "missing.jsonl"), IoError);
}
