#include "oracles.hpp"
#include "temp_dir.hpp"

#include "screensearch/error.hpp"
#include "screensearch/eval.hpp"
#include "screensearch/index_bundle.hpp"
#include "screensearch/synthetic.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace screensearch;

namespace {

struct Fixture {
    PlantedBenchmark bench;
    Corpus corpus;
    IndexBundle bundle;

    Fixture() {
        PlantedOptions opt;
        opt.distractors = 300;
        opt.targets = 20;
        bench = generate_planted_benchmark(opt);
        corpus = Corpus(bench.screens);
        bundle = IndexBundle::build(corpus, TextPipeline(), {}, synthetic_class_map());
    }

    std::string queries_text() const {
        std::string out = "# planted queries\n\n";
        for (const auto& q : bench.queries) out += format_query_line(q.target_id, q.query, q.raw_texts) + "\n";
        return out;
    }
};

} // namespace

TEST_CASE("icon field parsing") {
    const auto p = parse_icon_field("icon:Star@0.1,0.2,0.3,0.4;icon:left_arrow@0,0,0.5,0.5");
    REQUIRE(p.size() == 2);
    CHECK(p[0].icon_class == "Star");
    CHECK(p[0].bbox == Rect{0.1, 0.2, 0.3, 0.4});
    CHECK(parse_icon_field("").empty());
    CHECK_THROWS_AS(parse_icon_field("Star@0,0,1,1"), ParseError);
    CHECK_THROWS_AS(parse_icon_field("icon:Star"), ParseError);
    CHECK_THROWS_AS(parse_icon_field("icon:Star@0,0,1"), ParseError);
    CHECK_THROWS_AS(parse_icon_field("icon:Star@0,0,x,1"), ParseError);
    CHECK_THROWS_AS(parse_icon_field("icon:Unicorn@0,0,1,1"), ValidationError);
    CHECK_THROWS_AS(parse_icon_field("icon:Star@0.5,0,0.5,1"), ValidationError);
    CHECK_THROWS_AS(parse_icon_field("icon:Star@0,0,1.5,1"), ValidationError);
}

TEST_CASE("query files keep good rows and report bad ones") {
    const auto parsed = parse_queries("# header\n"
                                      "s1\ticon:Star@0,0,0.1,0.1\ttl:editor\n"
                                      "\n"
                                      "s2\t\tnecklace b:weather\r\n"
                                      "broken line\n"
                                      "s3\t\t\n"
                                      "s4\ticon:Nope@0,0,1,1\t\n",
                                      TextPipeline());
    REQUIRE(parsed.queries.size() == 2);
    CHECK(parsed.queries[0].line == 2);
    CHECK(parsed.queries[0].query.num_icons() == 1);
    CHECK(parsed.queries[1].target_id == "s2");
    CHECK(parsed.queries[1].query.texts.size() == 2);
    REQUIRE(parsed.errors.size() == 3);
    CHECK(parsed.errors[0].line == 5);
    CHECK(parsed.errors[1].line == 6);
    CHECK(parsed.errors[2].line == 7);
    CHECK(parse_queries("", TextPipeline()).queries.empty());
}

TEST_CASE("formatted query lines parse back to the same query") {
    Rng rng(4);
    for (int i = 0; i < 300; ++i) {
        const auto inst = oracle::random_instance(rng);
        std::vector<std::string> raw;
        Query q;
        q.sketch = inst.query.sketch;
        for (std::size_t k = rng.below(3); k > 0; --k) {
            std::string chunk = oracle::instance_words()[rng.below(16)];
            if (rng.chance(0.5)) chunk = std::string(kPositionalKeywords[rng.below(12)].prefix) + ":" + chunk;
            raw.push_back(chunk);
            q.add_text(parse_text_query(chunk));
        }
        if (q.empty()) continue;
        const auto line = format_query_line("target", q, raw);
        const auto parsed = parse_queries(line, TextPipeline());
        REQUIRE(parsed.errors.empty());
        REQUIRE(parsed.queries.size() == 1);
        const auto& back = parsed.queries[0].query;
        CHECK(back.texts == q.texts);
        REQUIRE(back.sketch.size() == q.sketch.size());
        for (const auto& [cls, ps] : q.sketch) {
            const auto& bs = back.sketch.at(cls);
            REQUIRE(bs.size() == ps.size());
            for (std::size_t k = 0; k < ps.size(); ++k) CHECK(bs[k].bbox == ps[k].bbox);
        }
    }
}

TEST_CASE("evaluation ranks agree with direct search") {
    const Fixture f;
    const auto parsed = parse_queries(f.queries_text(), TextPipeline());
    REQUIRE(parsed.errors.empty());
    const RankingConfig cfg;
    const auto report = run_eval(f.bundle, parsed, cfg, 50, 1);
    REQUIRE(report.rows.size() == f.bench.queries.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const auto result = f.bundle.search(parsed.queries[i].query, cfg, 50);
        std::optional<std::size_t> want;
        for (const auto& e : result) {
            if (e.screen_id == row.target_id) want = e.rank;
        }
        CHECK(row.rank == want);
        CHECK(row.latency_ms >= 0.0);
    }
    CHECK(report.top1 == report.top_k(1));
    CHECK(report.top1 <= report.top10);
    CHECK(report.top10 <= report.top50);
    CHECK(report.latency_p95_ms >= 0.0);

    for (unsigned threads : {2u, 4u}) {
        const auto again = run_eval(f.bundle, parsed, cfg, 50, threads);
        REQUIRE(again.rows.size() == report.rows.size());
        for (std::size_t i = 0; i < again.rows.size(); ++i) {
            CHECK(again.rows[i].target_id == report.rows[i].target_id);
            CHECK(again.rows[i].rank == report.rows[i].rank);
        }
    }
}

TEST_CASE("unknown targets and empty input") {
    const Fixture f;
    const auto parsed = parse_queries("nobody\t\ttl:editor\n", TextPipeline());
    const auto report = run_eval(f.bundle, parsed, {}, 50, 1);
    CHECK(report.rows.empty());
    REQUIRE(report.errors.size() == 1);
    CHECK(report.errors[0].message.find("nobody") != std::string::npos);

    const auto empty = run_eval(f.bundle, ParsedQueries{}, {}, 50, 3);
    CHECK(empty.rows.empty());
    CHECK(empty.top1 == 0.0);
    CHECK_THROWS_AS(run_eval(f.bundle, parsed, {}, 0, 1), ValidationError);
}

TEST_CASE("report formats") {
    EvalReport r;
    r.rows = {{1, "a", 1, 2.0}, {2, "b", std::nullopt, 4.0}, {3, "c", 7, 1.0}};
    r.errors = {{9, "bad row"}};
    r.top1 = r.top_k(1);
    CHECK(r.top_k(1) == doctest::Approx(1.0 / 3));
    CHECK(r.top_k(10) == doctest::Approx(2.0 / 3));
    const auto table = r.to_table();
    CHECK(table.find(">50") != std::string::npos);
    CHECK(table.find("error line 9: bad row") != std::string::npos);

    std::istringstream in(r.to_jsonl());
    std::vector<nlohmann::json> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0]["type"] == "row");
    CHECK(lines[1]["rank"].is_null());
    CHECK(lines[3]["type"] == "error");
    CHECK(lines[4]["type"] == "summary");
    CHECK(lines[4]["queries"] == 3);
}

TEST_CASE("index bundles persist and check consistency") {
    const Fixture f;
    TempDir dir;
    f.bundle.save(dir.path() / "idx");
    const auto back = IndexBundle::load(dir.path() / "idx");
    CHECK(back.text.serialize() == f.bundle.text.serialize());
    CHECK(back.sketch.serialize() == f.bundle.sketch.serialize());

    f.bundle.save(dir.path() / "again");
    for (const char* name : {kTextIndexFile, kSketchIndexFile}) {
        std::ifstream a(dir.path() / "idx" / name, std::ios::binary), b(dir.path() / "again" / name, std::ios::binary);
        CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));
    }

    std::filesystem::remove(dir.path() / "again" / kSketchIndexFile);
    CHECK_THROWS_WITH_AS(IndexBundle::load(dir.path() / "again"), doctest::Contains("sketch.idx"), IoError);

    const auto other = IndexBundle::build(Corpus(std::vector<Screen>(f.bench.screens.begin(), f.bench.screens.begin() + 5)),
                                          TextPipeline(), {}, synthetic_class_map());
    other.sketch.save(dir.path() / "idx" / kSketchIndexFile);
    CHECK_THROWS_AS(IndexBundle::load(dir.path() / "idx"), ValidationError);
}

TEST_CASE("corpus vocabulary holds lemmas without stop-words or entities") {
    Lexicons lex = Lexicons::defaults();
    lex.named_entities.insert("twitter");
    const TextPipeline pipeline(lex);
    Screen s;
    s.id = "x";
    s.width = s.height = 100;
    s.root.bounds = {0, 0, 100, 100};
    UiElement e;
    e.bounds = {0, 0, 50, 50};
    e.text = "Share on Twitter photos";
    s.root.children.push_back(e);
    const auto vocab = corpus_vocabulary(Corpus({s}), pipeline);
    CHECK(vocab == std::set<std::string>{"photo", "share"});
}
