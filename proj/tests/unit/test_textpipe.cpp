#include "oracles.hpp"
#include "temp_dir.hpp"

#include "screensearch/error.hpp"
#include "screensearch/synthetic.hpp"
#include "screensearch/textpipe.hpp"

#include <doctest.h>

#include <fstream>

using namespace screensearch;

namespace {

std::vector<std::string> lemmas(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.lemma);
    return out;
}

} // namespace

TEST_CASE("tokenize splits on whitespace and sentence punctuation") {
    CHECK(tokenize("Sign in") == std::vector<std::string>{"Sign", "in"});
    CHECK(tokenize("  Hello,world!! How are you?  ") ==
          std::vector<std::string>{"Hello", "world", "How", "are", "you"});
    CHECK(tokenize("e-mail a.b") == std::vector<std::string>{"e-mail", "a", "b"});
    CHECK(tokenize("").empty());
    CHECK(tokenize(" .,!? \t\n").empty());
}

TEST_CASE("lemmatizer handles regular and irregular forms") {
    const TextPipeline p;
    CHECK(p.lemmatize("Photos") == "photo");
    CHECK(p.lemmatize("boxes") == "box");
    CHECK(p.lemmatize("stories") == "story");
    CHECK(p.lemmatize("editing") == "edit");
    CHECK(p.lemmatize("running") == "run");
    CHECK(p.lemmatize("went") == "go");
    CHECK(p.lemmatize("children") == "child");
    CHECK(p.lemmatize("settings") == "setting");
    CHECK(p.lemmatize("status") == "status");
    CHECK(p.lemmatize("glass") == "glass");
    CHECK(p.lemmatize("bus") == "bus");
}

TEST_CASE("lemmatizer is idempotent on random words") {
    const TextPipeline p;
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) {
        std::string w = oracle::random_string(rng, "abcdeginorsty'", 1, 12);
        const auto once = p.lemmatize(w);
        CHECK(p.lemmatize(once) == once);
    }
    for (std::size_t r = 0; r < 3000; ++r) {
        const auto once = p.lemmatize(synthetic_word(r));
        CHECK(p.lemmatize(once) == once);
    }
}

TEST_CASE("screen text drops stop-words and element descriptions keep them") {
    const TextPipeline p;
    const auto text = p.run("Open the Settings", ContentKind::ScreenText);
    CHECK(lemmas(text) == std::vector<std::string>{"open", "setting"});
    const auto desc = p.run("arrow up", ContentKind::ElementDescription);
    CHECK(lemmas(desc) == std::vector<std::string>{"arrow", "up"});
    CHECK(desc[1].is_stopword);
    CHECK(p.run("the a of", ContentKind::ScreenText).empty());
}

TEST_CASE("a lemma that is a stop-word counts as one") {
    const TextPipeline p;
    CHECK(p.run("doing", ContentKind::ScreenText).empty());
}

TEST_CASE("named entities are lowercased but not lemmatized") {
    Lexicons lex = Lexicons::defaults();
    lex.named_entities.insert("windows");
    const TextPipeline p(lex);
    const auto toks = p.run("Open Windows", ContentKind::ScreenText);
    REQUIRE(toks.size() == 2);
    CHECK(toks[1].lemma == "windows");
    CHECK(toks[1].is_named_entity);
    CHECK(toks[1].surface == "Windows");
    CHECK(p.normalize_term("WINDOWS") == "windows");
    CHECK(p.normalize_term("Photos") == "photo");
    CHECK(TextPipeline().normalize_term("Windows") == "window");
}

TEST_CASE("pipeline output is deterministic and lowercase") {
    const TextPipeline p;
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        std::string raw;
        const auto n = rng.below(6);
        for (std::size_t k = 0; k < n; ++k) {
            raw += synthetic_word(rng.below(400));
            raw += rng.chance(0.5) ? " " : ", ";
        }
        if (rng.chance(0.5)) raw = "The " + raw;
        for (auto kind : {ContentKind::ScreenText, ContentKind::ElementDescription}) {
            const auto a = p.run(raw, kind);
            CHECK(a == p.run(raw, kind));
            for (const auto& t : a) {
                CHECK(t.lemma == to_lower(t.lemma));
                CHECK_FALSE(t.lemma.empty());
                if (kind == ContentKind::ScreenText) CHECK_FALSE(t.is_stopword);
            }
        }
    }
}

TEST_CASE("lexicon files override the built-in lists") {
    TempDir dir;
    std::ofstream(dir.path() / "stopwords.txt") << "# comment\nfoo\n\nBar\n";
    std::ofstream(dir.path() / "ne_lexicon.txt") << "Spotify\n";
    std::ofstream(dir.path() / "lemma_exceptions.tsv") << "geese\tgoose\n";
    const TextPipeline p(Lexicons::load(dir.path()));
    CHECK(p.is_stopword("bar"));
    CHECK(p.is_stopword("FOO"));
    CHECK_FALSE(p.is_stopword("the"));
    CHECK(p.is_named_entity("spotify"));
    CHECK(p.lemmatize("geese") == "goose");
    CHECK(lemmas(p.run("the foo", ContentKind::ScreenText)) == std::vector<std::string>{"the"});

    std::ofstream(dir.path() / "lemma_exceptions.tsv") << "broken line\n";
    CHECK_THROWS_WITH_AS(Lexicons::load(dir.path()), doctest::Contains("lemma_exceptions.tsv:1"), ParseError);
}

TEST_CASE("absent lexicon files fall back to defaults") {
    TempDir dir;
    const auto lex = Lexicons::load(dir.path());
    CHECK(lex.stopwords == Lexicons::defaults().stopwords);
    CHECK(lex.named_entities.empty());
}

TEST_CASE("examples from the pipeline description") {
    const TextPipeline p;
    CHECK(tokenize("Well done!") == std::vector<std::string>{"Well", "done"});
    CHECK(tokenize("a,b.c?d!e") == std::vector<std::string>{"a", "b", "c", "d", "e"});
    CHECK(p.lemmatize("walked") == "walk");
    CHECK(p.lemmatize("walking") == "walk");
    CHECK(p.lemmatize("better") == "better");
    CHECK(p.lemmatize("XyzQ") == "xyzq");
    CHECK(lemmas(p.preprocess({"the", "Editor"}, ContentKind::ScreenText)) == std::vector<std::string>{"editor"});
}

TEST_CASE("preprocessing is idempotent and descriptions keep every token") {
    Lexicons lex = Lexicons::defaults();
    lex.named_entities.insert("facebook");
    const TextPipeline p(lex);
    Rng rng(6);
    const std::vector<std::string> pool{"the", "Photos", "up", "Facebook", "walking", "is", "boxes", "Settings", "down"};
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> words;
        for (std::size_t k = rng.below(7); k > 0; --k) words.push_back(pool[rng.below(pool.size())]);
        for (auto kind : {ContentKind::ScreenText, ContentKind::ElementDescription}) {
            const auto once = p.preprocess(words, kind);
            if (kind == ContentKind::ElementDescription) CHECK(once.size() == words.size());
            std::vector<std::string> again_in;
            for (const auto& t : once) {
                CHECK(t.lemma == (t.is_named_entity ? to_lower(t.surface) : p.lemmatize(t.surface)));
                again_in.push_back(t.lemma);
            }
            CHECK(lemmas(p.preprocess(again_in, kind)) == lemmas(once));
        }
    }
    const auto fb = p.preprocess({"Facebook"}, ContentKind::ScreenText);
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].is_named_entity);
}
