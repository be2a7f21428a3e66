#include "screensearch/textpipe.hpp"

#include "screensearch/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace screensearch {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSeparators = " \t\n\r\f\v.,!?";

// Common English function words. "up", "down", "on", "off" are included on
// purpose: they are dropped from screen text but kept in element descriptions.
constexpr std::string_view kDefaultStopwords[] = {
    "a",      "about",   "above", "after", "again", "against", "all",    "am",    "an",     "and",
    "any",    "are",     "as",    "at",    "be",    "because", "been",   "before", "being", "below",
    "between", "both",   "but",   "by",    "can",   "could",   "did",    "do",    "does",   "doing",
    "down",   "during",  "each",  "few",   "for",   "from",    "further", "had",  "has",    "have",
    "having", "he",      "her",   "here",  "hers",  "herself", "him",    "himself", "his",  "how",
    "i",      "if",      "in",    "into",  "is",    "it",      "its",    "itself", "just",  "me",
    "more",   "most",    "my",    "myself", "no",   "nor",     "not",    "now",   "of",     "off",
    "on",     "once",    "only",  "or",    "other", "our",     "ours",   "ourselves", "out", "over",
    "own",    "same",    "she",   "should", "so",   "some",    "such",   "than",  "that",   "the",
    "their",  "theirs",  "them",  "themselves", "then", "there", "these", "they", "this",   "those",
    "through", "to",     "too",   "under", "until", "up",      "very",   "was",   "we",     "were",
    "what",   "when",    "where", "which", "while", "who",     "whom",   "why",   "will",   "with",
    "would",  "you",     "your",  "yours", "yourself", "yourselves",
};

constexpr std::pair<std::string_view, std::string_view> kDefaultExceptions[] = {
    {"better", "better"},     {"best", "best"},         {"worse", "bad"},        {"worst", "bad"},
    {"went", "go"},           {"gone", "go"},           {"goes", "go"},          {"ran", "run"},
    {"does", "do"},           {"did", "do"},            {"done", "done"},        {"made", "make"},
    {"making", "make"},       {"took", "take"},         {"taken", "take"},       {"taking", "take"},
    {"saw", "see"},           {"seen", "see"},          {"wrote", "write"},      {"written", "write"},
    {"writing", "write"},     {"children", "child"},    {"men", "man"},          {"women", "woman"},
    {"people", "people"},     {"mice", "mouse"},        {"feet", "foot"},        {"teeth", "tooth"},
    {"news", "news"},         {"using", "use"},         {"used", "use"},         {"uses", "use"},
    {"sharing", "share"},     {"shared", "share"},      {"typing", "type"},      {"typed", "type"},
    {"storing", "store"},     {"stored", "store"},      {"closing", "close"},    {"closed", "close"},
    {"saving", "save"},       {"saved", "save"},        {"liked", "like"},       {"liking", "like"},
    {"movies", "movie"},      {"cookies", "cookie"},    {"morning", "morning"},  {"evening", "evening"},
    {"nothing", "nothing"},   {"something", "something"}, {"everything", "everything"},
    {"anything", "anything"}, {"thing", "thing"},       {"things", "thing"},     {"string", "string"},
    {"strings", "string"},    {"ceiling", "ceiling"},   {"setting", "setting"},  {"settings", "setting"},
    {"building", "building"}, {"buildings", "building"}, {"wedding", "wedding"},  {"weddings", "wedding"},
    {"shopping", "shopping"}, {"during", "during"},     {"bus", "bus"},          {"status", "status"},
    {"series", "series"},     {"species", "species"},   {"address", "address"},  {"always", "always"},
    {"sometimes", "sometimes"}, {"yes", "yes"},         {"plus", "plus"},        {"minus", "minus"},
    {"canvas", "canvas"},     {"gps", "gps"},           {"sms", "sms"},          {"ios", "ios"},
};

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool has_vowel(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c) || c == 'y'; });
}

bool is_consonant(char c) {
    return c >= 'a' && c <= 'z' && !is_vowel(c);
}

// Repairs a stem left behind by stripping -ing/-ed.
std::string fix_stem(std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) && stem[n - 1] != 'l' &&
        stem[n - 1] != 's' && stem[n - 1] != 'z') {
        stem.pop_back();
        return stem;
    }
    if (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz") || stem.ends_with("v")) {
        stem.push_back('e');
    }
    return stem;
}

// One rewrite step; returns the input unchanged when no rule applies.
std::string strip_once(const std::string& w) {
    const std::size_t n = w.size();
    if (n < 4) return w;
    if (w.ends_with("'s")) return w.substr(0, n - 2);
    if (n >= 5 && (w.ends_with("ies") || w.ends_with("ied"))) return w.substr(0, n - 3) + "y";
    if (w.ends_with("sses") || w.ends_with("xes") || w.ends_with("ches") || w.ends_with("shes") ||
        w.ends_with("zzes")) {
        return w.substr(0, n - 2);
    }
    if (w.ends_with("s") && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is")) {
        return w.substr(0, n - 1);
    }
    if (w.ends_with("ing")) {
        std::string stem = w.substr(0, n - 3);
        if (stem.size() >= 3 && has_vowel(stem)) return fix_stem(std::move(stem));
        return w;
    }
    if (w.ends_with("ed") && !w.ends_with("eed")) {
        std::string stem = w.substr(0, n - 2);
        if (stem.size() >= 3 && has_vowel(stem)) return fix_stem(std::move(stem));
        return w;
    }
    return w;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const auto begin = raw.find_first_not_of(kSeparators, pos);
        if (begin == std::string_view::npos) break;
        auto end = raw.find_first_of(kSeparators, begin);
        if (end == std::string_view::npos) end = raw.size();
        out.emplace_back(raw.substr(begin, end - begin));
        pos = end;
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Lexicons Lexicons::defaults() {
    Lexicons lex;
    for (auto w : kDefaultStopwords) lex.stopwords.emplace(w);
    for (auto [surface, lemma] : kDefaultExceptions) lex.lemma_exceptions.emplace(surface, lemma);
    return lex;
}

std::unordered_set<std::string> Lexicons::load_word_list(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        auto w = trim(line);
        if (!w.empty() && w[0] != '#') words.insert(to_lower(w));
    }
    return words;
}

std::unordered_map<std::string, std::string> Lexicons::load_exceptions(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::unordered_map<std::string, std::string> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path.filename().string() + ":" + std::to_string(lineno) + ": expected surface<TAB>lemma");
        }
        auto surface = to_lower(trim(line.substr(0, tab)));
        auto lemma = to_lower(trim(line.substr(tab + 1)));
        if (surface.empty() || lemma.empty()) {
            throw ParseError(path.filename().string() + ":" + std::to_string(lineno) + ": empty field");
        }
        table[surface] = lemma;
    }
    return table;
}

Lexicons Lexicons::load(const fs::path& dir) {
    Lexicons lex = defaults();
    if (fs::exists(dir / "stopwords.txt")) lex.stopwords = load_word_list(dir / "stopwords.txt");
    if (fs::exists(dir / "ne_lexicon.txt")) lex.named_entities = load_word_list(dir / "ne_lexicon.txt");
    if (fs::exists(dir / "lemma_exceptions.tsv")) {
        lex.lemma_exceptions = load_exceptions(dir / "lemma_exceptions.tsv");
    }
    return lex;
}

std::string Lemmatizer::operator()(std::string_view surface) const {
    std::string word = to_lower(surface);
    // Iterate to a fixed point so the lemma of a lemma is itself. Exceptions are
    // final; the cap only matters for a cyclic exceptions table.
    for (int step = 0; step < 8; ++step) {
        if (auto it = exceptions_.find(word); it != exceptions_.end()) {
            if (it->second == word) return word;
            word = it->second;
            continue;
        }
        std::string next = strip_once(word);
        if (next == word) return word;
        word = std::move(next);
    }
    return word;
}

TextPipeline::TextPipeline(Lexicons lexicons)
    : lexicons_(std::move(lexicons)), lemmatizer_(lexicons_.lemma_exceptions) {}

bool TextPipeline::is_stopword(std::string_view word) const {
    return lexicons_.stopwords.contains(to_lower(word));
}

bool TextPipeline::is_named_entity(std::string_view word) const {
    return lexicons_.named_entities.contains(to_lower(word));
}

std::string TextPipeline::normalize_term(std::string_view word) const {
    if (is_named_entity(word)) return to_lower(word);
    return lemmatizer_(word);
}

std::vector<Token> TextPipeline::preprocess(const std::vector<std::string>& tokens, PipelineKind kind) const {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const auto& surface : tokens) {
        if (surface.empty()) continue;
        Token t;
        t.surface = surface;
        t.is_named_entity = is_named_entity(surface);
        t.lemma = t.is_named_entity ? to_lower(surface) : lemmatizer_(surface);
        // A lemma that is itself a stop-word ("doing" -> "do") counts as one, so
        // running the pipeline on its own output is a no-op.
        t.is_stopword = !t.is_named_entity && (is_stopword(surface) || is_stopword(t.lemma));
        if (kind == PipelineKind::ScreenText && t.is_stopword) continue;
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Token> TextPipeline::run(std::string_view raw, PipelineKind kind) const {
    return preprocess(tokenize(raw), kind);
}

} // namespace screensearch
