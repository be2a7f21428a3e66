#include "screensearch/text_index.hpp"

#include "binary_io.hpp"
#include "screensearch/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace screensearch {

namespace {

constexpr std::string_view kMagic = "SSTXTIDX";
constexpr std::uint32_t kVersion = 1;

constexpr ZoneSet TL = ZoneSet::of(Quadrant::TL);
constexpr ZoneSet TR = ZoneSet::of(Quadrant::TR);
constexpr ZoneSet BL = ZoneSet::of(Quadrant::BL);
constexpr ZoneSet BR = ZoneSet::of(Quadrant::BR);

// Single edit: equal lengths differ in one place, or one string is the other
// with one character inserted.
bool within_one_edit(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    if (b.size() - a.size() > 1) return false;
    std::size_t i = 0;
    while (i < a.size() && a[i] == b[i]) ++i;
    if (i == a.size()) return true;
    const std::size_t skip_a = a.size() == b.size() ? i + 1 : i;
    return std::equal(a.begin() + static_cast<std::ptrdiff_t>(skip_a), a.end(),
                      b.begin() + static_cast<std::ptrdiff_t>(i + 1));
}

bool within_k_edits(std::string_view a, std::string_view b, int k) {
    const auto n = a.size(), m = b.size();
    if ((n > m ? n - m : m - n) > static_cast<std::size_t>(k)) return false;
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        int row_min = cur[0];
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
            row_min = std::min(row_min, cur[j]);
        }
        if (row_min > k) return false;
        std::swap(prev, cur);
    }
    return prev[m] <= k;
}

void for_each_deletion(std::string_view w, auto&& fn) {
    std::string buf;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0 && w[i] == w[i - 1]) continue; // same string as deleting w[i-1]
        buf.assign(w.substr(0, i));
        buf.append(w.substr(i + 1));
        fn(buf);
    }
}

template <typename Set>
std::vector<std::string> sorted(const Set& s) {
    std::vector<std::string> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

const std::array<PositionalKeyword, 12> kPositionalKeywords{{
    {"tl", TL},      {"lt", TL},      {"tr", TR},      {"rt", TR},
    {"bl", BL},      {"lb", BL},      {"br", BR},      {"rb", BR},
    {"t", TL | TR},  {"b", BL | BR},  {"l", TL | BL},  {"r", TR | BR},
}};

std::optional<ZoneSet> zones_for_prefix(std::string_view prefix) {
    const auto lower = to_lower(prefix);
    for (const auto& kw : kPositionalKeywords) {
        if (kw.prefix == lower) return kw.zones;
    }
    return std::nullopt;
}

bool fuzzy_match(std::string_view a, std::string_view b, int k) {
    if (k < 0) return false;
    if (k == 0) return a == b;
    if (k == 1) return within_one_edit(a, b);
    return within_k_edits(a, b, k);
}

TextQuery parse_text_query(std::string_view chunk, const TextPipeline& pipeline) {
    TextQuery q;
    std::string_view term = chunk;
    if (auto colon = chunk.find(':'); colon != std::string_view::npos) {
        if (auto zones = zones_for_prefix(chunk.substr(0, colon))) {
            q.zones = *zones;
            term = chunk.substr(colon + 1);
        }
    }
    if (term.empty()) {
        throw ValidationError("empty query term");
    }
    if (term.find_first_of(" \t\r\n") != std::string_view::npos) {
        throw ValidationError("query chunk contains whitespace: \"" + std::string(chunk) + "\"");
    }
    q.surface = to_lower(term);
    q.term = pipeline.normalize_term(term);
    return q;
}

std::vector<TextQuery> parse_text_queries(std::string_view raw, const TextPipeline& pipeline) {
    std::vector<TextQuery> out;
    std::optional<ZoneSet> pending;
    for (const auto& chunk : tokenize(raw)) {
        if (chunk.back() == ':') {
            if (auto zones = zones_for_prefix(std::string_view(chunk).substr(0, chunk.size() - 1))) {
                pending = zones;
                continue;
            }
        }
        auto q = parse_text_query(chunk, pipeline);
        if (pending && q.zones == ZoneSet::all()) q.zones = *pending;
        pending.reset();
        out.push_back(std::move(q));
    }
    if (pending) {
        throw ValidationError("empty query term");
    }
    return out;
}

TextIndex TextIndex::build(const Corpus& corpus, const TextPipeline& pipeline, const SynonymTable& synonyms) {
    TextIndex index;
    index.pipeline_ = pipeline;
    index.doc_ids_.reserve(corpus.size());

    // term -> postings; docs arrive in order so each list stays doc-sorted.
    std::map<std::string, std::vector<Posting>> lists;
    for (DocId doc = 0; doc < corpus.size(); ++doc) {
        index.doc_ids_.push_back(corpus.screen(doc).id);
        std::map<std::tuple<std::string, Quadrant, ContentKind>, std::uint32_t> counts;
        for (const auto& content : corpus.contents(doc)) {
            for (auto& token : pipeline.run(content.raw_text, content.kind)) {
                ++counts[{std::move(token.lemma), content.quadrant, content.kind}];
            }
        }
        for (auto& [key, tf] : counts) {
            lists[std::get<0>(key)].push_back({doc, std::get<1>(key), std::get<2>(key), tf});
        }
    }

    index.terms_.reserve(lists.size());
    for (auto& [term, postings] : lists) {
        const auto* syns = synonyms.find(term);
        index.term_ids_.emplace(term, static_cast<std::uint32_t>(index.terms_.size()));
        index.terms_.push_back(term);
        index.postings_.push_back(std::move(postings));
        index.synonyms_.push_back(syns ? *syns : std::vector<std::string>{});
    }
    index.build_dictionary();
    return index;
}

void TextIndex::build_dictionary() {
    dict_words_.clear();
    dict_term_.clear();
    dict_synonym_of_.clear();
    deletions_.clear();

    std::unordered_map<std::string, std::uint32_t> ids;
    auto intern = [&](const std::string& w) {
        auto [it, inserted] = ids.emplace(w, static_cast<std::uint32_t>(dict_words_.size()));
        if (inserted) {
            dict_words_.push_back(w);
            dict_term_.push_back(-1);
            dict_synonym_of_.emplace_back();
        }
        return it->second;
    };
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
        dict_term_[intern(terms_[t])] = static_cast<std::int32_t>(t);
    }
    for (std::uint32_t t = 0; t < terms_.size(); ++t) {
        for (const auto& s : synonyms_[t]) {
            auto& of = dict_synonym_of_[intern(s)];
            if (of.empty() || of.back() != t) of.push_back(t);
        }
    }

    for (std::uint32_t id = 0; id < dict_words_.size(); ++id) {
        deletions_[dict_words_[id]].push_back(id);
        for_each_deletion(dict_words_[id], [&](const std::string& d) { deletions_[d].push_back(id); });
    }
}

std::vector<std::uint32_t> TextIndex::candidates(std::string_view word) const {
    std::vector<std::uint32_t> out;
    auto collect = [&](const std::string& key) {
        if (auto it = deletions_.find(key); it != deletions_.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    };
    collect(std::string(word));
    for_each_deletion(word, collect);
    return out;
}

ScoreMap TextIndex::score(const TextQuery& q, const MatchWeights& weights) const {
    std::vector<std::uint32_t> matched;
    for (const std::string* variant : {&q.term, &q.surface}) {
        if (variant->empty()) continue;
        if (weights.max_edit_distance == 1) {
            for (auto id : candidates(*variant)) {
                if (fuzzy_match(*variant, dict_words_[id], 1)) matched.push_back(id);
            }
        } else {
            for (std::uint32_t id = 0; id < dict_words_.size(); ++id) {
                if (fuzzy_match(*variant, dict_words_[id], weights.max_edit_distance)) matched.push_back(id);
            }
        }
    }
    std::sort(matched.begin(), matched.end());
    matched.erase(std::unique(matched.begin(), matched.end()), matched.end());

    ScoreMap scores;
    auto apply = [&](std::uint32_t term, double weight) {
        for (const auto& p : postings_[term]) {
            if (!q.zones.contains(p.quadrant)) continue;
            auto [it, inserted] = scores.emplace(p.doc, weight);
            if (!inserted && it->second < weight) it->second = weight;
        }
    };
    for (auto id : matched) {
        if (dict_term_[id] >= 0) apply(static_cast<std::uint32_t>(dict_term_[id]), weights.exact);
        for (auto term : dict_synonym_of_[id]) apply(term, weights.synonym);
    }
    return scores;
}

const std::vector<Posting>* TextIndex::postings(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? nullptr : &postings_[it->second];
}

const std::vector<std::string>* TextIndex::synonyms_of(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    return it == term_ids_.end() ? nullptr : &synonyms_[it->second];
}

std::string TextIndex::serialize() const {
    detail::BinaryWriter w;
    w.put_magic(kMagic, kVersion);

    const auto& lex = pipeline_.lexicons();
    auto put_list = [&](const std::vector<std::string>& v) {
        w.put<std::uint64_t>(v.size());
        for (const auto& s : v) w.put_string(s);
    };
    put_list(sorted(lex.stopwords));
    put_list(sorted(lex.named_entities));
    const std::map<std::string, std::string> exceptions(lex.lemma_exceptions.begin(), lex.lemma_exceptions.end());
    w.put<std::uint64_t>(exceptions.size());
    for (const auto& [surface, lemma] : exceptions) {
        w.put_string(surface);
        w.put_string(lemma);
    }

    put_list(doc_ids_);
    w.put<std::uint64_t>(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        w.put_string(terms_[t]);
        w.put<std::uint64_t>(postings_[t].size());
        for (const auto& p : postings_[t]) {
            w.put<std::uint32_t>(p.doc);
            w.put<std::uint8_t>(static_cast<std::uint8_t>(p.quadrant));
            w.put<std::uint8_t>(static_cast<std::uint8_t>(p.kind));
            w.put<std::uint32_t>(p.tf);
        }
        put_list(synonyms_[t]);
    }
    return w.take();
}

TextIndex TextIndex::deserialize(std::string_view bytes) {
    detail::BinaryReader r(bytes);
    if (const auto version = r.expect_magic(kMagic); version != kVersion) {
        throw ParseError("unsupported text index version " + std::to_string(version));
    }
    auto get_list = [&] {
        std::vector<std::string> v(r.get_count(4));
        for (auto& s : v) s = r.get_string();
        return v;
    };

    Lexicons lex;
    for (auto& s : get_list()) lex.stopwords.insert(std::move(s));
    for (auto& s : get_list()) lex.named_entities.insert(std::move(s));
    const auto n_exceptions = r.get_count(8);
    for (std::size_t i = 0; i < n_exceptions; ++i) {
        auto surface = r.get_string();
        lex.lemma_exceptions[std::move(surface)] = r.get_string();
    }

    TextIndex index;
    index.pipeline_ = TextPipeline(std::move(lex));
    index.doc_ids_ = get_list();
    const auto n_terms = r.get_count(12);
    for (std::size_t t = 0; t < n_terms; ++t) {
        auto term = r.get_string();
        std::vector<Posting> postings(r.get_count(10));
        for (auto& p : postings) {
            p.doc = r.get<std::uint32_t>();
            const auto quadrant = r.get<std::uint8_t>();
            const auto kind = r.get<std::uint8_t>();
            p.tf = r.get<std::uint32_t>();
            if (quadrant > 3 || kind > 1 || p.doc >= index.doc_ids_.size()) {
                throw ParseError("corrupt text index posting for \"" + term + "\"");
            }
            p.quadrant = static_cast<Quadrant>(quadrant);
            p.kind = static_cast<ContentKind>(kind);
        }
        if (!index.terms_.empty() && !(index.terms_.back() < term)) {
            throw ParseError("corrupt text index: terms out of order");
        }
        index.term_ids_.emplace(term, static_cast<std::uint32_t>(t));
        index.terms_.push_back(std::move(term));
        index.postings_.push_back(std::move(postings));
        index.synonyms_.push_back(get_list());
    }
    if (!r.done()) {
        throw ParseError("trailing bytes after text index");
    }
    index.build_dictionary();
    return index;
}

void TextIndex::save(const std::filesystem::path& path) const {
    detail::write_binary_file(path.string(), serialize());
}

TextIndex TextIndex::load(const std::filesystem::path& path) {
    const auto bytes = detail::read_binary_file(path.string());
    try {
        return deserialize(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace screensearch
