#include "screensearch/synonyms.hpp"

#include "screensearch/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace screensearch {

namespace fs = std::filesystem;

namespace {

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

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto comma = s.find(',', pos);
        if (comma == std::string_view::npos) comma = s.size();
        auto item = trim(s.substr(pos, comma - pos));
        if (!item.empty()) out.push_back(std::move(item));
        pos = comma + 1;
    }
    return out;
}

const std::vector<std::string> kEmpty;

} // namespace

// --- EmbeddingModel -------------------------------------------------------

EmbeddingModel::EmbeddingModel(std::string name, std::size_t dimension)
    : name_(std::move(name)), dimension_(dimension) {}

void EmbeddingModel::add(std::string word, std::vector<double> vector) {
    if (vector.size() != dimension_) {
        throw ValidationError(name_ + ": vector for \"" + word + "\" has dimension " + std::to_string(vector.size()) +
                              ", expected " + std::to_string(dimension_));
    }
    double norm = 0.0;
    for (double v : vector) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ValidationError(name_ + ": zero or non-finite vector for \"" + word + "\"");
    }
    if (index_.contains(word)) {
        throw ValidationError(name_ + ": duplicate word \"" + word + "\"");
    }
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    for (double v : vector) unit_vectors_.push_back(v / norm);
}

EmbeddingModel EmbeddingModel::load(const fs::path& path) {
    std::istringstream in(read_file(path));
    EmbeddingModel model(path.filename().string(), 0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        std::string word;
        fields >> word;
        std::vector<double> vec;
        std::string tok;
        while (fields >> tok) {
            try {
                std::size_t used = 0;
                vec.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError(model.name_ + ":" + std::to_string(lineno) + ": bad number \"" + tok + "\"");
            }
        }
        if (vec.empty()) {
            throw ParseError(model.name_ + ":" + std::to_string(lineno) + ": no vector components");
        }
        if (model.dimension_ == 0) model.dimension_ = vec.size();
        try {
            model.add(std::move(word), std::move(vec));
        } catch (const ValidationError& e) {
            throw ParseError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
    return model;
}

std::optional<std::vector<ScoredWord>> EmbeddingModel::top_similar(std::string_view word, std::size_t k) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    const std::size_t self = it->second;
    const double* q = unit_vectors_.data() + self * dimension_;

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (i == self) continue;
        const double* v = unit_vectors_.data() + i * dimension_;
        double dot = 0.0;
        for (std::size_t d = 0; d < dimension_; ++d) dot += q[d] * v[d];
        scored.emplace_back(std::clamp(dot, 0.0, 1.0), i);
    }
    auto better = [this](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return words_[a.second] < words_[b.second];
    };
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);

    std::vector<ScoredWord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(words_[scored[i].second], scored[i].first);
    return out;
}

// --- Thesaurus ------------------------------------------------------------

void Thesaurus::add(std::string word, std::vector<std::string> synonyms) {
    members_.insert(word);
    for (const auto& s : synonyms) members_.insert(s);
    auto& list = entries_[std::move(word)];
    for (auto& s : synonyms) {
        if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(std::move(s));
    }
}

Thesaurus Thesaurus::parse(std::string_view text) {
    Thesaurus t;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError("thesaurus line " + std::to_string(lineno) + ": expected `word: syn1, syn2, ...`");
        }
        auto head = trim(std::string_view(line).substr(0, colon));
        if (head.empty()) {
            throw ParseError("thesaurus line " + std::to_string(lineno) + ": empty headword");
        }
        t.add(std::move(head), split_list(std::string_view(line).substr(colon + 1)));
    }
    return t;
}

Thesaurus Thesaurus::load(const fs::path& path) {
    try {
        return parse(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

const std::vector<std::string>& Thesaurus::synonyms(std::string_view word) const {
    auto it = entries_.find(std::string(word));
    return it == entries_.end() ? kEmpty : it->second;
}

// --- merging --------------------------------------------------------------

bool lexical_tiebreak(std::string_view a, std::string_view b, const Thesaurus& primary, const Thesaurus& secondary) {
    const bool a1 = primary.contains(a), b1 = primary.contains(b);
    if (a1 != b1) return a1;
    const bool a2 = secondary.contains(a), b2 = secondary.contains(b);
    if (a2 != b2) return a2;
    return a < b;
}

std::vector<ScoredWord> merge_candidates(std::span<const std::vector<ScoredWord>> lists, const Thesaurus& primary,
                                         const Thesaurus& secondary) {
    std::unordered_map<std::string, double> sums;
    for (const auto& list : lists) {
        for (const auto& [word, score] : list) sums[word] += score;
    }
    std::vector<ScoredWord> merged(sums.begin(), sums.end());
    std::sort(merged.begin(), merged.end(), [&](const ScoredWord& a, const ScoredWord& b) {
        if (a.second != b.second) return a.second > b.second;
        return lexical_tiebreak(a.first, b.first, primary, secondary);
    });
    return merged;
}

std::vector<std::string> synonyms_for(std::string_view word, const SynonymSources& sources) {
    if (sources.named_entities.contains(std::string(word))) return {};

    auto normalize = [&](std::string_view w) {
        return sources.normalize ? sources.normalize(w) : std::string(w);
    };

    std::vector<std::vector<ScoredWord>> lists;
    bool known = false;
    for (const auto& model : sources.models) {
        auto neighbours = model.top_similar(word, sources.neighbours_per_model);
        if (!neighbours) continue;
        known = true;
        std::vector<ScoredWord> list;
        for (auto& [w, score] : *neighbours) {
            auto n = normalize(w);
            // Inflections of one word count once per model, at their best score.
            const bool seen = std::any_of(list.begin(), list.end(), [&](const ScoredWord& s) { return s.first == n; });
            if (!n.empty() && n != word && !seen) list.emplace_back(std::move(n), score);
        }
        lists.push_back(std::move(list));
    }

    std::vector<std::string> out;
    if (known) {
        for (auto& [w, score] : merge_candidates(lists, sources.primary, sources.secondary)) {
            if (out.size() == SynonymTable::kMaxSynonyms) break;
            out.push_back(std::move(w));
        }
        return out;
    }

    for (const Thesaurus* t : {&sources.primary, &sources.secondary}) {
        for (const auto& s : t->synonyms(word)) {
            if (out.size() == SynonymTable::kMaxSynonyms) return out;
            auto n = normalize(s);
            if (n.empty() || n == word || std::find(out.begin(), out.end(), n) != out.end()) continue;
            out.push_back(std::move(n));
        }
    }
    return out;
}

SynonymTable build_synonym_table(const std::set<std::string>& vocabulary, const SynonymSources& sources,
                                 unsigned threads) {
    const std::vector<std::string> words(vocabulary.begin(), vocabulary.end());
    std::vector<std::vector<std::string>> results(words.size());

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(words.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < words.size(); i = next++) {
            results[i] = synonyms_for(words[i], sources);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SynonymTable table;
    for (std::size_t i = 0; i < words.size(); ++i) table.set(words[i], std::move(results[i]));
    return table;
}

// --- SynonymTable ---------------------------------------------------------

void SynonymTable::set(std::string word, std::vector<std::string> synonyms) {
    if (word.empty() || word.find_first_of("\t\n,") != std::string::npos) {
        throw ValidationError("invalid synonym table word \"" + word + "\"");
    }
    if (synonyms.size() > kMaxSynonyms) {
        throw ValidationError("\"" + word + "\" has more than " + std::to_string(kMaxSynonyms) + " synonyms");
    }
    for (std::size_t i = 0; i < synonyms.size(); ++i) {
        const auto& s = synonyms[i];
        if (s.empty() || s.find_first_of("\t\n,") != std::string::npos) {
            throw ValidationError("invalid synonym \"" + s + "\" for \"" + word + "\"");
        }
        if (s == word) {
            throw ValidationError("\"" + word + "\" listed as its own synonym");
        }
        if (std::find(synonyms.begin(), synonyms.begin() + static_cast<std::ptrdiff_t>(i), s) !=
            synonyms.begin() + static_cast<std::ptrdiff_t>(i)) {
            throw ValidationError("duplicate synonym \"" + s + "\" for \"" + word + "\"");
        }
    }
    entries_[std::move(word)] = std::move(synonyms);
}

const std::vector<std::string>* SynonymTable::find(std::string_view word) const {
    auto it = entries_.find(std::string(word));
    return it == entries_.end() ? nullptr : &it->second;
}

std::string SynonymTable::to_text() const {
    std::string out;
    for (const auto& [word, syns] : entries_) {
        out += word;
        out += '\t';
        for (std::size_t i = 0; i < syns.size(); ++i) {
            if (i) out += ',';
            out += syns[i];
        }
        out += '\n';
    }
    return out;
}

SynonymTable SynonymTable::parse(std::string_view text) {
    SynonymTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("Synonym.txt line " + std::to_string(lineno) + ": expected word<TAB>syn1,syn2,syn3");
        }
        try {
            table.set(line.substr(0, tab), split_list(std::string_view(line).substr(tab + 1)));
        } catch (const ValidationError& e) {
            throw ParseError("Synonym.txt line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return table;
}

SynonymTable SynonymTable::load(const fs::path& path) {
    return parse(read_file(path));
}

void SynonymTable::save(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << to_text();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace screensearch
