#pragma once

// Independent reference implementations and random generators shared by the
// unit and acceptance tests.

#include "screensearch/corpus.hpp"
#include "screensearch/ranker.hpp"
#include "screensearch/recognizer.hpp"
#include "screensearch/sketch_index.hpp"
#include "screensearch/synonyms.hpp"
#include "screensearch/synthetic.hpp"
#include "screensearch/text_index.hpp"
#include "screensearch/textpipe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using namespace screensearch;

// Full-matrix Levenshtein distance.
inline int levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
    }
    return d[a.size()][b.size()];
}

inline double dist(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double polyline_length(const Stroke& s) {
    double len = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) len += dist(s[i - 1], s[i]);
    return len;
}

// Point at arc length `target` along `s`, walking segments from the start.
inline Point point_at_arc_length(const Stroke& s, double target) {
    double walked = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double seg = dist(s[i - 1], s[i]);
        if (seg > 0 && walked + seg >= target) {
            const double t = (target - walked) / seg;
            return {s[i - 1].x + t * (s[i].x - s[i - 1].x), s[i - 1].y + t * (s[i].y - s[i - 1].y)};
        }
        walked += seg;
    }
    return s.back();
}

inline std::string random_string(Rng& rng, std::string_view alphabet, std::size_t min_len, std::size_t max_len) {
    const auto len = min_len + rng.below(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    return s;
}

// Applies `edits` random insert/delete/substitute operations.
inline std::string corrupt(Rng& rng, std::string s, int edits, std::string_view alphabet) {
    for (int e = 0; e < edits; ++e) {
        const auto op = rng.below(s.empty() ? 1 : 3);
        const char c = alphabet[rng.below(alphabet.size())];
        if (op == 0) {
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)), c);
        } else if (op == 1) {
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size())));
        } else {
            s[rng.below(s.size())] = c;
        }
    }
    return s;
}

// --- brute-force scoring, rescanning the screens for every query ----------

inline Quadrant quadrant_by_corner(const Rect& b, const Screen& s) {
    const bool right = b.left >= s.width / 2.0;
    const bool bottom = b.top >= s.height / 2.0;
    return bottom ? (right ? Quadrant::BR : Quadrant::BL) : (right ? Quadrant::TR : Quadrant::TL);
}

inline double text_score(const Screen& screen, const TextQuery& q, const TextPipeline& pipeline,
                         const SynonymTable& synonyms, const MatchWeights& w) {
    auto near = [&](const std::string& word) {
        return levenshtein(q.term, word) <= w.max_edit_distance ||
               (!q.surface.empty() && levenshtein(q.surface, word) <= w.max_edit_distance);
    };
    double best = 0.0;
    for (const auto& c : extract_contents(screen)) {
        if (!q.zones.contains(quadrant_by_corner(c.bbox, screen))) continue;
        for (const auto& tok : pipeline.run(c.raw_text, c.kind)) {
            if (near(tok.lemma)) best = std::max(best, w.exact);
            if (const auto* syns = synonyms.find(tok.lemma)) {
                for (const auto& s : *syns) {
                    if (near(s)) best = std::max(best, w.synonym);
                }
            }
        }
    }
    return best;
}

inline std::array<double, kTileCount> coverage(const Rect& b, bool transposed) {
    const int cols = transposed ? 4 : 6, rows = transposed ? 6 : 4;
    std::array<double, kTileCount> out{};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double tl = double(c) / cols, tr = double(c + 1) / cols;
            const double tt = double(r) / rows, tb = double(r + 1) / rows;
            const double w = std::min(b.right, tr) - std::max(b.left, tl);
            const double h = std::min(b.bottom, tb) - std::max(b.top, tt);
            out[static_cast<std::size_t>(r * cols + c)] = (w > 0 && h > 0) ? std::min(1.0, w * h / ((tr - tl) * (tb - tt))) : 0.0;
        }
    }
    return out;
}

inline std::array<double, kTileCount> smooth(const std::array<double, kTileCount>& r, double dw, bool transposed) {
    const int cols = transposed ? 4 : 6, rows = transposed ? 6 : 4;
    std::array<double, kTileCount> out{};
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            double n = 0.0;
            if (x > 0) n = std::max(n, r[static_cast<std::size_t>(y * cols + x - 1)]);
            if (x + 1 < cols) n = std::max(n, r[static_cast<std::size_t>(y * cols + x + 1)]);
            if (y > 0) n = std::max(n, r[static_cast<std::size_t>((y - 1) * cols + x)]);
            if (y + 1 < rows) n = std::max(n, r[static_cast<std::size_t>((y + 1) * cols + x)]);
            const auto t = static_cast<std::size_t>(y * cols + x);
            out[t] = std::max(r[t], dw * n);
        }
    }
    return out;
}

// Score of one class on one screen, or -1 when the screen lacks the class.
inline double class_score(const Screen& screen, const std::string& cls, const std::vector<DoodlePlacement>& ds,
                          const ClassMap& class_map, const RankingConfig& cfg, bool transposed) {
    std::vector<Rect> instances;
    auto visit = [&](auto&& self, const UiElement& e) -> void {
        std::optional<std::string> mapped;
        if (e.icon_class) mapped = class_map.map(*e.icon_class);
        if (!mapped && e.element_class) mapped = class_map.map(*e.element_class);
        if (mapped && *mapped == cls) {
            instances.push_back({e.bounds.left / screen.width, e.bounds.top / screen.height,
                                 e.bounds.right / screen.width, e.bounds.bottom / screen.height});
        }
        for (const auto& c : e.children) self(self, c);
    };
    visit(visit, screen.root);
    if (instances.empty()) return -1.0;

    struct Cand {
        double m;
        std::size_t d, i;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto r = smooth(coverage(instances[i], transposed), cfg.delta_w, transposed);
        for (std::size_t d = 0; d < ds.size(); ++d) {
            const auto q = coverage(ds[d].bbox, transposed);
            double num = 0.0, den = 0.0;
            for (std::size_t t = 0; t < kTileCount; ++t) {
                num += std::min(q[t], r[t]);
                den += q[t];
            }
            const double ar_d = ds[d].bbox.width() / ds[d].bbox.height();
            const double ar_i = instances[i].width() / instances[i].height();
            cands.push_back({cfg.p1 + cfg.p2 * (num / den) + cfg.p3 * (std::min(ar_d, ar_i) / std::max(ar_d, ar_i)), d, i});
        }
    }
    // Repeatedly take the best remaining pair.
    std::vector<bool> dused(ds.size()), iused(instances.size());
    double total = 0.0;
    std::size_t matched = 0;
    while (true) {
        const Cand* best = nullptr;
        for (const auto& c : cands) {
            if (dused[c.d] || iused[c.i]) continue;
            if (!best || c.m > best->m || (c.m == best->m && (c.d < best->d || (c.d == best->d && c.i < best->i)))) {
                best = &c;
            }
        }
        if (!best) break;
        dused[best->d] = iused[best->i] = true;
        total += best->m;
        ++matched;
    }
    total -= cfg.c_w * double(ds.size() - matched);
    return std::max(0.0, total);
}

struct Entry {
    std::string id;
    double score;
};

// Score fusion step by step over per-component maps rebuilt by rescanning.
inline std::vector<Entry> rank(const std::vector<Screen>& screens_in, const Query& query, const TextPipeline& pipeline,
                               const SynonymTable& synonyms, const ClassMap& class_map, const RankingConfig& cfg,
                               bool transposed = false) {
    std::vector<Screen> screens = screens_in;
    std::sort(screens.begin(), screens.end(), [](const Screen& a, const Screen& b) { return a.id < b.id; });

    std::map<std::string, double> res;
    for (const auto& [cls, doodles] : query.sketch) {
        std::map<std::string, double> res_ddl;
        for (const auto& s : screens) {
            const double v = class_score(s, cls, doodles, class_map, cfg, transposed);
            if (v >= 0) res_ddl[s.id] = v;
        }
        double mx = 0.0;
        for (const auto& [id, v] : res_ddl) mx = std::max(mx, v);
        if (res_ddl.empty() || mx == 0.0) continue;
        for (const auto& [id, v] : res_ddl) res[id] += v / mx * double(doodles.size());
    }
    std::vector<TextQuery> texts;
    for (const auto& t : query.texts) {
        if (std::find(texts.begin(), texts.end(), t) == texts.end()) texts.push_back(t);
    }
    for (const auto& t : texts) {
        std::map<std::string, double> res_txt;
        for (const auto& s : screens) {
            const double v = text_score(s, t, pipeline, synonyms, cfg.weights);
            if (v > 0) res_txt[s.id] = v;
        }
        double mx = 0.0;
        for (const auto& [id, v] : res_txt) mx = std::max(mx, v);
        if (res_txt.empty() || mx == 0.0) continue;
        for (const auto& [id, v] : res_txt) res[id] += v / mx;
    }
    std::vector<Entry> out;
    for (const auto& [id, v] : res) out.push_back({id, v});
    std::stable_sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.score > b.score; });
    return out;
}

// Compares a ranked result with the full oracle list. Positions may only
// differ between entries whose oracle scores agree within `tol`.
inline std::string compare(const RankedResult& got, const std::vector<Entry>& want, std::size_t limit, double tol) {
    const auto expected = std::min(limit, want.size());
    if (got.size() != expected) {
        return "result size " + std::to_string(got.size()) + " != " + std::to_string(expected);
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i].rank != i + 1) return "rank field mismatch at " + std::to_string(i);
        if (std::abs(got[i].score - want[i].score) > tol) {
            return "score mismatch at " + std::to_string(i) + ": " + std::to_string(got[i].score) + " vs " +
                   std::to_string(want[i].score);
        }
        if (got[i].screen_id != want[i].id) {
            auto it = std::find_if(want.begin(), want.end(), [&](const Entry& e) { return e.id == got[i].screen_id; });
            if (it == want.end() || std::abs(it->score - want[i].score) > tol) {
                return "order mismatch at " + std::to_string(i) + ": " + got[i].screen_id + " vs " + want[i].id;
            }
        }
    }
    return {};
}

// --- random small instances ----------------------------------------------

struct Instance {
    std::vector<Screen> screens;
    SynonymTable synonyms;
    Query query;
    RankingConfig cfg;
    std::size_t limit = kDefaultResultLimit;
};

inline const std::vector<std::string>& instance_words() {
    static const std::vector<std::string> w{"setting", "seting",  "editor", "edit",  "home",   "house",
                                            "share",   "shore",   "play",   "menu",  "camera", "star",
                                            "display", "twitter", "cloud",  "cloudy"};
    return w;
}

inline const std::vector<std::string>& instance_classes() {
    static const std::vector<std::string> c{"Star", "Menu", "Play", "Search"};
    return c;
}

// Coordinates snap to eighths so that exact score ties occur.
inline Rect random_box(Rng& rng, bool snap) {
    auto pick = [&] { return snap ? double(rng.below(9)) / 8.0 : rng.uniform(); };
    double l = pick(), r = pick(), t = pick(), b = pick();
    if (l > r) std::swap(l, r);
    if (t > b) std::swap(t, b);
    if (r - l < 1e-3) { l = std::max(0.0, r - 0.125); r = l + 0.125; }
    if (b - t < 1e-3) { t = std::max(0.0, b - 0.125); b = t + 0.125; }
    return {l, t, r, b};
}

inline Instance random_instance(Rng& rng) {
    Instance inst;
    const auto& words = instance_words();
    const auto& classes = instance_classes();
    const bool snap = rng.chance(0.5);
    const auto n = 1 + rng.below(50);
    for (std::size_t s = 0; s < n; ++s) {
        Screen screen;
        screen.id = "r" + std::to_string(1000 + rng.below(9000)) + "_" + std::to_string(s);
        screen.width = 800;
        screen.height = 1600;
        screen.root.bounds = {0, 0, 800, 1600};
        const auto elements = rng.below(7);
        for (std::size_t e = 0; e < elements; ++e) {
            UiElement el;
            const Rect b = random_box(rng, snap);
            el.bounds = {b.left * 800, b.top * 1600, b.right * 800, b.bottom * 1600};
            if (rng.chance(0.5)) {
                el.element_class = "Icon";
                el.icon_class = classes[rng.below(classes.size())];
            } else {
                el.element_class = "Text";
                std::string text;
                const auto k = 1 + rng.below(3);
                for (std::size_t i = 0; i < k; ++i) text += (i ? " " : "") + words[rng.below(words.size())];
                el.text = text;
            }
            screen.root.children.push_back(std::move(el));
        }
        inst.screens.push_back(std::move(screen));
    }
    for (const auto& w : words) {
        if (!rng.chance(0.4)) continue;
        std::vector<std::string> syns;
        const auto k = 1 + rng.below(3);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& s = words[rng.below(words.size())];
            if (s != w && std::find(syns.begin(), syns.end(), s) == syns.end()) syns.push_back(s);
        }
        if (!syns.empty()) inst.synonyms.set(w, syns);
    }

    const TextPipeline pipeline;
    while (inst.query.empty()) {
        const auto ncls = rng.below(4);
        for (std::size_t c = 0; c < ncls; ++c) {
            const auto& cls = classes[rng.below(classes.size())];
            const auto nd = 1 + rng.below(3);
            for (std::size_t d = 0; d < nd; ++d) inst.query.add_icon({cls, random_box(rng, snap)});
        }
        const auto ntext = rng.below(4);
        for (std::size_t t = 0; t < ntext; ++t) {
            std::string chunk = words[rng.below(words.size())];
            if (rng.chance(0.3)) chunk = corrupt(rng, chunk, 1, "aeiost");
            if (chunk.empty()) chunk = "x";
            if (rng.chance(0.6)) chunk = std::string(kPositionalKeywords[rng.below(12)].prefix) + ":" + chunk;
            inst.query.add_text(parse_text_query(chunk, pipeline));
        }
    }
    inst.limit = 1 + rng.below(60);
    return inst;
}

} // namespace oracle
