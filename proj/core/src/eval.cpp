#include "screensearch/eval.hpp"

#include "screensearch/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace screensearch {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError("expected a number, got \"" + std::string(s) + "\"");
    }
    return v;
}

std::string shortest(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace

std::vector<DoodlePlacement> parse_icon_field(std::string_view field) {
    std::vector<DoodlePlacement> out;
    for (auto item : split(field, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        if (!item.starts_with("icon:")) {
            throw ParseError("icon entry \"" + std::string(item) + "\" must start with icon:");
        }
        item.remove_prefix(5);
        const auto at = item.rfind('@');
        if (at == std::string_view::npos) {
            throw ParseError("icon entry \"" + std::string(item) + "\" lacks @l,t,r,b");
        }
        const auto coords = split(item.substr(at + 1), ',');
        if (coords.size() != 4) {
            throw ParseError("icon entry \"" + std::string(item) + "\" needs four coordinates");
        }
        const std::string cls(trim(item.substr(0, at)));
        auto canonical = canonical_class(cls);
        if (!canonical) {
            throw ValidationError("unsupported icon class \"" + cls + "\"");
        }
        const Rect r{parse_number(coords[0]), parse_number(coords[1]), parse_number(coords[2]), parse_number(coords[3])};
        if (r.degenerate() || r.left < 0 || r.top < 0 || r.right > 1 || r.bottom > 1) {
            throw ValidationError("icon \"" + cls + "\" bbox must be a non-empty box inside [0,1]^2");
        }
        out.push_back({*canonical, r});
    }
    return out;
}

ParsedQueries parse_queries(std::string_view text, const TextPipeline& pipeline) {
    ParsedQueries out;
    std::size_t lineno = 0;
    for (auto line : split(text, '\n')) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || trim(line).front() == '#') continue;
        try {
            const auto fields = split(line, '\t');
            if (fields.size() < 2 || fields.size() > 3) {
                throw ParseError("expected target_id<TAB>icons<TAB>texts");
            }
            EvalQuery q;
            q.line = lineno;
            q.target_id = std::string(trim(fields[0]));
            if (q.target_id.empty()) throw ParseError("empty target id");
            for (auto& p : parse_icon_field(fields[1])) q.query.add_icon(std::move(p));
            if (fields.size() == 3) {
                for (auto& t : parse_text_queries(fields[2], pipeline)) q.query.add_text(std::move(t));
            }
            if (q.query.empty()) throw ValidationError("empty query");
            out.queries.push_back(std::move(q));
        } catch (const Error& e) {
            out.errors.push_back({lineno, e.what()});
        }
    }
    return out;
}

ParsedQueries load_queries(const std::filesystem::path& path, const TextPipeline& pipeline) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_queries(ss.str(), pipeline);
}

std::string format_query_line(std::string_view target_id, const Query& query,
                              const std::vector<std::string>& raw_texts) {
    std::string line(target_id);
    line += '\t';
    bool first = true;
    for (const auto& [cls, placements] : query.sketch) {
        for (const auto& p : placements) {
            if (!first) line += ';';
            first = false;
            line += "icon:" + cls + "@" + shortest(p.bbox.left) + "," + shortest(p.bbox.top) + "," +
                    shortest(p.bbox.right) + "," + shortest(p.bbox.bottom);
        }
    }
    line += '\t';
    for (std::size_t i = 0; i < raw_texts.size(); ++i) {
        if (i) line += ' ';
        line += raw_texts[i];
    }
    return line;
}

double EvalReport::top_k(std::size_t k) const {
    if (rows.empty()) return 0.0;
    const auto hits = std::count_if(rows.begin(), rows.end(), [&](const EvalRow& r) { return r.rank && *r.rank <= k; });
    return double(hits) / double(rows.size());
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << std::left << std::setw(8) << "line" << std::setw(24) << "target" << std::setw(8) << "rank"
        << "latency_ms\n";
    for (const auto& r : rows) {
        out << std::setw(8) << r.line << std::setw(24) << r.target_id << std::setw(8)
            << (r.rank ? std::to_string(*r.rank) : std::string(">") + std::to_string(limit)) << std::fixed
            << std::setprecision(3) << r.latency_ms << '\n';
    }
    for (const auto& e : errors) out << "error line " << e.line << ": " << e.message << '\n';
    out << std::fixed << std::setprecision(4);
    out << "queries " << rows.size() << ", errors " << errors.size() << '\n';
    out << "top-1 " << top1 << "  top-10 " << top10 << "  top-50 " << top50 << '\n';
    out << std::setprecision(3) << "latency avg " << latency_avg_ms << " ms  p95 " << latency_p95_ms << " ms\n";
    return out.str();
}

std::string EvalReport::to_jsonl() const {
    std::string out;
    for (const auto& r : rows) {
        nlohmann::json j{{"type", "row"}, {"line", r.line}, {"target_id", r.target_id}, {"latency_ms", r.latency_ms}};
        j["rank"] = r.rank ? nlohmann::json(*r.rank) : nlohmann::json(nullptr);
        out += j.dump() + '\n';
    }
    for (const auto& e : errors) {
        out += nlohmann::json{{"type", "error"}, {"line", e.line}, {"message", e.message}}.dump() + '\n';
    }
    out += nlohmann::json{{"type", "summary"},
                          {"queries", rows.size()},
                          {"errors", errors.size()},
                          {"limit", limit},
                          {"top1", top1},
                          {"top10", top10},
                          {"top50", top50},
                          {"latency_avg_ms", latency_avg_ms},
                          {"latency_p95_ms", latency_p95_ms}}
               .dump() +
           '\n';
    return out;
}

EvalReport run_eval(const IndexBundle& bundle, const ParsedQueries& queries, const RankingConfig& cfg,
                    std::size_t limit, unsigned threads) {
    if (limit == 0) {
        throw ValidationError("result limit must be at least 1");
    }
    EvalReport report;
    report.limit = limit;
    report.errors = queries.errors;

    const auto& ids = bundle.text.doc_ids();
    std::vector<std::optional<EvalRow>> slots(queries.queries.size());
    std::vector<std::optional<EvalRowError>> failures(queries.queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < queries.queries.size(); i = next++) {
            const auto& q = queries.queries[i];
            if (!std::binary_search(ids.begin(), ids.end(), q.target_id)) {
                failures[i] = EvalRowError{q.line, "unknown target id \"" + q.target_id + "\""};
                continue;
            }
            try {
                const auto start = std::chrono::steady_clock::now();
                const auto result = bundle.search(q.query, cfg, limit);
                const auto stop = std::chrono::steady_clock::now();
                EvalRow row{q.line, q.target_id, std::nullopt,
                            std::chrono::duration<double, std::milli>(stop - start).count()};
                for (const auto& e : result) {
                    if (e.screen_id == q.target_id) row.rank = e.rank;
                }
                slots[i] = std::move(row);
            } catch (const Error& e) {
                failures[i] = EvalRowError{q.line, e.what()};
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
        worker();
    }

    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) report.rows.push_back(std::move(*slots[i]));
        if (failures[i]) report.errors.push_back(std::move(*failures[i]));
    }
    std::sort(report.errors.begin(), report.errors.end(),
              [](const EvalRowError& a, const EvalRowError& b) { return a.line < b.line; });

    report.top1 = report.top_k(1);
    report.top10 = report.top_k(10);
    report.top50 = report.top_k(50);
    if (!report.rows.empty()) {
        std::vector<double> lat;
        for (const auto& r : report.rows) lat.push_back(r.latency_ms);
        std::sort(lat.begin(), lat.end());
        double sum = 0.0;
        for (double v : lat) sum += v;
        report.latency_avg_ms = sum / double(lat.size());
        const auto idx = static_cast<std::size_t>(std::ceil(0.95 * double(lat.size()))) - 1;
        report.latency_p95_ms = lat[std::min(idx, lat.size() - 1)];
    }
    return report;
}

} // namespace screensearch
