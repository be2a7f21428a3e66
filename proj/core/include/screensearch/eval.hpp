#pragma once

#include "screensearch/index_bundle.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screensearch {

/// One line of a queries file:
/// `target_id<TAB>icon:class@l,t,r,b;...<TAB>text1 text2 ...`.
struct EvalQuery {
    std::size_t line = 0;
    std::string target_id;
    Query query;
};

struct EvalRowError {
    std::size_t line = 0;
    std::string message;
};

struct ParsedQueries {
    std::vector<EvalQuery> queries;
    std::vector<EvalRowError> errors;
};

/// Parses a queries file body. Blank lines and lines starting with '#' are
/// ignored; malformed rows are reported and skipped.
ParsedQueries parse_queries(std::string_view text, const TextPipeline& pipeline);
ParsedQueries load_queries(const std::filesystem::path& path, const TextPipeline& pipeline);

/// Parses the icon field, e.g. "icon:Star@0.1,0.1,0.3,0.2;icon:Menu@0,0,0.1,0.1".
std::vector<DoodlePlacement> parse_icon_field(std::string_view field);

/// Renders a query back into the queries-file form.
std::string format_query_line(std::string_view target_id, const Query& query,
                              const std::vector<std::string>& raw_texts);

struct EvalRow {
    std::size_t line = 0;
    std::string target_id;
    std::optional<std::size_t> rank; // absent when the target is not in the returned results
    double latency_ms = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows; // in input order
    std::vector<EvalRowError> errors;
    std::size_t limit = kDefaultResultLimit;
    double top1 = 0.0;
    double top10 = 0.0;
    double top50 = 0.0;
    double latency_avg_ms = 0.0;
    double latency_p95_ms = 0.0;

    /// Fraction of evaluated rows whose target ranks within k.
    double top_k(std::size_t k) const;

    std::string to_table() const;
    /// One JSON object per row, then one per error, then a summary record.
    std::string to_jsonl() const;
};

/// Ranks every query and records where its target lands. Rows naming an
/// unknown target are reported as errors. Work is spread over `threads`
/// workers without changing the result (latencies aside).
EvalReport run_eval(const IndexBundle& bundle, const ParsedQueries& queries, const RankingConfig& cfg,
                    std::size_t limit = kDefaultResultLimit, unsigned threads = 1);

} // namespace screensearch
