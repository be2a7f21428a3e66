#include "screensearch/doodle_io.hpp"
#include "screensearch/error.hpp"
#include "screensearch/eval.hpp"
#include "screensearch/index_bundle.hpp"
#include "screensearch/service.hpp"
#include "screensearch/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <thread>

namespace fs = std::filesystem;
using namespace screensearch;

namespace {

struct RankingFlags {
    RankingConfig cfg;
    std::size_t limit = kDefaultResultLimit;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--limit", limit, "Number of results")->check(CLI::PositiveNumber);
        cmd.add_option("--p1", cfg.p1, "Type-presence reward per matched doodle");
        cmd.add_option("--p2", cfg.p2, "Position-overlap weight");
        cmd.add_option("--p3", cfg.p3, "Shape-similarity weight");
        cmd.add_option("--delta-w", cfg.delta_w, "Coverage decay into adjacent tiles");
        cmd.add_option("--c-w", cfg.c_w, "Penalty per unmatched doodle");
        cmd.add_option("--exact-weight", cfg.weights.exact, "Weight of an exact or fuzzy term match");
        cmd.add_option("--synonym-weight", cfg.weights.synonym, "Weight of a synonym match");
    }
};

TextPipeline make_pipeline(const std::string& lexicons) {
    return lexicons.empty() ? TextPipeline() : TextPipeline(Lexicons::load(lexicons));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

unsigned default_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

KnnClassifier train_synthetic(std::size_t per_class, std::uint64_t seed) {
    return KnnClassifier::train(generate_doodle_set(supported_classes(), per_class, seed), supported_classes());
}

HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Screen search: sketched icons plus positional text"};
    app.set_config("--config", "", "Read options from a TOML/INI file");
    app.require_subcommand(1);
    app.set_version_flag("--version", "screensearch 1.0.0");

    // gen-corpus
    auto* gen_corpus = app.add_subcommand("gen-corpus", "Generate a synthetic screen corpus");
    std::string gc_out;
    std::size_t gc_screens = 1000, gc_vocab = 20000, gc_planted = 0;
    std::uint64_t gc_seed = 1;
    double gc_noise = 0.15;
    gen_corpus->add_option("--out", gc_out, "Output corpus directory")->required();
    gen_corpus->add_option("--screens", gc_screens, "Number of screens (distractors when planting)");
    gen_corpus->add_option("--vocabulary", gc_vocab, "Distinct words available for screen text");
    gen_corpus->add_option("--planted", gc_planted, "Also plant this many targets and write queries.tsv");
    gen_corpus->add_option("--placement-noise", gc_noise, "Placement error of planted queries");
    gen_corpus->add_option("--seed", gc_seed, "Random seed");

    // gen-doodles
    auto* gen_doodles = app.add_subcommand("gen-doodles", "Generate synthetic labeled doodles (JSONL)");
    std::string gd_out;
    std::vector<std::string> gd_classes;
    std::size_t gd_per_class = 20;
    std::uint64_t gd_seed = 1;
    gen_doodles->add_option("--out", gd_out, "Output JSONL file")->required();
    gen_doodles->add_option("--classes", gd_classes, "Classes to generate (default: all supported)");
    gen_doodles->add_option("--per-class", gd_per_class, "Doodles per class");
    gen_doodles->add_option("--seed", gd_seed, "Random seed");

    // train-recognizer
    auto* train = app.add_subcommand("train-recognizer", "Train the reference doodle classifier");
    std::string tr_doodles, tr_out;
    std::size_t tr_per_class = 20;
    std::uint64_t tr_seed = 1;
    train->add_option("--doodles", tr_doodles, "Labeled doodles JSONL (default: synthetic)")->check(CLI::ExistingFile);
    train->add_option("--out", tr_out, "Output model file")->required();
    train->add_option("--per-class", tr_per_class, "Synthetic doodles per class when --doodles is absent");
    train->add_option("--seed", tr_seed, "Seed of the synthetic doodles");

    // build-synonyms
    auto* build_syn = app.add_subcommand("build-synonyms", "Build Synonym.txt for a corpus");
    std::string bs_corpus, bs_out, bs_primary, bs_secondary, bs_lexicons;
    std::vector<std::string> bs_models;
    unsigned bs_threads = default_threads();
    build_syn->add_option("corpus", bs_corpus, "Corpus directory")->required();
    build_syn->add_option("--model", bs_models, "Word-vector model file (repeatable)");
    build_syn->add_option("--primary", bs_primary, "Primary thesaurus file");
    build_syn->add_option("--secondary", bs_secondary, "Secondary thesaurus file");
    build_syn->add_option("--lexicons", bs_lexicons, "Directory with stopwords.txt, ne_lexicon.txt, lemma_exceptions.tsv");
    build_syn->add_option("--out", bs_out, "Output Synonym.txt")->required();
    build_syn->add_option("--threads", bs_threads, "Worker threads");

    // build-index
    auto* build_index = app.add_subcommand("build-index", "Build text and sketch indexes");
    std::string bi_corpus, bi_out, bi_synonyms, bi_class_map, bi_lexicons;
    bool bi_transposed = false;
    build_index->add_option("corpus", bi_corpus, "Corpus directory")->required();
    build_index->add_option("--out", bi_out, "Output index directory")->required();
    build_index->add_option("--synonyms", bi_synonyms, "Synonym.txt");
    build_index->add_option("--class-map", bi_class_map, "class_map.tsv (default: <corpus>/class_map.tsv if present)");
    build_index->add_option("--lexicons", bi_lexicons, "Lexicon directory");
    build_index->add_flag("--grid-4x6", bi_transposed, "Use 4 columns by 6 rows instead of 6 by 4");

    // search
    auto* search = app.add_subcommand("search", "Run one query against an index");
    std::string se_index;
    std::vector<std::string> se_icons, se_texts;
    bool se_explain = false, se_json = false;
    RankingFlags se_rank;
    search->add_option("--index", se_index, "Index directory")->required();
    search->add_option("--icon", se_icons, "Confirmed icon as Class@l,t,r,b (repeatable)");
    search->add_option("--text", se_texts, "Text query such as tl:editor (repeatable)");
    search->add_flag("--explain", se_explain, "Show per-component contributions");
    search->add_flag("--json", se_json, "Print JSON");
    se_rank.add_to(*search);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a queries file");
    std::string ev_index, ev_queries, ev_jsonl;
    unsigned ev_threads = default_threads();
    RankingFlags ev_rank;
    eval->add_option("--index", ev_index, "Index directory")->required();
    eval->add_option("--queries", ev_queries, "Queries file")->required();
    eval->add_option("--jsonl", ev_jsonl, "Also write machine-readable records here ('-' for stdout)");
    eval->add_option("--threads", ev_threads, "Worker threads");
    ev_rank.add_to(*eval);

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string sv_index, sv_corpus, sv_model, sv_host = "127.0.0.1", sv_thumbs, sv_origin = "*";
    int sv_port = 8080;
    std::uint64_t sv_seed = 1;
    RankingFlags sv_rank;
    serve->add_option("--index", sv_index, "Index directory")->required()->envname("SCREENSEARCH_INDEX");
    serve->add_option("--corpus", sv_corpus, "Corpus directory")->required()->envname("SCREENSEARCH_CORPUS");
    serve->add_option("--model", sv_model, "Recognizer model (default: train on synthetic doodles)")
        ->envname("SCREENSEARCH_MODEL");
    serve->add_option("--host", sv_host, "Bind address")->envname("SCREENSEARCH_HOST");
    serve->add_option("--port", sv_port, "Port")->envname("SCREENSEARCH_PORT");
    serve->add_option("--thumbnails", sv_thumbs, "Directory of <screen id>.png screenshots");
    serve->add_option("--allow-origin", sv_origin, "CORS allowed origin");
    serve->add_option("--seed", sv_seed, "Seed of the synthetic training doodles");
    sv_rank.add_to(*serve);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_corpus) {
            if (gc_screens == 0) throw ValidationError("--screens must be positive");
            std::vector<Screen> screens;
            std::string queries;
            if (gc_planted > 0) {
                PlantedOptions opt;
                opt.distractors = gc_screens;
                opt.targets = gc_planted;
                opt.seed = gc_seed;
                opt.placement_noise = gc_noise;
                auto bench = generate_planted_benchmark(opt);
                for (const auto& q : bench.queries) queries += format_query_line(q.target_id, q.query, q.raw_texts) + "\n";
                screens = std::move(bench.screens);
            } else {
                CorpusOptions opt;
                opt.screens = gc_screens;
                opt.seed = gc_seed;
                opt.vocabulary = gc_vocab;
                screens = generate_corpus(opt);
            }
            write_corpus(screens, gc_out);
            std::string categories;
            for (const auto& c : element_categories()) categories += c + "\n";
            write_text(fs::path(gc_out) / "element_classes.txt", categories);
            write_text(fs::path(gc_out) / "class_map.tsv", synthetic_class_map().to_text());
            if (gc_planted > 0) write_text(fs::path(gc_out) / "queries.tsv", queries);
            std::cout << "wrote " << screens.size() << " screens to " << gc_out << "\n";
        } else if (*gen_doodles) {
            if (gd_per_class == 0) throw ValidationError("--per-class must be positive");
            const auto classes = gd_classes.empty() ? supported_classes() : gd_classes;
            const auto doodles = generate_doodle_set(classes, gd_per_class, gd_seed);
            save_doodles(doodles, gd_out);
            std::cout << "wrote " << doodles.size() << " doodles to " << gd_out << "\n";
        } else if (*train) {
            KnnClassifier model;
            if (tr_doodles.empty()) {
                model = train_synthetic(tr_per_class, tr_seed);
            } else {
                auto examples = load_doodles(tr_doodles);
                std::set<std::string> present;
                for (auto& ex : examples) {
                    auto canonical = canonical_class(ex.icon_class);
                    if (!canonical) throw ValidationError("unsupported doodle class \"" + ex.icon_class + "\"");
                    ex.icon_class = *canonical;
                    present.insert(*canonical);
                }
                // Classes keep the supported order; absent ones are left out.
                std::vector<std::string> classes;
                for (const auto& c : supported_classes()) {
                    if (present.contains(c)) classes.push_back(c);
                }
                model = KnnClassifier::train(examples, classes);
            }
            model.save(tr_out);
            std::cout << "trained on " << model.num_exemplars() << " doodles, wrote " << tr_out << "\n";
        } else if (*build_syn) {
            const auto pipeline = make_pipeline(bs_lexicons);
            const Corpus corpus = load_corpus(bs_corpus);
            SynonymSources sources;
            for (const auto& m : bs_models) sources.models.push_back(EmbeddingModel::load(m));
            if (!bs_primary.empty()) sources.primary = Thesaurus::load(bs_primary);
            if (!bs_secondary.empty()) sources.secondary = Thesaurus::load(bs_secondary);
            sources.named_entities = pipeline.lexicons().named_entities;
            sources.normalize = [&pipeline](std::string_view w) { return pipeline.normalize_term(w); };
            const auto table = build_synonym_table(corpus_vocabulary(corpus, pipeline), sources, bs_threads);
            table.save(bs_out);
            std::cout << "wrote synonyms for " << table.size() << " words to " << bs_out << "\n";
        } else if (*build_index) {
            const auto pipeline = make_pipeline(bi_lexicons);
            const Corpus corpus = load_corpus(bi_corpus);
            const SynonymTable synonyms = bi_synonyms.empty() ? SynonymTable() : SynonymTable::load(bi_synonyms);
            ClassMap class_map = ClassMap::identity();
            if (!bi_class_map.empty()) {
                class_map = ClassMap::load(bi_class_map);
            } else if (fs::exists(fs::path(bi_corpus) / "class_map.tsv")) {
                class_map = ClassMap::load(fs::path(bi_corpus) / "class_map.tsv");
            }
            const auto bundle = IndexBundle::build(corpus, pipeline, synonyms, class_map, TileGrid{bi_transposed});
            bundle.save(bi_out);
            std::cout << "indexed " << corpus.size() << " screens (" << bundle.text.num_terms() << " terms, "
                      << bundle.sketch.num_instances() << " icon instances) into " << bi_out << "\n";
            if (corpus.dropped_elements() > 0) {
                std::cerr << "warning: dropped " << corpus.dropped_elements() << " elements with degenerate bounds\n";
            }
        } else if (*search) {
            se_rank.cfg.validate();
            const auto bundle = IndexBundle::load(se_index);
            Query query;
            for (const auto& icon : se_icons) {
                for (auto& p : parse_icon_field("icon:" + icon)) query.add_icon(std::move(p));
            }
            for (const auto& t : se_texts) {
                for (auto& q : parse_text_queries(t, bundle.text.pipeline())) query.add_text(std::move(q));
            }
            const auto start = std::chrono::steady_clock::now();
            const auto result = bundle.search(query, se_rank.cfg, se_rank.limit);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (se_json) {
                nlohmann::json results = nlohmann::json::array();
                for (const auto& e : result) {
                    nlohmann::json item{{"rank", e.rank}, {"screen_id", e.screen_id}, {"score", e.score}};
                    if (se_explain) {
                        nlohmann::json components = nlohmann::json::array();
                        for (const auto& c : explain(query, e.screen_id, bundle.sketch, bundle.text, se_rank.cfg).components) {
                            components.push_back({{"label", c.label}, {"value", c.value}});
                        }
                        item["components"] = std::move(components);
                    }
                    results.push_back(std::move(item));
                }
                std::cout << nlohmann::json{{"results", results}, {"timing_ms", {{"rank", ms}}}}.dump(2) << "\n";
            }
            for (const auto& e : result) {
                if (se_json) break;
                std::cout << std::setw(4) << e.rank << "  " << std::left << std::setw(24) << e.screen_id << std::right
                          << std::fixed << std::setprecision(6) << e.score << "\n";
                if (se_explain) {
                    for (const auto& c : explain(query, e.screen_id, bundle.sketch, bundle.text, se_rank.cfg).components) {
                        std::cout << "        " << c.label << " = " << std::setprecision(6) << c.value << "\n";
                    }
                }
            }
            if (!se_json) std::cerr << result.size() << " results in " << std::setprecision(3) << ms << " ms\n";
        } else if (*eval) {
            ev_rank.cfg.validate();
            const auto bundle = IndexBundle::load(ev_index);
            const auto queries = load_queries(ev_queries, bundle.text.pipeline());
            const auto report = run_eval(bundle, queries, ev_rank.cfg, ev_rank.limit, ev_threads);
            if (ev_jsonl == "-") {
                std::cout << report.to_jsonl();
            } else {
                std::cout << report.to_table();
                if (!ev_jsonl.empty()) write_text(ev_jsonl, report.to_jsonl());
            }
        } else if (*serve) {
            ServiceOptions options;
            options.ranking = sv_rank.cfg;
            options.default_limit = sv_rank.limit;
            options.thumbnails = sv_thumbs;
            options.allow_origin = sv_origin;
            auto bundle = std::make_shared<const IndexBundle>(IndexBundle::load(sv_index));
            auto corpus = std::make_shared<const Corpus>(load_corpus(sv_corpus));
            std::shared_ptr<const Classifier> classifier;
            if (sv_model.empty()) {
                classifier = std::make_shared<const KnnClassifier>(train_synthetic(20, sv_seed));
            } else {
                classifier = std::make_shared<const KnnClassifier>(KnnClassifier::load(sv_model));
            }
            SearchService service(bundle, classifier, corpus, options);
            HttpServer server(service);
            const int port = server.bind(sv_host, sv_port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "serving " << corpus->size() << " screens on http://" << sv_host << ":" << port << std::endl;
            server.listen();
            g_server = nullptr;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
