#include "screensearch/service.hpp"

#include "screensearch/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>

namespace screensearch {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

HttpResponse reply(int status, const json& body) {
    return {status, body.dump()};
}

HttpResponse error_reply(int status, std::string_view message) {
    return reply(status, json{{"error", message}});
}

std::string supported_list() {
    std::string s;
    for (const auto& c : supported_classes()) {
        if (!s.empty()) s += ", ";
        s += c;
    }
    return s;
}

json parse_body(std::string_view body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON body: ") + e.what());
    }
}

double coordinate(const json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw ValidationError(where + ": must be within [0, 1]");
    return x;
}

Sketch sketch_from_json(const json& body) {
    if (!body.is_object() || !body.contains("strokes") || !body["strokes"].is_array()) {
        throw ValidationError("body must be an object with a \"strokes\" array");
    }
    Sketch sketch;
    const auto& strokes = body["strokes"];
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        const std::string where = "strokes[" + std::to_string(i) + "]";
        if (!strokes[i].is_array()) throw ValidationError(where + ": expected an array of [x, y] points");
        Stroke stroke;
        for (std::size_t j = 0; j < strokes[i].size(); ++j) {
            const auto& p = strokes[i][j];
            const std::string pw = where + "[" + std::to_string(j) + "]";
            if (!p.is_array() || p.size() != 2) throw ValidationError(pw + ": expected [x, y]");
            stroke.push_back({coordinate(p[0], pw + "[0]"), coordinate(p[1], pw + "[1]")});
        }
        sketch.push_back(std::move(stroke));
    }
    if (sketch.empty()) throw ValidationError("empty sketch: no strokes");
    validate_sketch(sketch);
    return sketch;
}

// Maps library errors onto status codes.
template <typename Fn>
HttpResponse guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const NotFoundError& e) {
        return error_reply(404, e.what());
    } catch (const ParseError& e) {
        return error_reply(400, e.what());
    } catch (const ValidationError& e) {
        return error_reply(400, e.what());
    } catch (const json::exception& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

} // namespace

SearchService::SearchService(std::shared_ptr<const IndexBundle> bundle, std::shared_ptr<const Classifier> classifier,
                             std::shared_ptr<const Corpus> corpus, ServiceOptions options)
    : bundle_(std::move(bundle)), classifier_(std::move(classifier)), corpus_(std::move(corpus)),
      options_(std::move(options)) {
    if (!bundle_ || !classifier_ || !corpus_) {
        throw ValidationError("service needs indexes, a classifier and a corpus");
    }
    if (options_.default_limit == 0) {
        throw ValidationError("result limit must be at least 1");
    }
    options_.ranking.validate();
    const auto& ids = bundle_->text.doc_ids();
    bool same = ids.size() == corpus_->size();
    for (std::size_t i = 0; same && i < ids.size(); ++i) same = ids[i] == corpus_->screen(static_cast<DocId>(i)).id;
    if (!same) {
        throw ValidationError("the corpus does not match the indexes");
    }
}

HttpResponse SearchService::recognize(std::string_view body) const {
    return guarded([&] {
        const auto start = Clock::now();
        const Sketch sketch = sketch_from_json(parse_body(body));
        json predictions = json::array();
        for (const auto& p : classifier_->classify(sketch)) {
            predictions.push_back({{"class", p.icon_class}, {"confidence", p.confidence}});
        }
        return reply(200, {{"predictions", predictions}, {"timing_ms", {{"recognize", ms_since(start)}}}});
    });
}

HttpResponse SearchService::search(std::string_view body_text) const {
    return guarded([&] {
        const auto start = Clock::now();
        const json body = parse_body(body_text);
        if (!body.is_object()) throw ValidationError("body must be a JSON object");

        Query query;
        if (body.contains("icons")) {
            const auto& icons = body["icons"];
            if (!icons.is_array()) throw ValidationError("\"icons\" must be an array");
            for (std::size_t i = 0; i < icons.size(); ++i) {
                const std::string where = "icons[" + std::to_string(i) + "]";
                const auto& icon = icons[i];
                if (!icon.is_object() || !icon.contains("class") || !icon["class"].is_string()) {
                    throw ValidationError(where + ": expected {\"class\": ..., \"bbox\": [l, t, r, b]}");
                }
                const auto cls = icon["class"].get<std::string>();
                if (!canonical_class(cls)) {
                    throw ValidationError("unsupported icon class \"" + cls + "\"; supported classes: " +
                                          supported_list());
                }
                if (!icon.contains("bbox") || !icon["bbox"].is_array() || icon["bbox"].size() != 4) {
                    throw ValidationError(where + ".bbox: expected [l, t, r, b]");
                }
                const auto& b = icon["bbox"];
                const Rect r{coordinate(b[0], where + ".bbox[0]"), coordinate(b[1], where + ".bbox[1]"),
                             coordinate(b[2], where + ".bbox[2]"), coordinate(b[3], where + ".bbox[3]")};
                if (r.degenerate()) throw ValidationError(where + ".bbox: empty box");
                query.add_icon({cls, r});
            }
        }
        if (body.contains("texts")) {
            const auto& texts = body["texts"];
            if (!texts.is_array()) throw ValidationError("\"texts\" must be an array of strings");
            for (const auto& t : texts) {
                if (!t.is_string()) throw ValidationError("\"texts\" must be an array of strings");
                for (auto& q : parse_text_queries(t.get<std::string>(), bundle_->text.pipeline())) {
                    query.add_text(std::move(q));
                }
            }
        }
        std::size_t limit = options_.default_limit;
        if (body.contains("limit")) {
            if (!body["limit"].is_number_integer() || body["limit"].get<long long>() < 1) {
                throw ValidationError("\"limit\" must be a positive integer");
            }
            limit = body["limit"].get<std::size_t>();
        }
        const bool want_explain = body.value("explain", false);
        if (query.empty()) throw ValidationError("empty query: add an icon or a text term");
        const double parse_ms = ms_since(start);

        const auto rank_start = Clock::now();
        const auto result = bundle_->search(query, options_.ranking, limit);
        const double rank_ms = ms_since(rank_start);

        json results = json::array();
        for (const auto& e : result) {
            json item{{"screen_id", e.screen_id}, {"score", e.score}, {"rank", e.rank}};
            if (want_explain) {
                json components = json::array();
                for (const auto& c : explain(query, e.screen_id, bundle_->sketch, bundle_->text, options_.ranking).components) {
                    components.push_back({{"label", c.label}, {"value", c.value}});
                }
                item["components"] = std::move(components);
            }
            results.push_back(std::move(item));
        }
        return reply(200, {{"results", results},
                           {"timing_ms", {{"parse", parse_ms}, {"rank", rank_ms}, {"total", ms_since(start)}}}});
    });
}

HttpResponse SearchService::screen(std::string_view screen_id) const {
    return guarded([&] {
        const auto doc = corpus_->find(screen_id);
        if (!doc) throw NotFoundError("unknown screen id \"" + std::string(screen_id) + "\"");
        const Screen& s = corpus_->screen(*doc);
        json contents = json::array();
        for (const auto& c : corpus_->contents(*doc)) {
            contents.push_back({{"kind", to_string(c.kind)}, {"text", c.raw_text}, {"quadrant", to_string(c.quadrant)}});
        }
        json out{{"id", s.id}, {"width", s.width}, {"height", s.height}, {"contents", contents}};
        if (!options_.thumbnails.empty()) {
            for (const char* ext : {".png", ".jpg", ".jpeg", ".webp"}) {
                const auto path = options_.thumbnails / (s.id + ext);
                std::error_code ec;
                if (std::filesystem::is_regular_file(path, ec)) {
                    out["thumbnail"] = path.string();
                    break;
                }
            }
        }
        return reply(200, out);
    });
}

HttpResponse SearchService::classes() const {
    json prefixes = json::array();
    for (const auto& k : kPositionalKeywords) prefixes.push_back(std::string(k.prefix) + ":");
    return reply(200, {{"classes", supported_classes()}, {"prefixes", prefixes}});
}

HttpResponse SearchService::health() const {
    return reply(200, {{"status", "ok"}, {"screens", corpus_->size()}, {"classes", supported_classes().size()}});
}

HttpResponse SearchService::handle(std::string_view method, std::string_view path, std::string_view body) const {
    if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    if (method == "POST" && path == "/api/recognize") return recognize(body);
    if (method == "POST" && path == "/api/search") return search(body);
    if (method == "GET" && path == "/api/classes") return classes();
    if (method == "GET" && path == "/api/health") return health();
    constexpr std::string_view kScreens = "/api/screens/";
    if (method == "GET" && path.starts_with(kScreens) && path.size() > kScreens.size()) {
        return screen(httplib::detail::decode_url(std::string(path.substr(kScreens.size())), false));
    }
    return error_reply(404, "no route for " + std::string(method) + " " + std::string(path));
}

struct HttpServer::Impl {
    const SearchService& service;
    httplib::Server server;
};

HttpServer::HttpServer(const SearchService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    const std::string origin = service.options().allow_origin;
    auto forward = [this, origin](const httplib::Request& req, httplib::Response& res) {
        const auto r = impl_->service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_content(r.body, "application/json");
    };
    srv.Post("/api/recognize", forward);
    srv.Post("/api/search", forward);
    srv.Get("/api/classes", forward);
    srv.Get("/api/health", forward);
    srv.Get(R"(/api/screens/(.+))", forward);
    srv.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw IoError("cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void HttpServer::listen() {
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    impl_->server.stop();
}

} // namespace screensearch
