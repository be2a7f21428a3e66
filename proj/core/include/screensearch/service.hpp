#pragma once

#include "screensearch/index_bundle.hpp"
#include "screensearch/recognizer.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace screensearch {

struct ServiceOptions {
    std::size_t default_limit = kDefaultResultLimit;
    RankingConfig ranking;
    /// Directory holding `<screen id>.png` (or .jpg/.jpeg/.webp) screenshots; optional.
    std::filesystem::path thumbnails;
    /// Value of Access-Control-Allow-Origin.
    std::string allow_origin = "*";
};

struct HttpResponse {
    int status = 200;
    std::string body; // JSON
};

/// Request handlers over shared read-only state. Every handler is const and
/// safe to call from many threads at once.
class SearchService {
public:
    /// Throws ValidationError when the corpus and the indexes disagree.
    SearchService(std::shared_ptr<const IndexBundle> bundle, std::shared_ptr<const Classifier> classifier,
                  std::shared_ptr<const Corpus> corpus, ServiceOptions options = {});

    /// Body: {"strokes": [[[x, y], ...], ...]}.
    HttpResponse recognize(std::string_view body) const;
    /// Body: {"icons": [{"class": c, "bbox": [l, t, r, b]}], "texts": [raw], "limit": n, "explain": bool}.
    HttpResponse search(std::string_view body) const;
    HttpResponse screen(std::string_view screen_id) const;
    HttpResponse classes() const;
    HttpResponse health() const;

    /// Dispatches a request by method and path; unknown routes give 404.
    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

    const ServiceOptions& options() const { return options_; }

private:
    std::shared_ptr<const IndexBundle> bundle_;
    std::shared_ptr<const Classifier> classifier_;
    std::shared_ptr<const Corpus> corpus_;
    ServiceOptions options_;
};

/// HTTP front end for a SearchService.
class HttpServer {
public:
    explicit HttpServer(const SearchService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the address; port 0 picks a free port. Returns the bound port.
    /// Throws IoError when the address cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace screensearch
