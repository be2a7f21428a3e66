#include "screensearch/synthetic.hpp"

#include "screensearch/error.hpp"
#include "screensearch/textpipe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace screensearch {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// --- template primitives (unit square, y grows downwards) ------------------

Stroke line(Point a, Point b, int n = 12) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        const double t = double(i) / n;
        s.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return s;
}

Stroke polyline(std::initializer_list<Point> pts, int per_segment = 10) {
    Stroke s;
    const std::vector<Point> v(pts);
    for (std::size_t i = 1; i < v.size(); ++i) {
        auto seg = line(v[i - 1], v[i], per_segment);
        s.insert(s.end(), seg.begin() + (i == 1 ? 0 : 1), seg.end());
    }
    return s;
}

Stroke rect(double l, double t, double r, double b) {
    return polyline({{l, t}, {r, t}, {r, b}, {l, b}, {l, t}});
}

// Angles in radians; 0 points right and positive angles turn clockwise on screen.
Stroke arc(double cx, double cy, double rx, double ry, double a0, double a1, int n = 32) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        const double a = a0 + (a1 - a0) * double(i) / n;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return s;
}

Stroke circle(double cx, double cy, double r, int n = 32) {
    return arc(cx, cy, r, r, -kPi / 2, 3 * kPi / 2, n);
}

Stroke polar(double cx, double cy, double scale, auto&& radius, int n = 96) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        const double a = -kPi / 2 + 2 * kPi * double(i) / n;
        const double r = scale * radius(a);
        s.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return s;
}

const std::vector<std::pair<std::string, std::string>>& icon_labels() {
    static const std::vector<std::pair<std::string, std::string>> labels{
        {"photo_camera", "Camera"}, {"cloud", "Cloud"},          {"email", "Envelope"},
        {"home", "House"},          {"window", "Jail-window"},   {"crop_square", "Square"},
        {"star", "Star"},           {"avatar", "Avatar"},        {"arrow_backward", "Back"},
        {"close", "Cancel"},        {"check_box", "Checkbox"},   {"expand_more", "Drop-down"},
        {"arrow_forward", "Forward"}, {"chevron_left", "Left arrow"}, {"menu", "Menu"},
        {"play", "Play"},           {"add", "Plus"},             {"search", "Search"},
        {"settings", "Setting"},    {"share", "Share"},          {"slider", "Slider"},
        {"squiggle", "Squiggle"},   {"toggle", "Switch"},
    };
    return labels;
}

// Most frequent words first; the tail of the vocabulary is made-up words.
constexpr std::string_view kUiWords[] = {
    "home", "search", "settings", "login", "sign", "account", "profile", "password", "email", "username",
    "cancel", "save", "share", "next", "continue", "submit", "done", "back", "menu", "help",
    "about", "privacy", "terms", "policy", "notifications", "messages", "inbox", "send", "reply", "delete",
    "edit", "editor", "view", "details", "more", "options", "filter", "sort", "categories", "favorites",
    "cart", "checkout", "order", "payment", "price", "total", "shipping", "address", "phone", "contact",
    "map", "location", "nearby", "directions", "weather", "today", "tomorrow", "calendar", "event", "events",
    "music", "playlist", "album", "artist", "video", "photos", "camera", "gallery", "upload", "download",
    "news", "sports", "games", "shop", "store", "deals", "offers", "coupon", "rewards", "points",
    "friends", "follow", "followers", "following", "likes", "comments", "post", "feed", "story", "stories",
    "chat", "call", "recent", "history", "library", "books", "reading", "recipes", "fitness", "workout",
    "steps", "sleep", "health", "doctor", "appointment", "booking", "hotel", "flight", "travel", "tickets",
    "movies", "showtimes", "restaurant", "delivery", "pickup", "reservations", "drinks", "coffee", "pizza", "burger",
    "bank", "balance", "transfer", "transactions", "card", "wallet", "budget", "savings", "invest", "stocks",
    "language", "theme", "display", "sound", "volume", "brightness", "wifi", "bluetooth", "battery", "storage",
    "welcome", "start", "skip", "register", "forgot", "remember", "verify", "code", "confirm", "agree",
    "necklace", "jewelry", "fashion", "dress", "shoes", "watch", "bags", "beauty", "sale", "brand",
    "twitter", "facebook", "google", "instagram", "youtube", "linkedin", "pinterest", "whatsapp", "snapchat", "reddit",
};

constexpr char kConsonants[] = "bdfgklmnprstvz";
constexpr char kVowels[] = "aeiou";
constexpr std::uint64_t kSyllables = 14 * 5;
constexpr std::uint64_t kPseudoSpace = kSyllables * kSyllables * kSyllables * kSyllables;

std::size_t base_word_count() {
    return std::size(kUiWords);
}

Rect jitter_rect(const Rect& r, double noise, Rng& rng) {
    const double w = r.width(), h = r.height();
    const double cx = (r.left + r.right) / 2 + rng.normal(0, noise * w);
    const double cy = (r.top + r.bottom) / 2 + rng.normal(0, noise * h);
    const double nw = std::clamp(w * std::exp(rng.normal(0, noise)), 0.01, 1.0);
    const double nh = std::clamp(h * std::exp(rng.normal(0, noise)), 0.01, 1.0);
    Rect out{cx - nw / 2, cy - nh / 2, cx + nw / 2, cy + nh / 2};
    // Shift back inside the canvas without changing the size.
    if (out.left < 0) { out.right -= out.left; out.left = 0; }
    if (out.top < 0) { out.bottom -= out.top; out.top = 0; }
    if (out.right > 1) { out.left -= out.right - 1; out.right = 1; }
    if (out.bottom > 1) { out.top -= out.bottom - 1; out.bottom = 1; }
    out.left = std::max(0.0, out.left);
    out.top = std::max(0.0, out.top);
    return out;
}

// Screen layout builder working in pixels.
class ScreenBuilder {
public:
    ScreenBuilder(Rng& rng, int width, int height, const std::vector<double>& word_cdf)
        : rng_(rng), w_(width), h_(height), word_cdf_(word_cdf) {}

    UiElement element(double l, double t, double r, double b) const {
        UiElement e;
        const double left = std::clamp(std::round(l * w_), 0.0, double(w_ - 8));
        const double top = std::clamp(std::round(t * h_), 0.0, double(h_ - 8));
        e.bounds = {left, top, std::clamp(std::round(r * w_), left + 8, double(w_)),
                    std::clamp(std::round(b * h_), top + 8, double(h_))};
        return e;
    }

    std::string random_word() {
        const double u = rng_.uniform() * word_cdf_.back();
        const auto it = std::upper_bound(word_cdf_.begin(), word_cdf_.end(), u);
        return synthetic_word(std::min<std::size_t>(it - word_cdf_.begin(), word_cdf_.size() - 1));
    }

    std::string random_phrase(int max_words) {
        std::string s;
        const auto n = 1 + rng_.below(static_cast<std::uint64_t>(max_words));
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += random_word();
        }
        if (rng_.chance(0.5)) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        return s;
    }

    // Square icon in pixels; `size` is a fraction of the screen width.
    UiElement icon(std::string_view doodle_class, double x, double y, double size) const {
        const double hw = size, hh = size * double(w_) / double(h_);
        UiElement e = element(x, y, x + hw, y + hh);
        e.element_class = "Icon";
        e.icon_class = synthetic_icon_label(doodle_class);
        return e;
    }

    UiElement text(std::string words, double x, double y, double width, double height) const {
        UiElement e = element(x, y, x + width, y + height);
        e.element_class = "Text";
        e.text = std::move(words);
        return e;
    }

    std::string_view random_class() {
        const auto& classes = supported_classes();
        return classes[rng_.below(classes.size())];
    }

    UiElement random_screen_root() {
        UiElement root = element(0, 0, 1, 1);
        if (rng_.chance(0.8)) {
            UiElement bar = element(0, 0, 1, 0.08);
            bar.element_class = "Toolbar";
            bar.children.push_back(icon(rng_.chance(0.6) ? "Back" : "Menu", 0.02, 0.02, 0.07));
            bar.children.push_back(text(random_phrase(3), 0.14, 0.025, 0.5, 0.03));
            const auto extra = rng_.below(3);
            for (std::uint64_t i = 0; i < extra; ++i) {
                bar.children.push_back(icon(random_class(), 0.9 - 0.1 * double(i), 0.02, 0.07));
            }
            root.children.push_back(std::move(bar));
        }
        const auto body = 2 + rng_.below(7);
        for (std::uint64_t i = 0; i < body; ++i) {
            const double x = rng_.uniform(0.0, 0.85), y = rng_.uniform(0.1, 0.9);
            const double kind = rng_.uniform();
            if (kind < 0.5) {
                root.children.push_back(text(random_phrase(4), x, y, rng_.uniform(0.1, 1.0 - x), rng_.uniform(0.02, 0.05)));
            } else if (kind < 0.8) {
                root.children.push_back(icon(random_class(), std::min(x, 0.88), y, rng_.uniform(0.05, 0.12)));
            } else {
                static constexpr std::string_view kOther[] = {"Image", "Card", "Input", "Text Button", "Checkbox",
                                                              "On/Off Switch", "Slider", "List Item", "Advertisement"};
                const auto cls = kOther[rng_.below(std::size(kOther))];
                UiElement e = element(x, y, x + rng_.uniform(0.08, 1.0 - x), y + rng_.uniform(0.03, 0.08));
                e.element_class = std::string(cls);
                if (cls == "Text Button" || cls == "Input") e.text = random_phrase(2);
                root.children.push_back(std::move(e));
            }
        }
        if (rng_.chance(0.3)) {
            UiElement nav = element(0, 0.92, 1, 1);
            nav.element_class = "Bottom Navigation";
            const auto n = 3 + rng_.below(3);
            for (std::uint64_t i = 0; i < n; ++i) {
                nav.children.push_back(icon(random_class(), (double(i) + 0.35) / double(n), 0.935, 0.07));
            }
            root.children.push_back(std::move(nav));
        }
        return root;
    }

private:
    Rng& rng_;
    int w_, h_;
    const std::vector<double>& word_cdf_;
};

std::vector<double> zipf_cdf(std::size_t vocabulary) {
    std::vector<double> cdf(vocabulary);
    double acc = 0.0;
    for (std::size_t r = 0; r < vocabulary; ++r) {
        acc += 1.0 / (double(r) + 10.0);
        cdf[r] = acc;
    }
    return cdf;
}

} // namespace

// --- Rng ------------------------------------------------------------------

Rng::Rng(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return double(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    return next() % n;
}

double Rng::normal(double mean, double stddev) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// --- doodles --------------------------------------------------------------

Sketch doodle_template(std::string_view icon_class) {
    const auto cls = canonical_class(icon_class);
    if (!cls) {
        throw ValidationError("unsupported doodle class \"" + std::string(icon_class) + "\"");
    }
    const std::string& c = *cls;
    if (c == "Camera") {
        return {rect(0.05, 0.25, 0.95, 0.9), polyline({{0.3, 0.25}, {0.38, 0.1}, {0.62, 0.1}, {0.7, 0.25}}),
                circle(0.5, 0.57, 0.2)};
    }
    if (c == "Cloud") {
        return {polar(0.5, 0.55, 0.4, [](double a) { return 1.0 + 0.18 * std::abs(std::sin(2.5 * a)); }),
                line({0.15, 0.8}, {0.85, 0.8})};
    }
    if (c == "Envelope") {
        return {rect(0.05, 0.2, 0.95, 0.8), polyline({{0.05, 0.2}, {0.5, 0.55}, {0.95, 0.2}})};
    }
    if (c == "House") {
        return {polyline({{0.1, 0.45}, {0.5, 0.05}, {0.9, 0.45}}),
                polyline({{0.2, 0.45}, {0.2, 0.95}, {0.8, 0.95}, {0.8, 0.45}})};
    }
    if (c == "Jail-window") {
        return {rect(0.1, 0.1, 0.9, 0.9), line({0.3, 0.1}, {0.3, 0.9}), line({0.5, 0.1}, {0.5, 0.9}),
                line({0.7, 0.1}, {0.7, 0.9}), line({0.1, 0.5}, {0.9, 0.5})};
    }
    if (c == "Square") {
        return {rect(0.1, 0.1, 0.9, 0.9)};
    }
    if (c == "Star") {
        Stroke s;
        for (int i = 0; i <= 10; ++i) {
            const double a = -kPi / 2 + kPi * double(i) / 5.0;
            const double r = (i % 2 == 0) ? 0.45 : 0.18;
            s.push_back({0.5 + r * std::cos(a), 0.52 + r * std::sin(a)});
        }
        Stroke dense;
        for (std::size_t i = 1; i < s.size(); ++i) {
            auto seg = line(s[i - 1], s[i], 6);
            dense.insert(dense.end(), seg.begin() + (i == 1 ? 0 : 1), seg.end());
        }
        return {dense};
    }
    if (c == "Avatar") {
        return {circle(0.5, 0.3, 0.2), arc(0.5, 0.95, 0.4, 0.4, kPi, 2 * kPi)};
    }
    if (c == "Back") {
        return {polyline({{0.7, 0.1}, {0.3, 0.5}, {0.7, 0.9}})};
    }
    if (c == "Forward") {
        return {polyline({{0.3, 0.1}, {0.7, 0.5}, {0.3, 0.9}})};
    }
    if (c == "Left arrow") {
        return {line({0.9, 0.5}, {0.1, 0.5}), polyline({{0.4, 0.2}, {0.1, 0.5}, {0.4, 0.8}})};
    }
    if (c == "Cancel") {
        return {line({0.1, 0.1}, {0.9, 0.9}), line({0.9, 0.1}, {0.1, 0.9})};
    }
    if (c == "Checkbox") {
        return {rect(0.1, 0.1, 0.9, 0.9), polyline({{0.25, 0.5}, {0.45, 0.7}, {0.8, 0.3}})};
    }
    if (c == "Drop-down") {
        return {rect(0.05, 0.3, 0.95, 0.7), polyline({{0.68, 0.42}, {0.86, 0.42}, {0.77, 0.6}, {0.68, 0.42}}, 5)};
    }
    if (c == "Menu") {
        return {line({0.1, 0.2}, {0.9, 0.2}), line({0.1, 0.5}, {0.9, 0.5}), line({0.1, 0.8}, {0.9, 0.8})};
    }
    if (c == "Play") {
        return {polyline({{0.25, 0.1}, {0.85, 0.5}, {0.25, 0.9}, {0.25, 0.1}})};
    }
    if (c == "Plus") {
        return {line({0.5, 0.1}, {0.5, 0.9}), line({0.1, 0.5}, {0.9, 0.5})};
    }
    if (c == "Search") {
        return {circle(0.4, 0.4, 0.28), line({0.6, 0.6}, {0.9, 0.9})};
    }
    if (c == "Setting") {
        auto gear = [](double a) {
            const double phase = std::fmod(a + 4 * kPi, 2 * kPi / 8.0) / (2 * kPi / 8.0);
            return phase < 0.5 ? 1.0 : 0.72;
        };
        return {polar(0.5, 0.5, 0.45, gear, 160), circle(0.5, 0.5, 0.15, 20)};
    }
    if (c == "Share") {
        return {circle(0.25, 0.5, 0.1, 16), circle(0.75, 0.2, 0.1, 16), circle(0.75, 0.8, 0.1, 16),
                line({0.33, 0.45}, {0.67, 0.25}), line({0.33, 0.55}, {0.67, 0.75})};
    }
    if (c == "Slider") {
        return {line({0.05, 0.5}, {0.95, 0.5}, 20), circle(0.35, 0.5, 0.1, 20)};
    }
    if (c == "Squiggle") {
        Stroke s;
        for (int i = 0; i <= 60; ++i) {
            const double x = 0.05 + 0.9 * double(i) / 60.0;
            s.push_back({x, 0.5 + 0.3 * std::sin(2 * kPi * 2.0 * (x - 0.05) / 0.9)});
        }
        return {s};
    }
    // Switch
    Stroke track = line({0.3, 0.3}, {0.7, 0.3}, 8);
    auto right = arc(0.7, 0.5, 0.2, 0.2, -kPi / 2, kPi / 2, 16);
    track.insert(track.end(), right.begin() + 1, right.end());
    auto bottom = line({0.7, 0.7}, {0.3, 0.7}, 8);
    track.insert(track.end(), bottom.begin() + 1, bottom.end());
    auto left = arc(0.3, 0.5, 0.2, 0.2, kPi / 2, 3 * kPi / 2, 16);
    track.insert(track.end(), left.begin() + 1, left.end());
    return {track, circle(0.7, 0.5, 0.14, 20)};
}

Sketch generate_doodle(std::string_view icon_class, Rng& rng, const DoodleNoise& noise) {
    Sketch sketch = doodle_template(icon_class);

    const double angle = rng.uniform(-noise.max_rotation, noise.max_rotation);
    const double sx = rng.uniform(1 - noise.scale_jitter, 1 + noise.scale_jitter);
    const double sy = rng.uniform(1 - noise.scale_jitter, 1 + noise.scale_jitter);
    const double ca = std::cos(angle), sa = std::sin(angle);

    double min_x = 1e9, min_y = 1e9, max_x = -1e9, max_y = -1e9;
    for (auto& stroke : sketch) {
        Stroke kept;
        for (std::size_t i = 0; i < stroke.size(); ++i) {
            const bool endpoint = i == 0 || i + 1 == stroke.size();
            if (!endpoint && rng.chance(noise.dropout)) continue;
            const double x = (stroke[i].x - 0.5) * sx, y = (stroke[i].y - 0.5) * sy;
            Point p{ca * x - sa * y + rng.normal(0, noise.point_sigma), sa * x + ca * y + rng.normal(0, noise.point_sigma)};
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
            kept.push_back(p);
        }
        stroke = std::move(kept);
    }

    // Place the doodle in a random box on the canvas.
    const double extent = std::max(max_x - min_x, max_y - min_y);
    const double size = rng.uniform(0.3, 0.8);
    const double scale = extent > 0 ? size / extent : 1.0;
    const double ox = rng.uniform(0.05, 0.95 - size), oy = rng.uniform(0.05, 0.95 - size);
    for (auto& stroke : sketch) {
        for (auto& p : stroke) {
            p = {std::clamp(ox + (p.x - min_x) * scale, 0.0, 1.0), std::clamp(oy + (p.y - min_y) * scale, 0.0, 1.0)};
        }
    }
    return sketch;
}

std::vector<LabeledSketch> generate_doodle_set(const std::vector<std::string>& classes, std::size_t per_class,
                                               std::uint64_t seed, const DoodleNoise& noise) {
    if (per_class == 0) {
        throw ValidationError("doodles per class must be positive");
    }
    Rng rng(seed);
    std::vector<LabeledSketch> out;
    out.reserve(classes.size() * per_class);
    for (const auto& cls : classes) {
        const auto canonical = canonical_class(cls);
        if (!canonical) {
            throw ValidationError("unsupported doodle class \"" + cls + "\"");
        }
        for (std::size_t i = 0; i < per_class; ++i) {
            out.push_back({generate_doodle(*canonical, rng, noise), *canonical});
        }
    }
    return out;
}

// --- corpus ---------------------------------------------------------------

const std::vector<std::string>& element_categories() {
    static const std::vector<std::string> categories{
        "Advertisement", "Background Image", "Bottom Navigation", "Button Bar", "Card",
        "Checkbox", "Date Picker", "Drawer", "Icon", "Image",
        "Input", "List Item", "Map View", "Modal", "Multi-Tab",
        "Number Stepper", "On/Off Switch", "Pager Indicator", "Radio Button", "Slider",
        "Text", "Text Button", "Toolbar", "Video", "Web View",
    };
    return categories;
}

ClassMap synthetic_class_map() {
    ClassMap m;
    for (const auto& [label, cls] : icon_labels()) m.add(label, cls);
    m.add("Checkbox", "Checkbox");
    m.add("On/Off Switch", "Switch");
    m.add("Slider", "Slider");
    return m;
}

std::string synthetic_icon_label(std::string_view doodle_class) {
    const auto canonical = canonical_class(doodle_class);
    for (const auto& [label, cls] : icon_labels()) {
        if (canonical && cls == *canonical) return label;
    }
    throw ValidationError("unsupported doodle class \"" + std::string(doodle_class) + "\"");
}

std::string synthetic_word(std::size_t rank) {
    if (rank < base_word_count()) return std::string(kUiWords[rank]);
    // Bijective scramble of the rank over four-syllable words keeps made-up
    // words far apart in edit distance.
    std::uint64_t x = (std::uint64_t(rank) * 2654435761ULL + 12345ULL) % kPseudoSpace;
    std::string w;
    for (int i = 0; i < 4; ++i) {
        const auto syl = x % kSyllables;
        x /= kSyllables;
        w += kConsonants[syl / 5];
        w += kVowels[syl % 5];
    }
    return w;
}

std::vector<Screen> generate_corpus(const CorpusOptions& options) {
    if (options.screens == 0) {
        throw ValidationError("number of screens must be positive");
    }
    if (options.width <= 0 || options.height <= 0) {
        throw ValidationError("screen dimensions must be positive");
    }
    Rng rng(options.seed);
    const auto cdf = zipf_cdf(std::max<std::size_t>(options.vocabulary, 1));
    ScreenBuilder builder(rng, options.width, options.height, cdf);

    const int digits = std::max(6, static_cast<int>(std::to_string(options.screens).size()));
    std::vector<Screen> screens;
    screens.reserve(options.screens);
    for (std::size_t i = 0; i < options.screens; ++i) {
        Screen s;
        auto num = std::to_string(i);
        s.id = options.id_prefix + std::string(static_cast<std::size_t>(digits) - std::min<std::size_t>(digits, num.size()), '0') + num;
        s.width = options.width;
        s.height = options.height;
        s.root = builder.random_screen_root();
        screens.push_back(std::move(s));
    }
    return screens;
}

// --- planted benchmark ----------------------------------------------------

namespace {

struct ScreenFeatures {
    std::uint32_t classes = 0; // bit per supported class
    std::vector<std::pair<std::string, Quadrant>> words;
};

std::uint32_t class_bit(std::string_view cls) {
    const auto& classes = supported_classes();
    const auto it = std::find(classes.begin(), classes.end(), cls);
    return 1u << static_cast<unsigned>(it - classes.begin());
}

ScreenFeatures features_of(const Screen& screen, const ClassMap& class_map, const TextPipeline& pipeline) {
    ScreenFeatures f;
    auto visit = [&](auto&& self, const UiElement& e) -> void {
        std::optional<std::string> cls;
        if (e.icon_class) cls = class_map.map(*e.icon_class);
        if (!cls && e.element_class) cls = class_map.map(*e.element_class);
        if (cls) f.classes |= class_bit(*cls);
        for (const auto& c : e.children) self(self, c);
    };
    visit(visit, screen.root);
    for (const auto& content : extract_contents(screen)) {
        for (auto& t : pipeline.run(content.raw_text, content.kind)) f.words.emplace_back(std::move(t.lemma), content.quadrant);
    }
    return f;
}

struct Combination {
    std::uint32_t classes;
    std::string word;
    ZoneSet zones;
};

bool has_combination(const ScreenFeatures& f, const Combination& c) {
    if ((f.classes & c.classes) != c.classes) return false;
    return std::any_of(f.words.begin(), f.words.end(), [&](const auto& w) {
        return c.zones.contains(w.second) && fuzzy_match(c.word, w.first, 1);
    });
}

} // namespace

PlantedBenchmark generate_planted_benchmark(const PlantedOptions& options) {
    if (options.targets == 0) {
        throw ValidationError("number of planted targets must be positive");
    }
    PlantedBenchmark bench;
    CorpusOptions corpus_options;
    corpus_options.screens = std::max<std::size_t>(options.distractors, 1);
    corpus_options.seed = options.seed;
    if (options.distractors > 0) bench.screens = generate_corpus(corpus_options);

    const ClassMap class_map = synthetic_class_map();
    const TextPipeline pipeline;
    std::vector<ScreenFeatures> features;
    features.reserve(bench.screens.size() + options.targets);
    for (const auto& s : bench.screens) features.push_back(features_of(s, class_map, pipeline));

    Rng rng(options.seed ^ 0x5eed5eedULL);
    const auto cdf = zipf_cdf(corpus_options.vocabulary);
    ScreenBuilder builder(rng, corpus_options.width, corpus_options.height, cdf);
    const auto& classes = supported_classes();
    std::vector<Combination> planted;

    for (std::size_t t = 0; t < options.targets; ++t) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000) {
                throw Error("could not plant a unique target after 1000 attempts");
            }
            const auto a = classes[rng.below(classes.size())];
            auto b = classes[rng.below(classes.size())];
            if (a == b) continue;
            const std::string word = synthetic_word(200 + rng.below(corpus_options.vocabulary - 200));
            if (pipeline.normalize_term(word) != word || pipeline.is_stopword(word)) continue;

            const auto quadrant = kAllQuadrants[rng.below(4)];
            const bool edge = rng.chance(0.3);
            std::string prefix;
            if (edge) {
                const bool top = quadrant == Quadrant::TL || quadrant == Quadrant::TR;
                const bool left = quadrant == Quadrant::TL || quadrant == Quadrant::BL;
                prefix = rng.chance(0.5) ? (top ? "t" : "b") : (left ? "l" : "r");
            } else {
                static constexpr std::string_view kCorner[4][2] = {{"tl", "lt"}, {"tr", "rt"}, {"bl", "lb"}, {"br", "rb"}};
                prefix = std::string(kCorner[static_cast<int>(quadrant)][rng.below(2)]);
            }
            const Combination combo{class_bit(a) | class_bit(b), word, *zones_for_prefix(prefix)};
            if (std::any_of(features.begin(), features.end(), [&](const auto& f) { return has_combination(f, combo); })) {
                continue;
            }

            Screen target;
            target.id = "t" + std::string(5 - std::min<std::size_t>(5, std::to_string(t).size()), '0') + std::to_string(t);
            target.width = corpus_options.width;
            target.height = corpus_options.height;
            target.root = builder.element(0, 0, 1, 1);

            Query query;
            std::vector<Rect> placed;
            for (auto cls : {a, b}) {
                UiElement icon;
                Rect norm;
                for (int tries = 0; tries < 50; ++tries) {
                    const double size = rng.uniform(0.06, 0.14);
                    icon = builder.icon(cls, rng.uniform(0.02, 0.98 - size), rng.uniform(0.02, 0.9), size);
                    norm = {icon.bounds.left / target.width, icon.bounds.top / target.height,
                            icon.bounds.right / target.width, icon.bounds.bottom / target.height};
                    const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Rect& r) {
                        return norm.left < r.right && r.left < norm.right && norm.top < r.bottom && r.top < norm.bottom;
                    });
                    if (!overlaps) break;
                }
                placed.push_back(norm);
                target.root.children.push_back(std::move(icon));
                query.add_icon({std::string(cls), jitter_rect(norm, options.placement_noise, rng)});
            }

            // The planted word sits with its top-left corner inside `quadrant`.
            const bool right = quadrant == Quadrant::TR || quadrant == Quadrant::BR;
            const bool bottom = quadrant == Quadrant::BL || quadrant == Quadrant::BR;
            const double x = rng.uniform(right ? 0.52 : 0.02, right ? 0.8 : 0.4);
            const double y = rng.uniform(bottom ? 0.52 : 0.1, bottom ? 0.9 : 0.45);
            target.root.children.push_back(builder.text(word, x, y, 0.18, 0.03));
            const auto extras = rng.below(3);
            for (std::uint64_t i = 0; i < extras; ++i) {
                target.root.children.push_back(
                    builder.text(builder.random_phrase(3), rng.uniform(0.02, 0.6), rng.uniform(0.1, 0.9), 0.3, 0.03));
            }

            const auto target_features = features_of(target, class_map, pipeline);
            if (std::any_of(planted.begin(), planted.end(),
                            [&](const Combination& c) { return has_combination(target_features, c); })) {
                continue;
            }

            const std::string raw = prefix + ":" + word;
            query.add_text(parse_text_query(raw, pipeline));
            planted.push_back(combo);
            features.push_back(target_features);
            bench.queries.push_back({target.id, std::move(query), {raw}});
            bench.screens.push_back(std::move(target));
            break;
        }
    }
    return bench;
}

} // namespace screensearch
