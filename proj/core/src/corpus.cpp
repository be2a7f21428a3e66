#include "screensearch/corpus.hpp"

#include "screensearch/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace screensearch {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Quadrant q) {
    switch (q) {
    case Quadrant::TL: return "TL";
    case Quadrant::TR: return "TR";
    case Quadrant::BL: return "BL";
    case Quadrant::BR: return "BR";
    }
    return "?";
}

std::string_view to_string(ContentKind k) {
    return k == ContentKind::ScreenText ? "ScreenText" : "ElementDescription";
}

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::optional<std::string> optional_string(const json& node, const char* key, const std::string& path) {
    auto it = node.find(key);
    if (it == node.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw ParseError(path + "." + key + ": expected a string");
    }
    return it->get<std::string>();
}

// Returns nullopt when the element (and hence its subtree) is dropped.
std::optional<UiElement> parse_element(const json& node, const std::string& path, int width, int height,
                                       const Vocabulary* vocab, std::size_t& dropped) {
    if (!node.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    auto bounds = node.find("bounds");
    if (bounds == node.end() || !bounds->is_array() || bounds->size() != 4) {
        throw ParseError(path + ".bounds: expected [left, top, right, bottom]");
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(*bounds)[i].is_number()) {
            throw ParseError(path + ".bounds[" + std::to_string(i) + "]: expected a number");
        }
    }

    UiElement element;
    element.bounds.left = std::clamp((*bounds)[0].get<double>(), 0.0, double(width));
    element.bounds.top = std::clamp((*bounds)[1].get<double>(), 0.0, double(height));
    element.bounds.right = std::clamp((*bounds)[2].get<double>(), 0.0, double(width));
    element.bounds.bottom = std::clamp((*bounds)[3].get<double>(), 0.0, double(height));

    element.text = optional_string(node, "text", path);
    if (element.text && is_blank(*element.text)) {
        element.text.reset();
    }
    element.element_class = optional_string(node, "element_class", path);
    element.icon_class = optional_string(node, "icon_class", path);
    if (element.element_class && vocab && !vocab->contains(*element.element_class)) {
        throw ValidationError(path + ".element_class: unknown label \"" + *element.element_class + "\"");
    }

    std::vector<UiElement> children;
    if (auto it = node.find("children"); it != node.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw ParseError(path + ".children: expected an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            auto child = parse_element((*it)[i], path + ".children[" + std::to_string(i) + "]", width,
                                       height, vocab, dropped);
            if (child) {
                children.push_back(std::move(*child));
            }
        }
    }

    if (element.bounds.degenerate()) {
        // The whole subtree goes with it; children are counted as dropped too.
        std::size_t subtree = 1;
        auto count = [&](auto&& self, const UiElement& e) -> void {
            for (const auto& c : e.children) {
                ++subtree;
                self(self, c);
            }
        };
        UiElement tmp;
        tmp.children = std::move(children);
        count(count, tmp);
        dropped += subtree;
        return std::nullopt;
    }
    element.children = std::move(children);
    return element;
}

json element_to_json(const UiElement& e) {
    json node;
    node["bounds"] = {e.bounds.left, e.bounds.top, e.bounds.right, e.bounds.bottom};
    if (e.text) node["text"] = *e.text;
    if (e.element_class) node["element_class"] = *e.element_class;
    if (e.icon_class) node["icon_class"] = *e.icon_class;
    json children = json::array();
    for (const auto& c : e.children) {
        children.push_back(element_to_json(c));
    }
    node["children"] = std::move(children);
    return node;
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

std::string describe(std::string label) {
    std::replace_if(label.begin(), label.end(), [](char c) { return c == '_' || c == '-'; }, ' ');
    return label;
}

} // namespace

Vocabulary Vocabulary::load(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::set<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!is_blank(line)) labels.insert(line);
    }
    return Vocabulary(std::move(labels));
}

Screen parse_screen(std::string_view document, const Vocabulary* vocab) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("$: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("$: expected an object");
    }

    Screen screen;
    auto id = doc.find("id");
    if (id == doc.end() || !id->is_string() || id->get<std::string>().empty()) {
        throw ValidationError("$.id: missing or not a non-empty string");
    }
    screen.id = id->get<std::string>();

    for (const char* key : {"width", "height"}) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_number_integer()) {
            throw ValidationError(std::string("$.") + key + ": missing or not an integer");
        }
        if (it->get<long long>() <= 0) {
            throw ValidationError(std::string("$.") + key + ": must be positive");
        }
    }
    screen.width = doc["width"].get<int>();
    screen.height = doc["height"].get<int>();

    auto root = doc.find("root");
    if (root == doc.end()) {
        throw ValidationError("$.root: missing");
    }
    auto parsed = parse_element(*root, "$.root", screen.width, screen.height, vocab, screen.dropped_elements);
    if (!parsed) {
        throw ValidationError("$.root: degenerate bounds");
    }
    screen.root = std::move(*parsed);
    return screen;
}

std::string screen_to_json(const Screen& screen) {
    json doc;
    doc["id"] = screen.id;
    doc["width"] = screen.width;
    doc["height"] = screen.height;
    doc["root"] = element_to_json(screen.root);
    return doc.dump();
}

std::optional<std::string> description_label(const UiElement& element) {
    if (element.icon_class && !is_blank(*element.icon_class)) return element.icon_class;
    if (element.element_class && !is_blank(*element.element_class)) return element.element_class;
    return std::nullopt;
}

Quadrant quadrant_of(double x, double y, int width, int height) {
    if (!(x >= 0.0 && x <= width && y >= 0.0 && y <= height)) {
        throw ValidationError("coordinate (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") outside screen " + std::to_string(width) + "x" + std::to_string(height));
    }
    const bool right = 2.0 * x >= width;
    const bool bottom = 2.0 * y >= height;
    if (bottom) return right ? Quadrant::BR : Quadrant::BL;
    return right ? Quadrant::TR : Quadrant::TL;
}

Quadrant quadrant_of(double x, double y, const Screen& screen) {
    return quadrant_of(x, y, screen.width, screen.height);
}

std::vector<ScreenContent> extract_contents(const Screen& screen) {
    std::vector<ScreenContent> out;
    auto visit = [&](auto&& self, const UiElement& e) -> void {
        const Quadrant q = quadrant_of(e.bounds.left, e.bounds.top, screen);
        if (e.text && !is_blank(*e.text)) {
            out.push_back({screen.id, *e.text, ContentKind::ScreenText, e.bounds, q});
        }
        if (auto label = description_label(e)) {
            out.push_back({screen.id, describe(*label), ContentKind::ElementDescription, e.bounds, q});
        }
        for (const auto& child : e.children) {
            self(self, child);
        }
    };
    visit(visit, screen.root);
    return out;
}

Corpus::Corpus(std::vector<Screen> screens) : screens_(std::move(screens)) {
    std::sort(screens_.begin(), screens_.end(), [](const Screen& a, const Screen& b) { return a.id < b.id; });
    contents_.reserve(screens_.size());
    by_id_.reserve(screens_.size());
    for (std::size_t i = 0; i < screens_.size(); ++i) {
        if (!by_id_.emplace(screens_[i].id, DocId(i)).second) {
            throw ValidationError("duplicate screen id \"" + screens_[i].id + "\"");
        }
        contents_.push_back(extract_contents(screens_[i]));
    }
}

std::optional<DocId> Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::size_t Corpus::dropped_elements() const {
    std::size_t n = 0;
    for (const auto& s : screens_) n += s.dropped_elements;
    return n;
}

Corpus load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::optional<Vocabulary> vocab;
    if (fs::exists(dir / "element_classes.txt")) {
        vocab = Vocabulary::load(dir / "element_classes.txt");
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 12 && name.ends_with(".screen.json")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<Screen> screens;
    screens.reserve(files.size());
    std::unordered_map<std::string, fs::path> seen;
    for (const auto& file : files) {
        Screen s;
        try {
            s = parse_screen(read_file(file), vocab ? &*vocab : nullptr);
        } catch (const IoError&) {
            throw;
        } catch (const ParseError& e) {
            throw ParseError(file.filename().string() + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(file.filename().string() + ": " + e.what());
        }
        auto [it, inserted] = seen.emplace(s.id, file);
        if (!inserted) {
            throw ValidationError("duplicate screen id \"" + s.id + "\" in " + it->second.filename().string() +
                                  " and " + file.filename().string());
        }
        screens.push_back(std::move(s));
    }
    return Corpus(std::move(screens));
}

void write_corpus(const std::vector<Screen>& screens, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& s : screens) {
        const auto path = dir / (s.id + ".screen.json");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out << screen_to_json(s) << '\n';
    }
}

} // namespace screensearch
