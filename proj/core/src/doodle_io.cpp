#include "screensearch/doodle_io.hpp"

#include "screensearch/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace screensearch {

using nlohmann::json;

namespace {

json strokes_json(const Sketch& sketch) {
    json strokes = json::array();
    for (const auto& stroke : sketch) {
        json pts = json::array();
        for (const auto& p : stroke) pts.push_back({p.x, p.y});
        strokes.push_back(std::move(pts));
    }
    return strokes;
}

Sketch strokes_from(const json& j) {
    if (!j.is_array()) throw ParseError("strokes: expected an array");
    Sketch sketch;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array()) throw ParseError("strokes[" + std::to_string(i) + "]: expected an array");
        Stroke stroke;
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            const auto& p = j[i][k];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                throw ParseError("strokes[" + std::to_string(i) + "][" + std::to_string(k) + "]: expected [x, y]");
            }
            stroke.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        sketch.push_back(std::move(stroke));
    }
    return sketch;
}

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

} // namespace

std::string sketch_to_json(const Sketch& sketch) {
    return strokes_json(sketch).dump();
}

Sketch sketch_from_json(std::string_view text) {
    return strokes_from(parse(text));
}

std::string doodles_to_jsonl(const std::vector<LabeledSketch>& doodles) {
    std::string out;
    for (const auto& d : doodles) {
        out += json{{"class", d.icon_class}, {"strokes", strokes_json(d.sketch)}}.dump();
        out += '\n';
    }
    return out;
}

std::vector<LabeledSketch> doodles_from_jsonl(std::string_view text) {
    std::vector<LabeledSketch> out;
    std::size_t lineno = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const json j = parse(line);
            if (!j.is_object() || !j.contains("class") || !j["class"].is_string() || !j.contains("strokes")) {
                throw ParseError("expected {\"class\": ..., \"strokes\": ...}");
            }
            out.push_back({strokes_from(j["strokes"]), j["class"].get<std::string>()});
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void save_doodles(const std::vector<LabeledSketch>& doodles, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << doodles_to_jsonl(doodles);
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<LabeledSketch> load_doodles(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return doodles_from_jsonl(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace screensearch
