#pragma once

#include "screensearch/recognizer.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace screensearch {

/// `[[[x, y], ...], ...]`.
std::string sketch_to_json(const Sketch& sketch);
/// Throws ParseError for malformed input.
Sketch sketch_from_json(std::string_view text);

/// One `{"class": ..., "strokes": ...}` object per line.
std::string doodles_to_jsonl(const std::vector<LabeledSketch>& doodles);
std::vector<LabeledSketch> doodles_from_jsonl(std::string_view text);

void save_doodles(const std::vector<LabeledSketch>& doodles, const std::filesystem::path& path);
/// Errors name the file and line.
std::vector<LabeledSketch> load_doodles(const std::filesystem::path& path);

} // namespace screensearch
