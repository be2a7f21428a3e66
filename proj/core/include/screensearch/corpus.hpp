#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace screensearch {

/// Dense screen handle: position of the screen in a corpus sorted by id.
using DocId = std::uint32_t;

/// Axis-aligned rectangle; pixel or normalized units depending on context.
struct Rect {
    double left = 0.0;
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;

    double width() const { return right - left; }
    double height() const { return bottom - top; }
    double area() const { return width() * height(); }
    bool degenerate() const { return !(left < right) || !(top < bottom); }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// One of the four equal screen regions used as document zones.
enum class Quadrant : std::uint8_t { TL = 0, TR = 1, BL = 2, BR = 3 };

inline constexpr std::array<Quadrant, 4> kAllQuadrants{Quadrant::TL, Quadrant::TR, Quadrant::BL,
                                                       Quadrant::BR};

std::string_view to_string(Quadrant q);

enum class ContentKind : std::uint8_t { ScreenText = 0, ElementDescription = 1 };

std::string_view to_string(ContentKind k);

struct UiElement {
    Rect bounds;
    std::optional<std::string> text;
    std::optional<std::string> element_class;
    std::optional<std::string> icon_class;
    std::vector<UiElement> children;
};

struct Screen {
    std::string id;
    int width = 0;
    int height = 0;
    UiElement root;
    /// Elements removed during validation because their bounds were degenerate.
    std::size_t dropped_elements = 0;
};

/// One extracted text snippet or element description with its position.
struct ScreenContent {
    std::string screen_id;
    std::string raw_text;
    ContentKind kind = ContentKind::ScreenText;
    Rect bbox;
    Quadrant quadrant = Quadrant::TL;

    friend bool operator==(const ScreenContent&, const ScreenContent&) = default;
};

/// Set of legal element_class labels (element_classes.txt).
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::set<std::string> labels) : labels_(std::move(labels)) {}

    static Vocabulary load(const std::filesystem::path& path);

    bool contains(std::string_view label) const { return labels_.contains(std::string(label)); }
    const std::set<std::string>& labels() const { return labels_; }

private:
    std::set<std::string> labels_;
};

/// Parses one screen document (JSON text). When `vocab` is given, element_class
/// labels outside it are rejected.
Screen parse_screen(std::string_view document, const Vocabulary* vocab = nullptr);

/// Serializes a screen back into the document format.
std::string screen_to_json(const Screen& screen);

/// Depth-first pre-order extraction of visible texts and labeled elements.
std::vector<ScreenContent> extract_contents(const Screen& screen);

/// Quadrant of a point; ties on the midlines go right/bottom.
Quadrant quadrant_of(double x, double y, const Screen& screen);
Quadrant quadrant_of(double x, double y, int width, int height);

/// Label used as an element's description word: the icon class when present,
/// otherwise the element class.
std::optional<std::string> description_label(const UiElement& element);

/// Screens sorted by id plus their extracted contents.
class Corpus {
public:
    Corpus() = default;
    /// Takes ownership of `screens`; sorts them by id and rejects duplicates.
    explicit Corpus(std::vector<Screen> screens);

    std::size_t size() const { return screens_.size(); }
    bool empty() const { return screens_.empty(); }

    const Screen& screen(DocId doc) const { return screens_.at(doc); }
    const std::vector<Screen>& screens() const { return screens_; }
    const std::vector<ScreenContent>& contents(DocId doc) const { return contents_.at(doc); }

    std::optional<DocId> find(std::string_view id) const;
    std::size_t dropped_elements() const;

private:
    std::vector<Screen> screens_;
    std::vector<std::vector<ScreenContent>> contents_;
    std::unordered_map<std::string, DocId> by_id_;
};

/// Loads every `*.screen.json` file in `dir`. If the directory holds an
/// `element_classes.txt`, labels are validated against it.
Corpus load_corpus(const std::filesystem::path& dir);

/// Writes one `<id>.screen.json` per screen into `dir`.
void write_corpus(const std::vector<Screen>& screens, const std::filesystem::path& dir);

} // namespace screensearch
