#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmfss/engine.hpp"

namespace mmfss {

enum class GlyphKind { Box, Dot };
enum class LineKind { TwoExtension, H1, H2, Differential, Hidden, H1Tower };

const char* to_string(GlyphKind k);
const char* to_string(LineKind k);

// Colors keyed by tau-order (nullopt = infinite) and by differential length.
std::string torsion_color(std::optional<int> tau_order);
std::string differential_color(int r);

struct Glyph {
    GlyphKind kind = GlyphKind::Dot;
    std::string color;
    int s = 0, f = 0, stack = 0;
    GeneratorWord label;  // tau = first depth at which the class is present
    std::optional<int> tau_order;
    int level = 0;
    bool v1 = false;
    Element value;  // classical value of the label
    int weight() const { return (s + f) / 2 - label.tau; }
};

struct ChartLine {
    LineKind kind = LineKind::H1;
    std::string color;
    int s0 = 0, f0 = 0, stack0 = 0;
    int s1 = 0, f1 = 0, stack1 = 0;
    std::string word;  // e.g. "d5(Delta^2) = tau^2h2g"
    std::optional<int> torsion;
    int r = 0;               // differential length
    std::string ext;         // 2 / eta / nu for hidden lines
    bool curved = false;
    int weight = 0;          // weight at the first endpoint
};

enum class ChartPart { All, V1Periodic, Rest };

struct ChartOptions {
    int page = 0;  // 0 for E_infinity, otherwise the E_r page
    int smin = 0, smax = 191;
    int fmax = 53;
    ChartPart part = ChartPart::All;
    bool show_hidden = true;
};

struct Layout {
    ChartOptions options;
    std::vector<Glyph> glyphs;
    std::vector<ChartLine> lines;
    std::vector<std::string> warnings;  // RegionEmpty
};

Layout layout_page(const SpectralSequence& ss, const std::vector<ExtensionRecord>& ext, const ChartOptions& opt);
std::string emit_svg(const Layout& layout);

// Structural counts, read back from data attributes or computed from records.
struct ChartCounts {
    std::map<std::string, int> glyphs;    // "dot:red", "box:gray", ...
    std::map<int, int> differentials;     // length -> lines
    bool operator==(const ChartCounts&) const = default;
};

ChartCounts count_svg(const std::string& svg);
// Expected E_infinity chart counts: each finite tau-order class is the
// target of one d_(2t+1) line.
ChartCounts count_records(const std::vector<EinfRecord>& records, int smin, int smax, int fmax,
                          ChartPart part = ChartPart::All);

}  // namespace mmfss
