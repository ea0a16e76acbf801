#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "mmfss/chart.hpp"

using namespace mmfss;

namespace {

struct World {
    Dataset d;
    std::unique_ptr<E2Ring> ring;
    std::unique_ptr<SpectralSequence> ss;
};

const World& world() {
    static const World w = [] {
        World x;
        x.d = load_dataset_dir(MMFSS_DATA_DIR);
        x.ring = std::make_unique<E2Ring>(x.d);
        x.ss = std::make_unique<SpectralSequence>(*x.ring, x.d.seeds);
        x.ss->run();
        return x;
    }();
    return w;
}

Layout chart(int page, int smin, int smax, ChartPart part = ChartPart::All) {
    ChartOptions o;
    o.page = page;
    o.smin = smin;
    o.smax = smax;
    o.part = part;
    return layout_page(*world().ss, world().d.extensions, o);
}

std::vector<const Glyph*> at(const Layout& L, int s, int f) {
    std::vector<const Glyph*> out;
    for (const auto& g : L.glyphs)
        if (g.s == s && g.f == f) out.push_back(&g);
    std::sort(out.begin(), out.end(), [](const Glyph* a, const Glyph* b) { return a->stack < b->stack; });
    return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("color tables") {
    CHECK(torsion_color(std::nullopt) == "gray");
    CHECK(torsion_color(1) == "red");
    CHECK(torsion_color(2) == "blue");
    CHECK(torsion_color(3) == "green");
    CHECK(torsion_color(4) == "cyan");
    CHECK(torsion_color(5) == "brown");
    CHECK(torsion_color(6) == "magenta");
    CHECK(torsion_color(11) == "orange");
    CHECK(differential_color(3) == "red");
    CHECK(differential_color(11) == "brown");
    CHECK(differential_color(23) == "orange");
}

TEST_CASE("empty layout is axes only") {
    Layout L;
    L.options.smin = 0;
    L.options.smax = 10;
    std::string svg = emit_svg(L);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "data-kind=\"axis\"") == 2);
    CHECK(count(svg, "data-kind=\"dot\"") == 0);
    CHECK(count(svg, "data-kind=\"box\"") == 0);
    CHECK(count_svg(svg) == ChartCounts{});
}

TEST_CASE("a region without classes warns") {
    // stem 3 holds h2, 2h2 and tau h1^3, none of them v1-periodic
    Layout L = chart(0, 3, 3, ChartPart::V1Periodic);
    CHECK(L.glyphs.empty());
    REQUIRE(L.warnings.size() == 1);
    CHECK(L.warnings[0].rfind("RegionEmpty", 0) == 0);
}

TEST_CASE("every E_infinity class appears once") {
    const auto& recs = world().d.expected_einf;
    Layout L = chart(0, 0, 191);
    std::multiset<std::tuple<int, int, std::string>> got, want;
    for (const auto& g : L.glyphs) got.insert({g.s, g.f, g.label.str()});
    for (const auto& r : recs)
        if (r.f <= 53) want.insert({r.s, r.f, r.label.str()});
    CHECK(got == want);
}

TEST_CASE("structural counts match the dataset") {
    const auto& recs = world().d.expected_einf;
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 20}, {21, 60}, {100, 140}, {0, 191}}) {
        INFO("stems " << a << ".." << b);
        std::string svg = emit_svg(chart(0, a, b));
        CHECK(count_svg(svg) == count_records(recs, a, b, 53));
    }
    Layout v1 = chart(0, 0, 191, ChartPart::V1Periodic), rest = chart(0, 0, 191, ChartPart::Rest);
    CHECK(count_svg(emit_svg(v1)) == count_records(recs, 0, 191, 53, ChartPart::V1Periodic));
    CHECK(count_svg(emit_svg(rest)) == count_records(recs, 0, 191, 53, ChartPart::Rest));
    CHECK(v1.glyphs.size() + rest.glyphs.size() == chart(0, 0, 191).glyphs.size());
}

TEST_CASE("rendering is deterministic") {
    CHECK(emit_svg(chart(0, 0, 191)) == emit_svg(chart(0, 0, 191)));
    CHECK(emit_svg(chart(5, 0, 60)) == emit_svg(chart(5, 0, 60)));
}

TEST_CASE("(48,0) on E2: two dots under a box") {
    Layout L = chart(2, 40, 60, ChartPart::Rest);
    auto spot = at(L, 48, 0);
    REQUIRE(spot.size() == 3);
    CHECK(spot[0]->kind == GlyphKind::Dot);
    CHECK(spot[1]->kind == GlyphKind::Dot);
    CHECK(spot[2]->kind == GlyphKind::Box);
    CHECK(spot[0]->label == GeneratorWord::parse("1*Delta^2"));
    CHECK(spot[1]->label == GeneratorWord::parse("2*Delta^2"));
    CHECK(spot[2]->label == GeneratorWord::parse("4*Delta^2"));
    int two_lines = 0;
    for (const auto& l : L.lines)
        if (l.kind == LineKind::TwoExtension && l.s0 == 48 && l.f0 == 0 && l.s1 == 48 && l.f1 == 0) ++two_lines;
    CHECK(two_lines == 2);
}

TEST_CASE("(120,24) on E_infinity: orange, magenta, blue from the bottom") {
    auto spot = at(chart(0, 100, 140), 120, 24);
    std::vector<std::string> chain;
    for (const Glyph* g : spot)
        if (g->label.e == GeneratorWord::parse("1*g^6").e) chain.push_back(g->color);
    CHECK(chain == std::vector<std::string>{"orange", "magenta", "blue"});
}

TEST_CASE("a tau^5-torsion dot is brown") {
    Layout L = chart(0, 0, 191);
    int seen = 0;
    for (const auto& g : L.glyphs)
        if (g.tau_order == 5) {
            ++seen;
            CHECK(g.color == "brown");
        }
    CHECK(seen > 0);
    std::string svg = emit_svg(L);
    CHECK(count(svg, "data-torsion=\"5\" data-kind=\"dot\" data-color=\"brown\"") == static_cast<std::size_t>(seen));
}

TEST_CASE("differential lines: slope and color by length") {
    for (int page : {0, 11}) {
        Layout L = chart(page, 0, 191);
        int d11 = 0;
        for (const auto& l : L.lines) {
            if (l.kind != LineKind::Differential) continue;
            INFO(l.word);
            CHECK(l.s1 - l.s0 == -1);
            CHECK(l.f1 - l.f0 == l.r);
            CHECK(l.color == differential_color(l.r));
            if (l.r == 11) {
                ++d11;
                CHECK(l.color == "brown");
            }
        }
        CHECK(d11 > 0);
    }
}

TEST_CASE("(124,6): an h1 line and a hidden eta line") {
    Layout L = chart(0, 110, 140);
    bool h1 = false, eta = false;
    for (const auto& l : L.lines) {
        if (l.s0 != 124 || l.f0 != 6) continue;
        if (l.kind == LineKind::H1) h1 = true;
        if (l.kind == LineKind::Hidden && l.ext == "eta") eta = true;
    }
    CHECK(h1);
    CHECK(eta);
    CHECK(emit_svg(L).find("stroke-dasharray") != std::string::npos);
}
