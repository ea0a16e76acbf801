#include "mmfss/chart.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

namespace mmfss {

namespace {

constexpr long kUnits[] = {1, -1, 3, -3, 5, -5, 7, -7};

// pixel geometry
constexpr int kMargin = 30;
constexpr int kStem = 14;
constexpr int kFilt = 14;
constexpr int kStack = 4;

Exps gen(Gen g) {
    Exps e{};
    e[g] = 1;
    return e;
}

Element combo(const Element& a, const Element& b, const LocalInt& cb) {
    Element r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i] * cb;
    return r;
}

bool present(const Glyph& g, int depth) {
    return g.label.tau <= depth && (!g.tau_order || depth < g.label.tau + *g.tau_order);
}

bool wanted(ChartPart part, bool v1) {
    if (part == ChartPart::V1Periodic) return v1;
    if (part == ChartPart::Rest) return !v1;
    return true;
}

std::string degree_attr(int s, int f, int w) {
    return "(" + std::to_string(s) + "," + std::to_string(f) + "," + std::to_string(w) + ")";
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

class Builder {
public:
    Builder(const SpectralSequence& ss, const std::vector<ExtensionRecord>& ext, const ChartOptions& opt)
        : ss_(ss), ring_(ss.ring()), ext_(ext), opt_(opt), page_(opt.page ? ss.page_at(opt.page) : ss.einf()) {
        out_.options = opt;
    }

    Layout run() {
        glyphs();
        if (out_.glyphs.empty()) {
            out_.warnings.push_back("RegionEmpty: no classes in stems " + std::to_string(opt_.smin) + ".." +
                                    std::to_string(opt_.smax));
            return out_;
        }
        two_lines();
        product_lines(H1, LineKind::H1, 1);
        product_lines(H2, LineKind::H2, 3);
        differential_lines();
        if (opt_.page == 0 && opt_.show_hidden) hidden_lines();
        std::sort(out_.lines.begin(), out_.lines.end(), [](const ChartLine& a, const ChartLine& b) {
            return std::tie(a.kind, a.s0, a.f0, a.stack0, a.s1, a.f1, a.stack1, a.word) <
                   std::tie(b.kind, b.s0, b.f0, b.stack0, b.s1, b.f1, b.stack1, b.word);
        });
        return out_;
    }

private:
    bool in_chart(int s, int f) const { return s >= opt_.smin && s <= opt_.smax && f >= 0 && f <= opt_.fmax; }

    void glyphs() {
        const int smax = std::min(opt_.smax, ss_.options().smax);
        auto recs = ss_.classes(page_, smax, opt_.fmax);
        const Page& inf = ss_.einf();
        const int W = static_cast<int>(inf.slots.begin()->second.Z.size()) - 1;
        std::map<SlotKey, std::vector<Glyph>> spots;
        for (const auto& r : recs) {
            if (r.s < opt_.smin) continue;
            Glyph g;
            g.s = r.s;
            g.f = r.f;
            g.label = r.label;
            g.tau_order = r.tau_order;
            g.level = r.level;
            g.v1 = is_v1_periodic(r.label);
            if (!wanted(opt_.part, g.v1)) continue;
            GeneratorWord cl = r.label;
            cl.tau = 0;
            g.value = ring_.evaluate(cl);
            if (r.box && opt_.page != 0) {
                // the chain of later differential kernels: gray dots under the surviving box
                Element v = g.value;
                int extra = 0;
                while (extra < 8 && !inf.state(v.key)->Z[W]->contains(integral_multiple(v.c))) {
                    Glyph d = g;
                    d.kind = GlyphKind::Dot;
                    d.color = torsion_color(std::nullopt);
                    d.value = v;
                    d.label.coeff = r.label.coeff << extra;
                    d.level = r.level + extra;
                    spots[{g.s, g.f}].push_back(d);
                    for (auto& c : v.c) c *= 2;
                    ++extra;
                }
                g.value = v;
                g.label.coeff = r.label.coeff << extra;
                g.level = r.level + extra;
            }
            g.kind = r.box ? GlyphKind::Box : GlyphKind::Dot;
            g.color = torsion_color(g.tau_order);
            spots[{g.s, g.f}].push_back(g);
        }
        for (auto& [key, gs] : spots) {
            std::stable_sort(gs.begin(), gs.end(), [](const Glyph& a, const Glyph& b) { return a.level < b.level; });
            for (std::size_t i = 0; i < gs.size(); ++i) {
                gs[i].stack = static_cast<int>(i);
                spot_index_[key].push_back(out_.glyphs.size());
                out_.glyphs.push_back(gs[i]);
            }
        }
    }

    // Glyph at (s,f) representing v at depth, up to a unit; -1 if v is zero
    // there, else the first present glyph when no single glyph matches.
    int match(const Element& v, int depth) const {
        if (!page_.state(v.key) || page_.is_boundary(v, depth)) return -1;
        auto it = spot_index_.find(v.key);
        if (it == spot_index_.end()) return -1;
        int fallback = -1;
        for (std::size_t gi : it->second) {
            const Glyph& g = out_.glyphs[gi];
            if (!present(g, depth)) continue;
            if (fallback < 0) fallback = static_cast<int>(gi);
            for (long u : kUnits)
                if (page_.is_boundary(combo(v, g.value, u), depth)) return static_cast<int>(gi);
        }
        return fallback;
    }

    void add_line(LineKind kind, const Glyph& a, int s1, int f1, int stack1, std::optional<int> torsion,
                  std::string word) {
        ChartLine l;
        l.kind = kind;
        l.s0 = a.s;
        l.f0 = a.f;
        l.stack0 = a.stack;
        l.s1 = s1;
        l.f1 = f1;
        l.stack1 = stack1;
        l.torsion = torsion;
        l.color = torsion_color(torsion);
        l.word = std::move(word);
        l.weight = a.weight();
        out_.lines.push_back(std::move(l));
    }

    void two_lines() {
        for (const auto& [key, idx] : spot_index_)
            for (std::size_t i : idx)
                for (std::size_t j : idx) {
                    const Glyph& a = out_.glyphs[i];
                    const Glyph& b = out_.glyphs[j];
                    if (b.level != a.level + 1 || b.label.e != a.label.e || b.label.coeff != 2 * a.label.coeff)
                        continue;
                    add_line(LineKind::TwoExtension, a, b.s, b.f, b.stack, b.tau_order,
                             "2 * " + a.label.pretty());
                }
    }

    void product_lines(Gen h, LineKind kind, int ds) {
        const std::string name = h == H1 ? "h1" : "h2";
        const std::size_t n = out_.glyphs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Glyph& a = out_.glyphs[i];
            SlotKey t{a.s + ds, a.f + 1};
            if (!ring_.in_range(t) || t.s > ss_.options().smax) continue;
            Element y = ring_.multiply(gen(h), a.value);
            int depth = a.label.tau;
            if (!in_chart(t.s, t.f)) {
                if (kind == LineKind::H1 && match(y, depth) >= 0)
                    add_line(LineKind::H1Tower, a, t.s, t.f, 0, a.tau_order, name + " * " + a.label.pretty());
                continue;
            }
            int m = match(y, depth);
            if (m < 0) continue;
            const Glyph& b = out_.glyphs[m];
            add_line(kind, a, b.s, b.f, b.stack, b.tau_order, name + " * " + a.label.pretty());
        }
    }

    // Source label of a d_r hitting y at depth, as a word, or "?".
    std::string source_of(int r, const Glyph& y, int depth) const {
        auto lit = ss_.layers().find(r);
        if (lit == ss_.layers().end()) return "?";
        const LayerEntry* e = lit->second.entry({y.s + 1, y.f - r});
        const SlotState* ts = ss_.page_at(r).state({y.s, y.f});
        if (!e || !ts) return "?";
        const Lattice& bt = *ts->B[std::min<std::size_t>(depth, ts->B.size() - 1)];
        const auto* ids = ring_.slot(e->src);
        for (std::size_t li = 0; li < e->labels.size(); ++li) {
            const auto& l = e->labels[li];
            if (l.a < 0 || l.value.c.empty() || l.value.is_zero()) continue;
            for (int j = 0; j < 4; ++j)
                for (long u : kUnits) {
                    Element d = combo(l.value, y.value, LocalInt(u) * two_pow(j));
                    if (bt.contains(integral_multiple(d.c))) {
                        GeneratorWord w = ring_.label((*ids)[li]);
                        w.coeff <<= l.a;
                        return w.pretty();
                    }
                }
        }
        return "?";
    }

    void differential_lines() {
        if (opt_.page == 0) {
            // every finite tau-order class was hit by d_(2t+1)
            for (const auto& g : out_.glyphs) {
                if (!g.tau_order) continue;
                int r = 2 * *g.tau_order + 1;
                add_differential(r, g, g.label.tau);
            }
            return;
        }
        // E_r: targets are the classes of tau-order (r-1)/2 on the next page
        const int r = std::max(3, opt_.page % 2 ? opt_.page : opt_.page + 1);
        const int t = (r - 1) / 2;
        const Page& next = ss_.page_at(r + 2);
        if (&next == &page_) return;
        auto recs = ss_.classes(next, std::min(opt_.smax, ss_.options().smax), opt_.fmax);
        for (const auto& rec : recs) {
            if (rec.s < opt_.smin || !rec.tau_order || *rec.tau_order != t) continue;
            if (!wanted(opt_.part, is_v1_periodic(rec.label))) continue;
            GeneratorWord cl = rec.label;
            cl.tau = 0;
            Glyph y;
            y.s = rec.s;
            y.f = rec.f;
            y.label = rec.label;
            y.value = ring_.evaluate(cl);
            int m = match(y.value, rec.label.tau);
            y.stack = m >= 0 ? out_.glyphs[m].stack : 0;
            add_differential(r, y, rec.label.tau);
        }
    }

    void add_differential(int r, const Glyph& y, int depth) {
        ChartLine l;
        l.kind = LineKind::Differential;
        l.r = r;
        l.color = differential_color(r);
        l.torsion = (r - 1) / 2;
        l.s0 = y.s + 1;
        l.f0 = y.f - r;
        l.s1 = y.s;
        l.f1 = y.f;
        l.stack1 = y.stack;
        std::string src = source_of(r, y, depth + (r - 1) / 2);
        l.word = "d" + std::to_string(r) + "(" + src + ") = tau^" + std::to_string((r - 1) / 2) + " " +
                 y.label.pretty();
        l.weight = (l.s0 + l.f0) / 2 - depth;
        out_.lines.push_back(std::move(l));
    }

    void hidden_lines() {
        const int gstem = kGenerators[G + 1].degree.s;
        std::set<std::tuple<std::string, int, int>> seen;
        for (const auto& row : ext_) {
            if (row.kind != "2" && row.kind != "eta" && row.kind != "nu") continue;
            TriDegree ds = degree_of_word(row.source);
            for (int k = 0; ds.s + k * gstem <= opt_.smax; ++k) {
                GeneratorWord a = row.source, b = row.target;
                a.e[G] += k;
                b.e[G] += k;
                TriDegree da = degree_of_word(a), db = degree_of_word(b);
                if (!in_chart(da.s, da.f) || !in_chart(db.s, db.f)) continue;
                if (!ring_.in_range({db.s, db.f}) || db.s > ss_.options().smax) continue;
                int ia = match(ring_.evaluate(a), a.tau);
                int ib = match(ring_.evaluate(b), b.tau);
                if (ia < 0 || ib < 0) continue;
                if (!seen.insert({row.kind, ia, ib}).second) continue;
                const Glyph& ga = out_.glyphs[ia];
                const Glyph& gb = out_.glyphs[ib];
                ChartLine l;
                l.kind = LineKind::Hidden;
                l.ext = row.kind;
                l.s0 = ga.s;
                l.f0 = ga.f;
                l.stack0 = ga.stack;
                l.s1 = gb.s;
                l.f1 = gb.f;
                l.stack1 = gb.stack;
                l.torsion = page_.tau_order(ring_.evaluate(b), b.tau);
                if (!l.torsion) l.torsion = gb.tau_order;
                l.color = torsion_color(l.torsion);
                l.word = row.kind + " * " + a.pretty() + " = " + b.pretty();
                l.weight = ga.weight();
                if (l.s0 == l.s1)
                    for (const auto& [key, idx] : spot_index_)
                        if (key.s == l.s0 && key.f > l.f0 && key.f < l.f1) l.curved = true;
                out_.lines.push_back(std::move(l));
            }
        }
    }

    const SpectralSequence& ss_;
    const E2Ring& ring_;
    const std::vector<ExtensionRecord>& ext_;
    ChartOptions opt_;
    const Page& page_;
    Layout out_;
    std::map<SlotKey, std::vector<std::size_t>> spot_index_;
};

}  // namespace

const char* to_string(GlyphKind k) { return k == GlyphKind::Box ? "box" : "dot"; }

const char* to_string(LineKind k) {
    switch (k) {
        case LineKind::TwoExtension: return "two-extension";
        case LineKind::H1: return "h1";
        case LineKind::H2: return "h2";
        case LineKind::Differential: return "differential";
        case LineKind::Hidden: return "hidden";
        case LineKind::H1Tower: return "h1-tower";
    }
    return "?";
}

std::string torsion_color(std::optional<int> t) {
    if (!t) return "gray";
    switch (*t) {
        case 1: return "red";
        case 2: return "blue";
        case 3: return "green";
        case 4: return "cyan";
        case 5: return "brown";
        case 6: return "magenta";
        case 11: return "orange";
        default: return "black";
    }
}

std::string differential_color(int r) { return torsion_color((r - 1) / 2); }

Layout layout_page(const SpectralSequence& ss, const std::vector<ExtensionRecord>& ext, const ChartOptions& opt) {
    return Builder(ss, ext, opt).run();
}

std::string emit_svg(const Layout& L) {
    const auto& o = L.options;
    const int ns = std::max(0, o.smax - o.smin) + 2;
    const int width = 2 * kMargin + ns * kStem;
    const int height = 2 * kMargin + (o.fmax + 2) * kFilt;
    auto X = [&](int s) { return kMargin + (s - o.smin + 1) * kStem; };
    auto Y = [&](int f, int stack) { return height - kMargin - (f + 1) * kFilt - stack * kStack; };
    auto tor = [](std::optional<int> t) { return t ? std::to_string(*t) : std::string("inf"); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    std::string title = o.page ? "E_" + std::to_string(o.page) : std::string("E_infinity");
    os << "<title>" << title << "</title>\n";

    // axes
    auto axis = [&](int x1, int y1, int x2, int y2, const std::string& word) {
        os << "<line class=\"axis\" x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
           << "\" stroke=\"black\" stroke-width=\"1\" data-degree=\"\" data-word=\"" << word
           << "\" data-torsion=\"\" data-kind=\"axis\"/>\n";
    };
    axis(X(o.smin) - kStem / 2, Y(0, 0) + kFilt / 2, X(o.smax) + kStem / 2, Y(0, 0) + kFilt / 2, "stem");
    axis(X(o.smin) - kStem / 2, Y(0, 0) + kFilt / 2, X(o.smin) - kStem / 2, Y(o.fmax, 0) - kFilt / 2, "filtration");
    for (int s = o.smin; s <= o.smax; ++s) {
        if (s % 4) continue;
        os << "<text x=\"" << X(s) << "\" y=\"" << Y(0, 0) + kFilt + 6 << "\" font-size=\"8\" text-anchor=\"middle\""
           << " data-degree=\"(" << s << ")\" data-word=\"\" data-torsion=\"\" data-kind=\"axis-label\">" << s
           << "</text>\n";
    }
    for (int f = 0; f <= o.fmax; f += 4)
        os << "<text x=\"" << kMargin - 4 << "\" y=\"" << Y(f, 0) + 3 << "\" font-size=\"8\" text-anchor=\"end\""
           << " data-degree=\"(" << f << ")\" data-word=\"\" data-torsion=\"\" data-kind=\"axis-label\">" << f
           << "</text>\n";

    for (const auto& l : L.lines) {
        int x0 = X(l.s0), y0 = Y(l.f0, l.stack0), x1 = X(l.s1), y1 = Y(l.f1, l.stack1);
        std::ostringstream attrs;
        attrs << " stroke=\"" << l.color << "\" stroke-width=\"1\"";
        if (l.kind == LineKind::Hidden) attrs << " stroke-dasharray=\"4,2\" fill=\"none\"";
        attrs << " data-degree=\"" << degree_attr(l.s0, l.f0, l.weight) << "\" data-word=\"" << escape(l.word)
              << "\" data-torsion=\"" << tor(l.torsion) << "\" data-kind=\"" << to_string(l.kind) << "\""
              << " data-color=\"" << l.color << "\"";
        if (l.kind == LineKind::Differential) attrs << " data-r=\"" << l.r << "\"";
        if (l.kind == LineKind::Hidden) attrs << " data-ext=\"" << l.ext << "\"";
        if (l.kind == LineKind::H1Tower) {
            os << "<path d=\"M " << x0 << " " << y0 << " L " << x0 + kStem / 2 << " " << y0 - kFilt / 2 << " M "
               << x0 + kStem / 2 - 4 << " " << y0 - kFilt / 2 << " L " << x0 + kStem / 2 << " " << y0 - kFilt / 2
               << " L " << x0 + kStem / 2 << " " << y0 - kFilt / 2 + 4 << "\" fill=\"none\"" << attrs.str()
               << "/>\n";
        } else if (l.curved) {
            os << "<path d=\"M " << x0 << " " << y0 << " Q " << (x0 + x1) / 2 + kStem << " " << (y0 + y1) / 2 << " "
               << x1 << " " << y1 << "\"" << attrs.str() << "/>\n";
        } else {
            os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y1 << "\""
               << attrs.str() << "/>\n";
        }
    }

    for (const auto& g : L.glyphs) {
        int x = X(g.s), y = Y(g.f, g.stack);
        std::ostringstream attrs;
        attrs << " data-degree=\"" << degree_attr(g.s, g.f, g.weight()) << "\" data-word=\""
              << escape(g.label.pretty()) << "\" data-torsion=\"" << tor(g.tau_order) << "\" data-kind=\""
              << to_string(g.kind) << "\" data-color=\"" << g.color << "\" data-level=\"" << g.level << "\"";
        if (g.kind == GlyphKind::Box)
            os << "<rect x=\"" << x - 3 << "\" y=\"" << y - 3 << "\" width=\"6\" height=\"6\" fill=\"white\" stroke=\""
               << g.color << "\"" << attrs.str() << "/>\n";
        else
            os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2\" fill=\"" << g.color << "\"" << attrs.str()
               << "/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

ChartCounts count_svg(const std::string& svg) {
    ChartCounts c;
    static const std::regex kind_re("data-kind=\"([a-z0-9-]+)\"");
    static const std::regex color_re("data-color=\"([a-z]+)\"");
    static const std::regex r_re("data-r=\"([0-9]+)\"");
    std::istringstream is(svg);
    std::string line;
    std::smatch m;
    while (std::getline(is, line)) {
        if (!std::regex_search(line, m, kind_re)) continue;
        std::string kind = m[1];
        if (kind == "dot" || kind == "box") {
            if (std::regex_search(line, m, color_re)) ++c.glyphs[kind + ":" + m[1].str()];
        } else if (kind == "differential") {
            if (std::regex_search(line, m, r_re)) ++c.differentials[std::stoi(m[1])];
        }
    }
    return c;
}

ChartCounts count_records(const std::vector<EinfRecord>& records, int smin, int smax, int fmax, ChartPart part) {
    ChartCounts c;
    for (const auto& r : records) {
        if (r.s < smin || r.s > smax || r.f > fmax) continue;
        if (!wanted(part, is_v1_periodic(r.label))) continue;
        ++c.glyphs[std::string(r.box ? "box" : "dot") + ":" + torsion_color(r.tau_order)];
        if (r.tau_order) ++c.differentials[2 * *r.tau_order + 1];
    }
    return c;
}

}  // namespace mmfss
