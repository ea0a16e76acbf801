// sseq: command-line front end for the mmf spectral sequence engine.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

#include "mmfss/chart.hpp"
#include "mmfss/cofiber.hpp"
#include "mmfss/homotopy.hpp"
#include "mmfss/regress.hpp"

#ifndef MMFSS_DATA_DIR
#define MMFSS_DATA_DIR "data"
#endif

using namespace mmfss;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Range {
    int lo = 0, hi = 191;
};

// The whole string must be a decimal integer.
std::optional<int> parse_int(std::string_view text) {
    int v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return v;
}

Range parse_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("expected a..b, got '" + text + "'");
    auto lo = parse_int(std::string_view(text).substr(0, dots)), hi = parse_int(std::string_view(text).substr(dots + 2));
    if (!lo || !hi) throw UsageError("expected a..b, got '" + text + "'");
    if (*lo < 0 || *hi < *lo) throw UsageError("empty range '" + text + "'");
    return {*lo, *hi};
}

struct Config {
    std::string data;
    std::string stems = "0..191";
    int window = 16;
    std::string out = ".";
};

struct Session {
    Dataset data;
    std::unique_ptr<E2Ring> ring;
    std::unique_ptr<SpectralSequence> ss;
    std::unique_ptr<Cofiber> cf;
    Range stems;
};

std::string data_dir(const Config& c) {
    if (!c.data.empty()) return c.data;
    if (const char* env = std::getenv("SSEQ_DATA_DIR")) return env;
    return MMFSS_DATA_DIR;
}

Range checked_stems(const Config& c) {
    Range r = parse_range(c.stems);
    if (r.hi >= 384) throw UsageError("stem range upper bound must be below 384");
    if (c.window <= 11) throw UsageError("window depth must exceed 11");
    return r;
}

Session open(const Config& c, bool run = true) {
    Session s;
    s.stems = checked_stems(c);
    s.data = load_dataset_dir(data_dir(c));
    s.ring = std::make_unique<E2Ring>(s.data);
    int covered = s.ring->slots().empty() ? -1 : s.ring->slots().rbegin()->first.s;
    if (s.stems.hi + 1 > covered)
        throw UsageError("the E2 data covers stems through " + std::to_string(covered) + "; choose an upper bound of at most " +
                         std::to_string(covered - 1));
    if (run) {
        EngineOptions o;
        o.window = c.window;
        o.smax = s.stems.hi;
        s.ss = std::make_unique<SpectralSequence>(*s.ring, s.data.seeds, o);
        s.ss->run();
        s.cf = std::make_unique<Cofiber>(*s.ss);
    }
    return s;
}

int cmd_validate(const Config& c, const std::string& path) {
    Dataset d = load_dataset_dir(path.empty() ? data_dir(c) : path);
    auto v = validate_dataset(d);
    E2Ring ring(d);
    SpectralSequence ss(ring, d.seeds);
    ss.run();
    for (int i : ss.decomposable_seeds())
        v.push_back({"IndecomposabilityViolation", "seed " + std::to_string(i) + " on " + d.seeds[i].source.pretty() +
                                                       " follows from other differentials"});
    for (int i : ss.unused_seeds())
        v.push_back({"UnusedSeed", "seed " + std::to_string(i) + " on " + d.seeds[i].source.pretty() + " never applies"});
    for (const auto& x : v) std::cout << x.kind << ": " << x.message << "\n";
    std::cout << d.generators.size() << " generators, " << d.slots.size() << " slots, " << d.seeds.size()
              << " seeds, " << d.extensions.size() << " extensions, " << d.expected_einf.size()
              << " expected classes; " << v.size() << " violations\n";
    return v.empty() ? 0 : 1;
}

int cmd_pages(const Config& c, int to) {
    Session s = open(c);
    for (const auto& p : s.ss->pages())
        if (p.r <= std::max(to, 3)) {
            std::size_t nonzero = 0;
            for (const auto& [key, st] : p.slots)
                if (key.s >= s.stems.lo && key.s <= s.stems.hi && !(*st.Z.back() == *st.B.back())) ++nonzero;
            std::cout << "E" << p.r << ": " << nonzero << " nonzero slots (classical)\n";
        }
    std::map<int, int> count;
    for (const auto& f : s.ss->differentials()) {
        if (f.r > to || f.src.s < s.stems.lo || f.src.s > s.stems.hi) continue;
        ++count[f.r];
        std::cout << "d" << f.r << " " << f.src.str() << " " << f.source.pretty() << " -> "
                  << s.ring->str(f.target, (f.r - 1) / 2) << "  [" << to_string(f.provenance);
        if (f.seed >= 0) std::cout << " " << s.data.seeds[f.seed].citation;
        std::cout << "]\n";
    }
    for (const auto& [r, n] : count) std::cout << "d" << r << ": " << n << " differentials\n";
    std::cout << s.ss->dd_checks() << " d o d compositions checked\n";
    for (const auto& f : s.ss->flags()) std::cerr << "flag: " << f << "\n";
    return 0;
}

int cmd_einf(const Config& c) {
    Session s = open(c);
    auto recs = s.ss->classes(s.ss->einf(), s.stems.hi, s.ring->reliable_fmax());
    std::set<std::string> got, want;
    std::cout << "[expected-einf]\n";
    for (const auto& r : recs)
        if (r.s >= s.stems.lo) {
            std::cout << r.line() << "\n";
            got.insert(r.line());
        }
    for (const auto& r : s.data.expected_einf)
        if (r.s >= s.stems.lo && r.s <= s.stems.hi) want.insert(r.line());
    if (want.empty()) return 0;
    std::size_t bad = 0;
    for (const auto& x : got)
        if (!want.count(x)) std::cerr << "unexpected: " << x << "\n", ++bad;
    for (const auto& x : want)
        if (!got.count(x)) std::cerr << "missing: " << x << "\n", ++bad;
    std::cerr << got.size() << " classes; " << (bad ? std::to_string(bad) + " mismatches" : "matches the expected dataset")
              << "\n";
    return bad ? 1 : 0;
}

int cmd_chart(const Config& c, const std::string& page, bool split, const std::string& region, bool no_hidden) {
    ChartOptions o;
    if (page == "einf" || page == "inf") {
        o.page = 0;
    } else {
        auto r = parse_int(page);
        if (!r) throw UsageError("--page takes r or einf");
        o.page = *r;
        if (o.page < 2 || o.page > 25) throw UsageError("--page must lie in 2..25 or be einf");
    }
    Session s = open(c);
    Range r = region.empty() ? s.stems : parse_range(region);
    if (r.hi > s.stems.hi) throw UsageError("region exceeds the computed stems");
    o.smin = r.lo;
    o.smax = r.hi;
    o.show_hidden = !no_hidden;
    fs::create_directories(c.out);
    std::string base = o.page ? "E" + std::to_string(o.page) : std::string("einf");
    std::vector<std::pair<ChartPart, std::string>> parts{{ChartPart::All, ""}};
    if (split) parts = {{ChartPart::V1Periodic, "-v1"}, {ChartPart::Rest, "-rest"}};
    for (const auto& [part, suffix] : parts) {
        o.part = part;
        Layout L = layout_page(*s.ss, s.data.extensions, o);
        for (const auto& w : L.warnings) std::cerr << "warning: " << w << "\n";
        fs::path file = fs::path(c.out) / (base + suffix + ".svg");
        std::ofstream(file) << emit_svg(L);
        std::cout << file.string() << ": " << L.glyphs.size() << " glyphs, " << L.lines.size() << " lines\n";
    }
    return 0;
}

int cmd_pi(const Config& c, int stem, std::optional<int> weight) {
    Session s = open(c);
    if (stem < s.stems.lo || stem > s.stems.hi) throw UsageError("stem outside the computed range");
    HomotopyGroup h = weight ? assemble_homotopy_group(*s.cf, s.data.extensions, stem, *weight)
                             : assemble_classical(*s.cf, s.data.extensions, stem);
    if (weight)
        std::cout << "pi_{" << stem << "," << *weight << "} mmf = " << h.group.str() << "\n";
    else
        std::cout << "pi_" << stem << " tmf = " << h.group.str() << "\n";
    for (const auto& p : h.pieces) std::cout << "  " << p << "\n";
    return 0;
}

int cmd_hidden(const Config& c, const std::string& kind) {
    if (kind != "2" && kind != "eta" && kind != "nu") throw UsageError("--kind takes 2, eta or nu");
    Session s = open(c);
    auto rep = s.cf->deduce_hidden_extensions(kind, s.stems.lo, s.stems.hi);
    for (const auto& h : rep.extensions)
        std::cout << kind << " * " << s.cf->str(h.source) << " = " << s.cf->str(h.target) << "  (d" << h.r1 << ", d"
                  << h.r2 << ", g^" << h.g_power << ")\n";
    for (const auto& x : rep.diagnostics) std::cerr << "diagnostic: " << x << "\n";
    std::vector<ExtensionRecord> rows;
    for (const auto& r : s.data.extensions) {
        int stem = degree_of_word(r.source).s;
        if (r.kind == kind && stem >= s.stems.lo && stem <= s.stems.hi) rows.push_back(r);
    }
    int bad = 0;
    for (const auto& rc : s.cf->verify_extension_tables(rows, rep.extensions)) {
        bool method = rc.row->table == "hidtaumethod";
        bool ok = !rc.contradicted && (!method || rc.reproduced);
        bad += !ok;
        std::cout << (ok ? "ok    " : "FAIL  ") << rc.row->table << " " << rc.row->source.pretty() << " -> "
                  << rc.row->target.pretty() << "  " << (rc.reproduced ? "deduced" : "not deduced")
                  << (rc.contradicted ? ", contradicted: " + rc.detail : "") << "\n";
    }
    std::cout << rep.extensions.size() << " extensions deduced; " << bad << " table rows failed\n";
    return bad ? 1 : 0;
}

int cmd_nu(const Config& c, bool table) {
    // nu_k is read off Delta^(k+1), folded into M = Delta^8 powers
    if (parse_range(c.stems).hi < 191) throw UsageError("nu needs stems through 191");
    Session s = open(c);
    const Cofiber& cf = *s.cf;
    for (int k = 0; k <= 15; ++k) {
        NuElement n = nu_detect(cf, k);
        std::cout << "nu" << k << ": " << str(cf, n.detecting) << "\n";
    }
    int bad = 0;
    if (table) {
        std::cout << "\nnu_j nu_k, 0 <= j,k <= 7\n";
        for (int j = 0; j <= 7; ++j)
            for (int k = 0; k <= 7; ++k) {
                auto p = nu_product(cf, s.data.extensions, j, k);
                std::cout << "nu" << j << " nu" << k << " = " << str(cf, p.lhs) << (p.law ? "" : "  (law fails)")
                          << "\n";
                bad += !p.law;
            }
    }
    std::cout << "\n";
    for (const auto& id : nu_identities(cf, s.data.extensions)) {
        std::cout << (id.holds ? "ok    " : "FAIL  ") << id.name << ": " << id.detail << "\n";
        bad += !id.holds;
    }
    return bad ? 1 : 0;
}

int cmd_regress(const Config& c) {
    Range r = checked_stems(c);
    Dataset d = load_dataset_dir(data_dir(c));
    RegressOptions o;
    o.window = c.window;
    o.smax = r.hi;
    auto rep = regress(d, o);
    std::cout << rep.matrix();
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motivic Adams-Novikov spectral sequence for mmf"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.set_config("--config", "", "Config file with the same keys as the flags");
    app.add_option("--data", cfg.data, "Dataset directory (else SSEQ_DATA_DIR, else the shipped data)");
    app.add_option("--stems", cfg.stems, "Stem range a..b");
    app.add_option("--window", cfg.window, "tau window depth");
    app.add_option("--out", cfg.out, "Output directory for charts");

    std::string vpath;
    auto* validate = app.add_subcommand("validate", "Check a dataset directory");
    validate->add_option("data", vpath, "Dataset directory");

    int to = 23;
    auto* pages = app.add_subcommand("pages", "List the differentials page by page");
    pages->add_option("--to", to, "Last page");

    auto* einf = app.add_subcommand("einf", "Print E_infinity and compare with the expected dataset");

    std::string page = "einf", region;
    bool split = false, no_hidden = false;
    auto* chart = app.add_subcommand("chart", "Render a page as SVG");
    chart->add_option("--page", page, "r or einf");
    chart->add_flag("--split-v1", split, "Separate charts for the v1-periodic classes");
    chart->add_option("--region", region, "Stem range a..b");
    chart->add_flag("--no-hidden", no_hidden, "Omit hidden extensions");

    int stem = 0;
    std::optional<int> weight;
    auto* pi = app.add_subcommand("pi", "Assemble a homotopy group");
    pi->add_option("--stem", stem, "Stem")->required();
    pi->add_option("--weight", weight, "Motivic weight (omit for the classical group)");

    bool deduce = false;
    std::string kind = "2";
    auto* hidden = app.add_subcommand("hidden", "Hidden extensions through the cofiber of tau");
    hidden->add_flag("--deduce", deduce, "Run the deduction");
    hidden->add_option("--kind", kind, "2, eta or nu");

    bool table = false;
    auto* nu = app.add_subcommand("nu", "The nu_k family and its products");
    nu->add_flag("--table", table, "Print the 8x8 product table");

    auto* reg = app.add_subcommand("regress", "Run every check against the shipped tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(cfg, vpath);
        if (pages->parsed()) return cmd_pages(cfg, to);
        if (einf->parsed()) return cmd_einf(cfg);
        if (chart->parsed()) return cmd_chart(cfg, page, split, region, no_hidden);
        if (pi->parsed()) return cmd_pi(cfg, stem, weight);
        if (hidden->parsed()) {
            if (!deduce) throw UsageError("hidden needs --deduce");
            return cmd_hidden(cfg, kind);
        }
        if (nu->parsed()) return cmd_nu(cfg, table);
        if (reg->parsed()) return cmd_regress(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
