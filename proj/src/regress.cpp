#include "mmfss/regress.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "mmfss/chart.hpp"
#include "mmfss/cofiber.hpp"
#include "mmfss/homotopy.hpp"

namespace mmfss {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::set<std::string> lines_of(const std::vector<EinfRecord>& recs, int smax) {
    std::set<std::string> out;
    for (const auto& r : recs)
        if (r.s <= smax) out.insert(r.line());
    return out;
}

// Seed rows against the computed layers.
void differential_checks(const SpectralSequence& ss, const Dataset& d, std::vector<Check>& out) {
    const E2Ring& ring = ss.ring();
    auto decomposable = ss.decomposable_seeds();
    for (std::size_t i = 0; i < d.seeds.size(); ++i) {
        const auto& row = d.seeds[i];
        Check c{"differentials", "d" + std::to_string(row.r) + "(" + row.source.pretty() + ") = " + row.target.pretty(),
                row.citation, false, {}};
        bool found = false;
        auto it = ss.layers().find(row.r);
        if (it != ss.layers().end())
            for (const auto& [key, e] : it->second.entries)
                for (const auto& l : e.labels) {
                    if (l.source != DiffSource::Seed || l.seed != static_cast<int>(i)) continue;
                    found = true;
                    Element t = ring.evaluate(row.target);
                    Element diff = l.value;
                    for (std::size_t j = 0; j < diff.c.size(); ++j) diff.c[j] -= t.c[j];
                    bool same = ring.equal_in_e2(l.value, t) ||
                                (e.target_boundaries && e.target_boundaries->contains(integral_multiple(diff.c)));
                    c.pass = same;
                    c.detail = same ? "reproduced" : "layer value " + ring.str(l.value, row.target.tau);
                }
        if (!found) c.detail = "seed never used";
        if (std::find(decomposable.begin(), decomposable.end(), static_cast<int>(i)) != decomposable.end()) {
            c.pass = false;
            c.detail = "source is decomposable";
        }
        out.push_back(c);
    }
    Check dd{"differentials", "d_r o d_r = 0 at every composable degree", "engine",
             ss.dd_checks() > 0, std::to_string(ss.dd_checks()) + " compositions checked"};
    out.push_back(dd);
}

void einf_checks(const SpectralSequence& ss, const Dataset& d, int smax, std::vector<Check>& out) {
    auto got = ss.classes(ss.einf(), smax, ss.ring().reliable_fmax());
    auto a = lines_of(got, smax);
    auto b = lines_of(d.expected_einf, smax);
    std::size_t extra = 0, missing = 0;
    std::string first;
    for (const auto& x : a)
        if (!b.count(x) && extra++ == 0) first = "extra " + x;
    for (const auto& x : b)
        if (!a.count(x) && missing++ == 0 && first.empty()) first = "missing " + x;
    out.push_back({"einf", "E_infinity equals the expected dataset", "mmf-expected-einf.ssdf",
                   extra == 0 && missing == 0,
                   std::to_string(a.size()) + " classes; " + std::to_string(extra) + " extra, " +
                       std::to_string(missing) + " missing" + (first.empty() ? "" : "; " + first)});

    // (120,24): the g^6 summand is Z[tau]/(8, 4tau^2, 2tau^6, tau^11)
    {
        const Page& p = ss.einf();
        const E2Ring& ring = ss.ring();
        std::string detail;
        bool ok = true;
        const std::vector<std::pair<long, std::optional<int>>> want{{1, 11}, {2, 6}, {4, 2}, {8, 0}};
        for (const auto& [c, t] : want) {
            GeneratorWord w = GeneratorWord::parse("1*g^6");
            w.coeff = c;
            auto got_t = p.tau_order(ring.evaluate(w), 0);
            ok = ok && got_t == t;
            detail += (detail.empty() ? "" : ", ") + w.pretty() + ": tau^" + (got_t ? std::to_string(*got_t) : "inf");
        }
        int levels = 0;
        for (const auto& r : got)
            if (r.s == 120 && r.f == 24 && r.label.e == GeneratorWord::parse("1*g^6").e) ++levels;
        ok = ok && levels == 3;
        out.push_back({"einf", "(120,24) g^6 summand is Z[tau]/(8,4tau^2,2tau^6,tau^11)", "anchor", ok, detail});
    }
    {
        bool ok = false;
        for (const auto& r : got)
            if (r.s == 24 && r.f == 0 && r.box && r.label == GeneratorWord::parse("8*Delta^1")) ok = true;
        out.push_back({"einf", "(24,0) survivor is 8Delta", "anchor", ok, ok ? "box 8Delta" : "no 8Delta box"});
    }
    {
        auto e4 = lines_of(ss.classes(ss.page_at(5), 22, ss.ring().reliable_fmax()), 22);
        auto ei = lines_of(ss.classes(ss.einf(), 22, ss.ring().reliable_fmax()), 22);
        out.push_back({"einf", "E_4 = E_infinity through stem 22", "anchor", e4 == ei,
                       std::to_string(e4.size()) + " classes"});
    }
}

void hidden_checks(const Cofiber& cf, const SpectralSequence& t2, const Dataset& d, int smax,
                   std::vector<Check>& out) {
    std::vector<HiddenExtension> all;
    std::size_t diags = 0;
    for (const char* k : {"2", "eta", "nu"}) {
        auto rep = cf.deduce_hidden_extensions(k, 0, smax);
        diags += rep.diagnostics.size();
        all.insert(all.end(), rep.extensions.begin(), rep.extensions.end());
    }
    auto checks = cf.verify_extension_tables(d.extensions, all);
    for (const auto& rc : checks) {
        const auto& row = *rc.row;
        bool method = row.table == "hidtaumethod";
        Check c{"hidden", row.table + " " + row.kind + " * " + row.source.pretty() + " = " + row.target.pretty(),
                row.citation, false, {}};
        c.pass = !rc.contradicted && (!method || rc.reproduced);
        c.detail = std::string(rc.reproduced ? "deduced" : method ? "NOT deduced" : "consistent") +
                   (rc.detail.empty() ? "" : "; " + rc.detail);
        out.push_back(c);
    }
    out.push_back({"hidden", "deduction diagnostics", "engine", true, std::to_string(all.size()) +
                   " extensions, " + std::to_string(diags) + " ambiguous"});

    auto sr = tau_squared_script(cf, t2, d.extensions);
    std::string steps;
    for (const auto& s : sr.steps) steps += (steps.empty() ? "" : " | ") + s;
    out.push_back({"hidden", "2 * Delta^4d = tau^6Delta^2h1^2g^3 modulo tau^2", "mod tau^2 sequence", sr.ok, steps});
    bool covered = false;
    if (sr.ok)
        for (const auto& r : d.extensions)
            if (r.table == "hidh0" && r.kind == "2") {
                try {
                    if (cf.same_up_to_unit(cf.detect(r.source), sr.source) &&
                        cf.same_up_to_unit(cf.detect(r.target), sr.target))
                        covered = true;
                } catch (const DegreeOutOfRange&) {
                }
            }
    out.push_back({"hidden", "derived 110-stem extension has its hidh0 row", "(110,2,56)", covered,
                   covered ? "row present" : "missing hidh0 row"});
}

void nu_checks(const Cofiber& cf, const Dataset& d, std::vector<Check>& out) {
    int laws = 0, law_fail = 0, anti_fail = 0;
    std::string first;
    for (int j = 0; j <= 15; ++j)
        for (int k = 0; k <= 15; ++k) {
            auto p = nu_product(cf, d.extensions, j, k);
            auto q = nu_product(cf, d.extensions, k, j);
            ++laws;
            if (!p.law) {
                ++law_fail;
                if (first.empty()) first = "nu" + std::to_string(j) + "nu" + std::to_string(k);
            }
            bool anti = (p.lhs.cls.zero && q.lhs.cls.zero) ||
                        (!p.lhs.cls.zero && !q.lhs.cls.zero && p.lhs.m == q.lhs.m &&
                         cf.add(p.lhs.cls, q.lhs.cls).zero);
            if (!anti) ++anti_fail;
        }
    out.push_back({"nu", "nu_j nu_k = (k+1) nu_{j+k} nu for 0 <= j,k <= 15", "nu products", law_fail == 0,
                   std::to_string(laws - law_fail) + "/" + std::to_string(laws) + (first.empty() ? "" : "; first " + first)});
    out.push_back({"nu", "nu_j nu_k + nu_k nu_j = 0 for 0 <= j,k <= 15", "nu products", anti_fail == 0,
                   std::to_string(anti_fail) + " failures"});
    for (const auto& id : nu_identities(cf, d.extensions)) out.push_back({"nu", id.name, "nu identities", id.holds, id.detail});
}

void chart_checks(const SpectralSequence& ss, const Dataset& d, int smax, std::vector<Check>& out) {
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 20}, {0, smax}}) {
        ChartOptions o;
        o.smin = a;
        o.smax = b;
        std::string svg = emit_svg(layout_page(ss, d.extensions, o));
        auto got = count_svg(svg);
        auto want = count_records(d.expected_einf, a, b, o.fmax);
        std::ostringstream det;
        for (const auto& [k, v] : want.glyphs) det << k << "=" << v << " ";
        for (const auto& [r, v] : want.differentials) det << "d" << r << "=" << v << " ";
        out.push_back({"chart", "E_infinity chart counts, stems " + std::to_string(a) + ".." + std::to_string(b),
                       "mmf-expected-einf.ssdf", got == want, det.str()});
        if (b == smax) {
            std::string again = emit_svg(layout_page(ss, d.extensions, o));
            out.push_back({"chart", "byte-identical SVG across runs", "renderer", again == svg,
                           std::to_string(svg.size()) + " bytes"});
        }
    }
}

}  // namespace

bool RegressReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RegressReport::matrix() const {
    std::ostringstream os;
    std::size_t pass = 0;
    for (const auto& c : checks) {
        pass += c.pass;
        os << (c.pass ? "PASS" : "FAIL") << "  " << c.group << "  " << c.name << "  [" << c.citation << "]";
        if (!c.detail.empty()) os << "  " << c.detail;
        os << "\n";
    }
    os << pass << "/" << checks.size() << " checks passed; engine " << engine_seconds << " s, total "
       << total_seconds << " s\n";
    return os.str();
}

RegressReport regress(const Dataset& d, const RegressOptions& opt) {
    RegressReport rep;
    auto t0 = Clock::now();
    E2Ring ring(d);
    EngineOptions eo;
    eo.window = opt.window;
    eo.smax = opt.smax;
    SpectralSequence ss(ring, d.seeds, eo);
    ss.run();
    rep.engine_seconds = since(t0);

    differential_checks(ss, d, rep.checks);
    rep.checks.push_back({"differentials", "engine runtime under 60 s", "stems 0.." + std::to_string(opt.smax),
                          rep.engine_seconds < 60, std::to_string(rep.engine_seconds) + " s"});
    einf_checks(ss, d, opt.smax, rep.checks);

    Cofiber cf(ss);
    EngineOptions to = eo;
    to.truncate = 2;
    SpectralSequence t2(ring, d.seeds, to);
    t2.run();
    hidden_checks(cf, t2, d, opt.smax, rep.checks);
    nu_checks(cf, d, rep.checks);
    chart_checks(ss, d, opt.smax, rep.checks);
    rep.total_seconds = since(t0);
    return rep;
}

}  // namespace mmfss
