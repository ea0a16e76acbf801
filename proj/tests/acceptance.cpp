// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "mmfss/chart.hpp"
#include "mmfss/homotopy.hpp"
#include "oracles.hpp"

using namespace mmfss;

namespace {

using Clock = std::chrono::steady_clock;

struct Result {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

struct World {
    Dataset d;
    std::unique_ptr<E2Ring> ring;
    std::unique_ptr<SpectralSequence> ss;
    std::unique_ptr<Cofiber> cf;
    double seconds = 0;
};

Element minus(Element a, const Element& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] -= b.c[i];
    return a;
}

Result differentials(const World& w) {
    Result res;
    const SpectralSequence& ss = *w.ss;
    const E2Ring& R = *w.ring;
    std::set<int> reproduced;
    int seed_labels = 0;
    for (const auto& [r, layer] : ss.layers())
        for (const auto& [key, e] : layer.entries)
            for (const auto& l : e.labels) {
                if (l.source != DiffSource::Seed) continue;
                ++seed_labels;
                const auto& row = w.d.seeds.at(static_cast<std::size_t>(l.seed));
                Element t = R.evaluate(row.target);
                bool same = row.r == r && (R.equal_in_e2(l.value, t) ||
                                           e.target_boundaries->contains(integral_multiple(minus(l.value, t).c)));
                if (same) reproduced.insert(l.seed);
                else res.fail("d" + std::to_string(r) + " on " + row.source.pretty() + " gives " + R.str(l.value));
            }
    if (!ss.decomposable_seeds().empty()) res.fail("a seed source is decomposable");
    if (reproduced.size() != w.d.seeds.size() || seed_labels != static_cast<int>(w.d.seeds.size()))
        res.fail(std::to_string(reproduced.size()) + "/" + std::to_string(w.d.seeds.size()) + " seeds reproduced");
    if (ss.dd_checks() == 0) res.fail("no d o d compositions checked");
    if (w.seconds >= 60) res.fail("engine took " + std::to_string(w.seconds) + " s");
    if (res.pass) {
        std::ostringstream os;
        os << reproduced.size() << "/" << w.d.seeds.size() << " seeds, " << ss.dd_checks() << " d o d checks, "
           << static_cast<int>(w.seconds * 10) / 10.0 << " s";
        res.detail = os.str();
    }
    return res;
}

Result einf(const World& w) {
    Result res;
    const SpectralSequence& ss = *w.ss;
    const int fmax = w.ring->reliable_fmax();
    std::set<std::string> got, want;
    for (const auto& r : ss.classes(ss.einf(), 191, fmax)) got.insert(r.line());
    for (const auto& r : w.d.expected_einf)
        if (r.s <= 191 && r.f <= fmax) want.insert(r.line());
    if (got != want) res.fail("E_infinity differs from the expected dataset");

    const Page& p = ss.einf();
    // below the top weight (120,24) holds g^6 alone
    for (int k = 1; k <= 12; ++k) {
        LocalGroup g = p.group(120, 24, 72 - k);
        LocalGroup want_g = k < 2 ? LocalGroup::cyclic(3) : k < 6 ? LocalGroup::cyclic(2) : k < 11 ? LocalGroup::cyclic(1) : LocalGroup();
        if (g != want_g) res.fail("(120,24) at tau^" + std::to_string(k) + " is " + g.str());
    }
    Element g6 = w.ring->evaluate(GeneratorWord::parse("1*g^6"));
    if (p.tau_order(g6, 0) != 11) res.fail("g^6 is not tau^11-torsion");

    bool box = false;
    for (const auto& r : ss.classes(p, 24, fmax))
        if (r.s == 24 && r.f == 0 && r.box && !r.tau_order && r.label == GeneratorWord::parse("8*Delta^1")) box = true;
    if (!box) res.fail("(24,0) survivor is not 8Delta");

    std::set<std::string> e4, ei;
    for (const auto& r : ss.classes(ss.page_at(5), 22, fmax)) e4.insert(r.line());
    for (const auto& r : ss.classes(p, 22, fmax)) ei.insert(r.line());
    if (e4 != ei) res.fail("E_4 differs from E_infinity below stem 23");
    if (res.pass) res.detail = std::to_string(got.size()) + " classes equal; anchors hold";
    return res;
}

Result hidden(const World& w) {
    Result res;
    std::vector<HiddenExtension> all;
    for (const char* k : {"2", "eta", "nu"}) {
        auto rep = w.cf->deduce_hidden_extensions(k, 0, 191);
        all.insert(all.end(), rep.extensions.begin(), rep.extensions.end());
    }
    int method = 0, checked = 0;
    for (const auto& rc : w.cf->verify_extension_tables(w.d.extensions, all)) {
        ++checked;
        if (rc.contradicted) res.fail("contradicts " + rc.row->table + " " + rc.row->source.pretty());
        if (rc.row->table == "hidtaumethod") {
            ++method;
            if (!rc.reproduced) res.fail("does not reproduce " + rc.row->source.pretty() + " -> " + rc.row->target.pretty());
        }
    }
    EngineOptions to;
    to.truncate = 2;
    SpectralSequence t2(*w.ring, w.d.seeds, to);
    t2.run();
    auto script = tau_squared_script(*w.cf, t2, w.d.extensions);
    if (!script.ok) res.fail("mod tau^2 derivation failed");
    else if (!w.cf->same_up_to_unit(script.source, w.cf->detect(GeneratorWord::parse("1*d^1*Delta^4"))) ||
             !w.cf->same_up_to_unit(script.target, w.cf->detect(GeneratorWord::parse("1*tau^6*h1^2*g^3*Delta^2"))))
        res.fail("mod tau^2 derivation lands on " + w.cf->str(script.source) + " -> " + w.cf->str(script.target));
    if (res.pass)
        res.detail = std::to_string(method) + " method rows reproduced, " + std::to_string(checked) +
                     " rows consistent, 2 Delta^4d = tau^6Delta^2h1^2g^3";
    return res;
}

Result nu(const World& w) {
    Result res;
    int laws = 0;
    for (int j = 0; j <= 15; ++j)
        for (int k = 0; k <= 15; ++k) {
            auto p = nu_product(*w.cf, w.d.extensions, j, k);
            auto q = nu_product(*w.cf, w.d.extensions, k, j);
            if (!p.law) res.fail("(k+1)-law fails for nu" + std::to_string(j) + " nu" + std::to_string(k));
            bool anti = (p.lhs.cls.zero && q.lhs.cls.zero) ||
                        (!p.lhs.cls.zero && !q.lhs.cls.zero && p.lhs.m == q.lhs.m && w.cf->add(p.lhs.cls, q.lhs.cls).zero);
            if (!anti) res.fail("nu" + std::to_string(j) + " nu" + std::to_string(k) + " is not antisymmetric");
            ++laws;
        }
    for (const auto& id : nu_identities(*w.cf, w.d.extensions))
        if (!id.holds) res.fail(id.name + ": " + id.detail);
    if (res.pass) res.detail = std::to_string(laws) + " products, 5 identities";
    return res;
}

Result classical(const World& w) {
    Result res;
    const std::vector<std::pair<int, std::string>> table{{0, "Z"},     {1, "Z/2"},  {2, "Z/2"}, {3, "Z/8"},
                                                         {8, "Z+Z/2"}, {14, "Z/2"}, {20, "Z/8"}};
    std::string all;
    for (const auto& [n, want] : table) {
        std::string got = assemble_classical(*w.cf, w.d.extensions, n).group.str();
        all += (all.empty() ? "" : ", ") + std::to_string(n) + ": " + got;
        if (got != want) res.fail("pi_" + std::to_string(n) + " = " + got + ", table says " + want);
    }
    if (res.pass) res.detail = all;
    else res.detail += " (" + all + ")";
    return res;
}

Result chart(const World& w) {
    Result res;
    const auto& recs = w.d.expected_einf;
    std::vector<std::pair<int, int>> regions{{0, 20}, {0, 191}};
    for (int a = 0; a < 192; a += 32) regions.push_back({a, a + 31});
    for (auto [a, b] : regions)
        for (ChartPart part : {ChartPart::All, ChartPart::V1Periodic, ChartPart::Rest}) {
            ChartOptions o;
            o.smin = a;
            o.smax = b;
            o.part = part;
            std::string svg = emit_svg(layout_page(*w.ss, w.d.extensions, o));
            if (count_svg(svg) != count_records(recs, a, b, o.fmax, part))
                res.fail("counts differ in stems " + std::to_string(a) + ".." + std::to_string(b));
            if (part == ChartPart::All && a == 0 && b == 191 && emit_svg(layout_page(*w.ss, w.d.extensions, o)) != svg)
                res.fail("SVG differs between runs");
        }
    if (res.pass) res.detail = std::to_string(regions.size() * 3) + " region/part charts counted; byte-identical";
    return res;
}

Result properties(const World& w) {
    Result res;
    // SNF against determinantal divisors, every 2x2 matrix over -8..8
    long mism = 0;
    for (long a = -8; a <= 8; ++a)
        for (long b = -8; b <= 8; ++b)
            for (long c = -8; c <= 8; ++c)
                for (long d = -8; d <= 8; ++d) {
                    oracle::Mat m{{a, b}, {c, d}};
                    IntMatrix M = IntMatrix::from_rows({{a, b}, {c, d}}, 2);
                    if (subquotient(2, IntMatrix::identity(2), M).group().str() != oracle::cokernel_by_minors(m, 2, 2).str())
                        ++mism;
                }
    if (mism) res.fail(std::to_string(mism) + " snf mismatches");

    if (parse_ssdf(serialize_ssdf(w.d)) != w.d) res.fail("round-trip changes the dataset");

    EngineOptions o;
    o.smax = 254;
    SpectralSequence wide(*w.ring, w.d.seeds, o);
    wide.run();
    const E2Ring& R = *w.ring;
    int checked = 0;
    for (Gen gen : {G, DELTA}) {
        Exps m{};
        m[gen] = gen == DELTA ? 8 : 1;
        TriDegree dm = degree_of_exps(m);
        for (const auto& [r, layer] : wide.layers()) {
            const Page& page = wide.page_at(r);
            for (const auto& [src, e] : layer.entries) {
                SlotKey src2{src.s + dm.s, src.f + dm.f}, tgt2{e.tgt.s + dm.s, e.tgt.f + dm.f};
                if (src2.s > 254 || tgt2.f > R.reliable_fmax() || !R.in_range(tgt2)) continue;
                for (std::size_t i = 0; i < e.labels.size(); ++i) {
                    const auto& l = e.labels[i];
                    if (l.a < 0 || l.value.c.empty()) continue;
                    Element x = R.unit_vector(src, static_cast<int>(i), two_pow(static_cast<unsigned>(l.a)));
                    Element mx = R.multiply(m, x);
                    Element dmx = R.zero(tgt2);
                    if (const LayerEntry* e2 = layer.entry(src2); e2 && !R.reduced(mx).is_zero())
                        dmx = e2->apply(R, integral_multiple(mx.c));
                    ++checked;
                    if (!page.is_boundary(minus(dmx, R.multiply(m, l.value)), wide.options().window))
                        res.fail(std::string(gen == G ? "g" : "Delta^8") + "-equivariance fails for d" +
                                 std::to_string(r) + " on " + R.label(src, static_cast<int>(i)).pretty());
                }
            }
        }
    }
    if (res.pass) res.detail = "83521 snf cases, round-trip, " + std::to_string(checked) + " equivariance checks";
    return res;
}

}  // namespace

int main() {
    World w;
    try {
        w.d = load_dataset_dir(MMFSS_DATA_DIR);
        w.ring = std::make_unique<E2Ring>(w.d);
        auto t0 = Clock::now();
        w.ss = std::make_unique<SpectralSequence>(*w.ring, w.d.seeds);
        w.ss->run();
        w.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        w.cf = std::make_unique<Cofiber>(*w.ss);
    } catch (const std::exception& e) {
        std::cout << "FAIL setup: " << e.what() << "\n";
        return 1;
    }

    const std::vector<std::pair<std::string, Result (*)(const World&)>> criteria{
        {"differential reproduction", differentials},
        {"E_infinity exactness", einf},
        {"hidden extension deduction", hidden},
        {"nu calculus", nu},
        {"classical consistency", classical},
        {"structural chart counts", chart},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second(w);
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        failed += !r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << r.detail << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria pass\n";
    return failed ? 1 : 0;
}
