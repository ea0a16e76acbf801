#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "mmfss/engine.hpp"

using namespace mmfss;

namespace {

const Dataset& data() {
    static const Dataset d = load_dataset_dir(MMFSS_DATA_DIR);
    return d;
}

const E2Ring& ring() {
    static const E2Ring r(data());
    return r;
}

// Stems 0..254 so that Delta^8 translates of stems 0..62 are computed.
const SpectralSequence& wide() {
    static const std::unique_ptr<SpectralSequence> ss = [] {
        EngineOptions o;
        o.smax = 254;
        auto p = std::make_unique<SpectralSequence>(ring(), data().seeds, o);
        p->run();
        return p;
    }();
    return *ss;
}

const SpectralSequence& standard() {
    static const std::unique_ptr<SpectralSequence> ss = [] {
        auto p = std::make_unique<SpectralSequence>(ring(), data().seeds);
        p->run();
        return p;
    }();
    return *ss;
}

Lattice::Vec as_vec(const Element& x) {
    Lattice::Vec v;
    for (const auto& c : x.c) {
        REQUIRE(c.is_integer());
        v.push_back(c.numerator());
    }
    return v;
}

Element difference(const Element& a, const Element& b) {
    Element out = a;
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] -= b.c[i];
    return out;
}

struct Tally {
    int checked = 0, failed = 0;
    std::string first;
};

// d_r(m x) = m d_r(x) for every label x of every layer, with m a permanent
// cycle of even stem; compared modulo the translated target's boundaries.
Tally equivariance(const SpectralSequence& ss, const Exps& m, int smax, int fmax) {
    const E2Ring& R = ss.ring();
    const TriDegree dm = degree_of_exps(m);
    Tally t;
    for (const auto& [r, layer] : ss.layers()) {
        const Page& page = ss.page_at(r);
        for (const auto& [src, entry] : layer.entries) {
            SlotKey src2{src.s + dm.s, src.f + dm.f}, tgt2{entry.tgt.s + dm.s, entry.tgt.f + dm.f};
            if (src2.s > smax || tgt2.f > fmax || !R.in_range(src2) || !R.in_range(tgt2)) continue;
            for (std::size_t i = 0; i < entry.labels.size(); ++i) {
                const LabelDiff& l = entry.labels[i];
                if (l.a < 0 || l.value.c.empty()) continue;
                Element x = R.unit_vector(src, static_cast<int>(i), two_pow(static_cast<unsigned>(l.a)));
                Element mx = R.multiply(m, x);
                Element mdx = R.multiply(m, l.value);
                Element dmx = R.zero(tgt2);
                if (const LayerEntry* e2 = layer.entry(src2); e2 && !R.reduced(mx).is_zero())
                    dmx = e2->apply(R, as_vec(mx));
                ++t.checked;
                Element diff = difference(dmx, mdx);
                if (!page.is_boundary(diff, ss.options().window)) {
                    if (t.failed++ == 0)
                        t.first = "d" + std::to_string(r) + " on " + R.label(src, static_cast<int>(i)).pretty();
                }
            }
        }
    }
    return t;
}

}  // namespace

TEST_CASE("E2 groups") {
    const Page& e2 = standard().pages().front();
    CHECK(e2.group(3, 1, 2) == LocalGroup::cyclic(2));
    // Delta and P^3
    CHECK(e2.group(24, 0, 12) == LocalGroup::free(2));
    CHECK(e2.group(2, 0, 1).is_trivial());
    CHECK(e2.group(20, 4, 12) == LocalGroup::cyclic(1).direct_sum(LocalGroup::cyclic(3)));
    // tau acts freely on E2: every weight below the top carries the same group
    CHECK(e2.group(3, 1, -5) == LocalGroup::cyclic(2));
}

TEST_CASE("ring actions") {
    const E2Ring& R = ring();
    Element h1 = R.evaluate(GeneratorWord::parse("1*h1^1"));
    Element c = R.evaluate(GeneratorWord::parse("1*c^1"));
    CHECK(R.equal_in_e2(R.multiply(h1, c), R.evaluate(GeneratorWord::parse("1*h2^3"))));
    CHECK(R.evaluate(GeneratorWord::parse("4*h2^1")).is_zero() == false);
    CHECK(R.reduced(R.evaluate(GeneratorWord::parse("4*h2^1"))).is_zero());
    CHECK(R.equal_in_e2(R.evaluate(GeneratorWord::parse("1*h2^2*d^1")), R.evaluate(GeneratorWord::parse("4*g^1"))));
    CHECK(koszul_sign(3, 5) == -1);
    CHECK(koszul_sign(3, 8) == 1);
}

TEST_CASE("differentials") {
    const SpectralSequence& ss = standard();
    const E2Ring& R = ss.ring();
    CHECK(ss.decomposable_seeds().empty());
    CHECK(ss.unused_seeds().empty());
    CHECK(ss.dd_checks() > 0);

    auto d5 = ss.first_differential(R.evaluate(GeneratorWord::parse("1*Delta^1")));
    REQUIRE(d5);
    CHECK(d5->r == 5);
    CHECK(R.equal_in_e2(d5->y, R.evaluate(GeneratorWord::parse("1*h2^1*g^1"))));

    auto d7 = ss.first_differential(R.evaluate(GeneratorWord::parse("4*Delta^1")));
    REQUIRE(d7);
    CHECK(d7->r == 7);
    CHECK(R.equal_in_e2(d7->y, R.evaluate(GeneratorWord::parse("1*h1^3*g^1"))));

    // Leibniz: d3(h1v1sq * h1) = tau h1^5
    auto d3 = ss.first_differential(R.evaluate(GeneratorWord::parse("1*h1^1*h1v1sq^1")));
    REQUIRE(d3);
    CHECK(d3->r == 3);
    CHECK(R.equal_in_e2(d3->y, R.evaluate(GeneratorWord::parse("1*h1^5"))));

    CHECK_FALSE(ss.first_differential(R.evaluate(GeneratorWord::parse("8*Delta^1"))));
    CHECK_FALSE(ss.first_differential(R.evaluate(GeneratorWord::parse("1*g^1"))));
}

TEST_CASE("E_infinity against the expected dataset") {
    const SpectralSequence& ss = standard();
    auto got = ss.classes(ss.einf(), 191, 53);
    std::vector<EinfRecord> want;
    for (const auto& r : data().expected_einf)
        if (r.s <= 191 && r.f <= 53) want.push_back(r);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got.size() == want.size());
    CHECK(got == want);

    const Page& p = ss.einf();
    Element g6 = ss.ring().evaluate(GeneratorWord::parse("1*g^6"));
    CHECK(p.tau_order(g6, 0) == 11);
    // below the top weight only the g^6 staircase Z[tau]/(8, 4tau^2, 2tau^6, tau^11) is left
    for (int k = 1; k <= 12; ++k) {
        LocalGroup want = k < 2 ? LocalGroup::cyclic(3) : k < 6 ? LocalGroup::cyclic(2) : k < 11 ? LocalGroup::cyclic(1) : LocalGroup();
        CHECK(p.group(120, 24, 72 - k) == want);
    }
}

TEST_CASE("window violations are reported") {
    EngineOptions o;
    o.window = 8;
    o.smax = 130;  // reaches d23(h1 Delta^5) = tau^11 g^6
    SpectralSequence ss(ring(), data().seeds, o);
    CHECK_THROWS_AS(ss.run(), WindowViolation);
}

TEST_CASE("g-equivariance of every layer") {
    Exps g{};
    g[G] = 1;
    Tally t = equivariance(wide(), g, 254, 53);
    INFO(t.first);
    MESSAGE(t.checked << " labels checked");
    CHECK(t.checked > 1000);
    CHECK(t.failed == 0);
}

TEST_CASE("Delta^8-equivariance of every layer") {
    Exps d8{};
    d8[DELTA] = 8;
    Tally t = equivariance(wide(), d8, 254, 53);
    INFO(t.first);
    MESSAGE(t.checked << " labels checked");
    CHECK(t.checked > 100);
    CHECK(t.failed == 0);
}
