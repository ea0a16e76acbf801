#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "mmfss/homotopy.hpp"
#include "oracles.hpp"

using namespace mmfss;

namespace {

struct World {
    Dataset d;
    std::unique_ptr<E2Ring> ring;
    std::unique_ptr<SpectralSequence> ss;
    std::unique_ptr<Cofiber> cf;
};

const World& world() {
    static const World w = [] {
        World x;
        x.d = load_dataset_dir(MMFSS_DATA_DIR);
        x.ring = std::make_unique<E2Ring>(x.d);
        x.ss = std::make_unique<SpectralSequence>(*x.ring, x.d.seeds);
        x.ss->run();
        x.cf = std::make_unique<Cofiber>(*x.ss);
        return x;
    }();
    return w;
}

long log2_torsion(const LocalGroup& g) {
    long t = 0;
    for (unsigned e : g.torsion_exponents()) t += e;
    return t;
}

// 2-local pi_n tmf, frozen after agreeing with the record-counting oracle.
const std::map<int, std::string> kFrozen{
    {0, "Z"}, {1, "Z/2"}, {2, "Z/2"}, {3, "Z/8"}, {4, "0"}, {5, "0"}, {6, "Z/2"}, {7, "0"}, {8,
    "Z+Z/2"}, {9, "Z/2+Z/2"}, {10, "Z/2"}, {11, "0"}, {12, "Z"}, {13, "0"}, {14, "Z/2"}, {15, "Z/2"},
    {16, "Z"}, {17, "Z/2+Z/2"}, {18, "Z/2"}, {19, "0"}, {20, "Z+Z/8"}, {21, "Z/2"}, {22, "Z/2"}, {23,
    "0"}, {24, "Z+Z"}, {25, "Z/2+Z/2"}, {26, "Z/2+Z/2"}, {27, "Z/4"}, {28, "Z+Z/2"}, {29, "0"}, {30,
    "0"}, {31, "0"}, {32, "Z+Z+Z/2"}, {33, "Z/2+Z/2+Z/2"}, {34, "Z/2+Z/2+Z/2"}, {35, "Z/2"}, {36,
    "Z+Z"}, {37, "0"}, {38, "0"}, {39, "Z/2"}, {40, "Z+Z+Z/4"}, {41, "Z/2+Z/2+Z/2"}, {42,
    "Z/2+Z/2+Z/2"}, {43, "0"}, {44, "Z+Z"}, {45, "Z/2"}, {46, "Z/2"}, {47, "0"}, {48, "Z+Z+Z"}, {49,
    "Z/2+Z/2"}, {50, "Z/2+Z/2+Z/2"}, {51, "Z/8"}, {52, "Z+Z+Z/2"}, {53, "Z/2"}, {54, "Z/4"}, {55, "0"},
    {56, "Z+Z+Z"}, {57, "Z/2+Z/2+Z/2+Z/2"}, {58, "Z/2+Z/2+Z/2"}, {59, "Z/2"}, {60, "Z+Z+Z+Z/4"}, {61,
    "0"}, {62, "0"}, {63, "0"}, {64, "Z+Z+Z"}, {65, "Z/2+Z/2+Z/2+Z/2+Z/2"}, {66, "Z/2+Z/2+Z/2+Z/2"},
    {67, "0"}, {68, "Z+Z+Z+Z/2"}, {69, "0"}, {70, "Z/2"}, {71, "0"}, {72, "Z+Z+Z+Z"}, {73,
    "Z/2+Z/2+Z/2"}, {74, "Z/2+Z/2+Z/2"}, {75, "Z/2"}, {76, "Z+Z+Z"}, {77, "0"}, {78, "0"}, {79, "0"},
    {80, "Z+Z+Z+Z+Z/2"}, {81, "Z/2+Z/2+Z/2+Z/2"}, {82, "Z/2+Z/2+Z/2+Z/2"}, {83, "0"}, {84, "Z+Z+Z+Z"},
    {85, "Z/2"}, {86, "0"}, {87, "0"}, {88, "Z+Z+Z+Z"}, {89, "Z/2+Z/2+Z/2+Z/2"}, {90,
    "Z/2+Z/2+Z/2+Z/2+Z/2"}, {91, "0"}, {92, "Z+Z+Z+Z"}, {93, "0"}, {94, "0"}, {95, "0"}, {96,
    "Z+Z+Z+Z+Z"}, {97, "Z/2+Z/2+Z/2+Z/2+Z/2"}, {98, "Z/2+Z/2+Z/2+Z/2+Z/2"}, {99, "Z/8"}, {100,
    "Z+Z+Z+Z+Z/2"},
};

}  // namespace

TEST_CASE("classical groups: order and rank against E_infinity records") {
    const World& w = world();
    for (int n = 0; n <= 100; ++n) {
        auto h = assemble_classical(*w.cf, w.d.extensions, n);
        auto c = oracle::classical_counts(w.d.expected_einf, n);
        INFO("stem " << n << ": " << h.group.str());
        CHECK(static_cast<int>(h.group.free_rank()) == c.free);
        CHECK(log2_torsion(h.group) == c.log2_torsion);
    }
}

TEST_CASE("classical groups: frozen table") {
    const World& w = world();
    for (const auto& [n, want] : kFrozen) {
        INFO("stem " << n);
        CHECK(assemble_classical(*w.cf, w.d.extensions, n).group.str() == want);
    }
}

TEST_CASE("free ranks follow the ring of modular forms") {
    // rank of pi_{2k} tensor Q is the number of c4^a c6^b of weight k
    const World& w = world();
    for (int n = 0; n <= 100; n += 2) {
        int forms = 0;
        for (int a = 0; 4 * a <= n / 2; ++a)
            if ((n / 2 - 4 * a) % 6 == 0) ++forms;
        INFO("stem " << n);
        CHECK(static_cast<int>(assemble_classical(*w.cf, w.d.extensions, n).group.free_rank()) == forms);
    }
}

TEST_CASE("motivic groups") {
    const World& w = world();
    auto h = assemble_homotopy_group(*w.cf, w.d.extensions, 3, 2);
    CHECK(h.group.str() == "Z/8");
    REQUIRE(h.pieces.size() == 2);
    CHECK(h.pieces[0].find("f=1 Z/4") == 0);
    CHECK(h.pieces[1].find("f=3 Z/2") == 0);
    // h2 has weight 2, so weight 3 sees h1^3 alone
    CHECK(assemble_homotopy_group(*w.cf, w.d.extensions, 3, 3).group.str() == "Z/2");
    CHECK(assemble_homotopy_group(*w.cf, w.d.extensions, 2, 1).group.str() == "Z/2");
}

TEST_CASE("hidden 2 extension on h2") {
    const World& w = world();
    Detected two_h2 = w.cf->detect(GeneratorWord::parse("2*h2^1"));
    Detected four_h2 = times_two(*w.cf, w.d.extensions, two_h2);
    CHECK(w.cf->same_up_to_unit(four_h2, w.cf->detect(GeneratorWord::parse("1*tau^1*h1^3"))));
}

TEST_CASE("nu family") {
    const World& w = world();
    CHECK(nu_detect(*w.cf, 0).filtration == 1);
    CHECK(nu_detect(*w.cf, 3).filtration == 3);
    CHECK(nu_detect(*w.cf, 7).filtration == 0);
    CHECK(nu_detect(*w.cf, 8).detecting.m == 1);
    for (int j = 0; j <= 15; ++j)
        for (int k = 0; k <= 15; ++k) {
            auto p = nu_product(*w.cf, w.d.extensions, j, k);
            INFO("nu" << j << " nu" << k);
            CHECK(p.coeff == k + 1);
            CHECK(p.law);
        }
    for (const auto& id : nu_identities(*w.cf, w.d.extensions)) {
        INFO(id.name << ": " << id.detail);
        CHECK(id.holds);
    }
}
