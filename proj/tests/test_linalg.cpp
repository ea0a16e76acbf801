#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mmfss/linalg.hpp"
#include "oracles.hpp"

using namespace mmfss;

namespace {

IntMatrix to_matrix(const oracle::Mat& a, std::size_t rows, std::size_t cols) {
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = LocalInt(a[i][j]);
    return m;
}

std::string cokernel(const oracle::Mat& a, std::size_t rows, std::size_t cols) {
    return subquotient(rows, IntMatrix::identity(rows), to_matrix(a, rows, cols)).group().str();
}

oracle::Mat random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, long lo, long hi) {
    std::uniform_int_distribution<long> u(lo, hi);
    oracle::Mat a(rows, std::vector<long>(cols));
    for (auto& row : a)
        for (auto& x : row) x = u(rng);
    return a;
}

// Snf invariants: left * a * right = diagonal with a divisibility chain of
// powers of two, and both transforms invertible over Z_(2).
void check_snf(const oracle::Mat& a, std::size_t rows, std::size_t cols) {
    IntMatrix m = to_matrix(a, rows, cols);
    SmithForm sf = smith_normal_form(m);
    REQUIRE(sf.left * m * sf.right == sf.diagonal);
    REQUIRE(sf.diagonal.is_diagonal());
    int prev = -1;
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) {
        const LocalInt& d = sf.diagonal(i, i);
        if (d.is_zero()) {
            prev = INT_MAX;
            continue;
        }
        REQUIRE(prev != INT_MAX);
        REQUIRE(d == two_pow(static_cast<unsigned>(d.valuation())));
        REQUIRE(d.valuation() >= prev);
        prev = d.valuation();
    }
    for (const IntMatrix* u : {&sf.left, &sf.right}) {
        SmithForm inner = smith_normal_form(*u);
        REQUIRE(inner.rank == u->rows());
        for (std::size_t i = 0; i < u->rows(); ++i) REQUIRE(inner.diagonal(i, i).is_unit());
    }
}

}  // namespace

TEST_CASE("LocalInt arithmetic in Z_(2)") {
    LocalInt a(12), b(3);
    CHECK(a.valuation() == 2);
    CHECK(b.is_unit());
    CHECK(divide(a, b) == LocalInt(4));
    CHECK(divide(LocalInt(1), b).value() == mpq_class(1, 3));
    CHECK_THROWS_AS(divide(LocalInt(1), LocalInt(2)), std::domain_error);
    CHECK(LocalInt(mpq_class(4, 3)).same_unit_class(LocalInt(-20)));
    CHECK(LocalInt(mpq_class(1, 3)).residue(3) == 3);  // 3 * 3 = 9 = 1 mod 8
    CHECK(LocalInt(0).valuation() == INT_MAX);
}

TEST_CASE("LocalGroup formatting and orders") {
    CHECK(LocalGroup::cyclic(3).str() == "Z/8");
    CHECK(LocalGroup::cyclic(0).is_trivial());
    LocalGroup g = LocalGroup::free(1).direct_sum(LocalGroup::cyclic(1));
    CHECK(g.str() == "Z+Z/2");
    CHECK(g.log2_order() == -1);
    CHECK(localize_divisors({12, 5, 0}).str() == "Z+Z/4");
}

TEST_CASE("snf against determinantal divisors: every 2x2 matrix over -8..8") {
    // Frozen histogram of 2-local cokernels, produced by the minors oracle.
    const std::map<std::string, long> frozen{
        {"0", 28800},       {"Z", 1824},        {"Z+Z", 1},         {"Z+Z/2", 416},     {"Z+Z/4", 96},
        {"Z+Z/8", 32},      {"Z/16", 2848},     {"Z/2", 22656},     {"Z/2+Z/16", 400},  {"Z/2+Z/2", 2080},
        {"Z/2+Z/32", 160},  {"Z/2+Z/4", 1696},  {"Z/2+Z/8", 1184},  {"Z/32", 1312},     {"Z/4", 11840},
        {"Z/4+Z/16", 64},   {"Z/4+Z/4", 168},   {"Z/4+Z/8", 216},   {"Z/64", 448},      {"Z/8", 7232},
        {"Z/8+Z/16", 8},    {"Z/8+Z/8", 40}};
    std::map<std::string, long> oracle_hist, snf_hist;
    long mismatches = 0;
    for (long a = -8; a <= 8; ++a)
        for (long b = -8; b <= 8; ++b)
            for (long c = -8; c <= 8; ++c)
                for (long d = -8; d <= 8; ++d) {
                    oracle::Mat m{{a, b}, {c, d}};
                    std::string want = oracle::cokernel_by_minors(m, 2, 2).str();
                    std::string got = cokernel(m, 2, 2);
                    ++oracle_hist[want];
                    ++snf_hist[got];
                    if (want != got) ++mismatches;
                }
    CHECK(mismatches == 0);
    CHECK(oracle_hist == frozen);
    CHECK(snf_hist == frozen);
}

TEST_CASE("snf against determinantal divisors: every 1x3 and 3x1 matrix over -8..8") {
    long mismatches = 0;
    for (long a = -8; a <= 8; ++a)
        for (long b = -8; b <= 8; ++b)
            for (long c = -8; c <= 8; ++c) {
                oracle::Mat row{{a, b, c}}, col{{a}, {b}, {c}};
                if (oracle::cokernel_by_minors(row, 1, 3).str() != cokernel(row, 1, 3)) ++mismatches;
                if (oracle::cokernel_by_minors(col, 3, 1).str() != cokernel(col, 3, 1)) ++mismatches;
            }
    CHECK(mismatches == 0);
}

TEST_CASE("snf invariants on sampled matrices of rank <= 3") {
    std::mt19937 rng(20261017);
    for (int n = 0; n < 3000; ++n) {
        std::size_t rows = 1 + n % 4, cols = 1 + (n / 4) % 4;
        oracle::Mat a = random_matrix(rng, rows, cols, -8, 8);
        if (rows == 4 && cols == 4)  // force rank <= 3
            for (std::size_t i = 0; i < 4; ++i) a[i][3] = a[i][0] - 2 * a[i][1] + a[i][2];
        check_snf(a, rows, cols);
        CHECK(oracle::cokernel_by_minors(a, rows, cols).str() == cokernel(a, rows, cols));
    }
}

TEST_CASE("subquotient against subgroup enumeration") {
    std::mt19937 rng(7);
    for (int n = 0; n < 400; ++n) {
        oracle::Mat a = random_matrix(rng, 2, 3, -8, 8);
        CHECK(oracle::cokernel_by_enumeration(a, 2, 3, 9).str() == cokernel(a, 2, 3));
    }
    for (int n = 0; n < 60; ++n) {
        oracle::Mat a = random_matrix(rng, 3, 3, -2, 2);
        CHECK(oracle::cokernel_by_enumeration(a, 3, 3, 6).str() == cokernel(a, 3, 3));
    }
}

TEST_CASE("subquotient of a cycle lattice: C Z^3 / C M Z^3 = Z^3 / M Z^3") {
    std::mt19937 rng(11);
    int done = 0;
    while (done < 500) {
        oracle::Mat c = random_matrix(rng, 3, 3, -8, 8);
        if (oracle::det(c) == 0) continue;
        oracle::Mat m = random_matrix(rng, 3, 3, -8, 8);
        IntMatrix C = to_matrix(c, 3, 3), M = to_matrix(m, 3, 3);
        Subquotient sq = subquotient(3, C, C * M);
        REQUIRE(sq.group().str() == oracle::cokernel_by_minors(m, 3, 3).str());
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(sq.contains_cycle(C.column(j)));
            // boundaries are zero in the subquotient
            auto coords = sq.class_of((C * M).column(j));
            for (const auto& x : coords) CHECK(x.is_zero());
        }
        ++done;
    }
}

TEST_CASE("subquotient rejects boundaries outside the cycles") {
    IntMatrix z = IntMatrix::from_rows({{2, 0}, {0, 1}}, 2);
    IntMatrix b = IntMatrix::from_rows({{1}, {0}}, 1);
    CHECK_THROWS_AS(subquotient(2, z, b), BoundaryNotInCycles);
}

TEST_CASE("lattice containment and index") {
    Lattice l = Lattice::span(2, {to_mpz({2, 0}), to_mpz({0, 4})});
    CHECK(l.contains(to_mpz({6, -12})));
    CHECK_FALSE(l.contains(to_mpz({1, 0})));
    CHECK(l.contains(to_mpz({2, 4})));
    Lattice full = Lattice::full(2);
    CHECK(l.subset_of(full));
    CHECK(l.pivot_weight() - full.pivot_weight() == 3);
    CHECK(Lattice::span(2, {to_mpz({3, 0}), to_mpz({0, 5})}) == full);
}
