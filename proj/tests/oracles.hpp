#pragma once

// Brute-force reference computations used by the test suites.  Nothing here
// calls into the library's linear algebra.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mmfss/ssdf.hpp"

namespace oracle {

using Mat = std::vector<std::vector<long>>;  // row-major, m x n

inline long det(const Mat& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    long out = 0;
    for (std::size_t j = 0; j < n; ++j) {
        Mat minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<long> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(row);
        }
        long c = a[0][j] * det(minor);
        out += (j % 2) ? -c : c;
    }
    return out;
}

inline void choose(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
                   std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i < n; ++i) {
        cur.push_back(i);
        choose(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

inline int val2(long x) {
    int v = 0;
    while (x % 2 == 0) x /= 2, ++v;
    return v;
}

// 2-local cokernel of a (rows = ambient rank), from determinantal divisors:
// the k-th invariant factor is gcd(k-minors) / gcd((k-1)-minors).  Returned as
// the torsion exponents (sorted) and the free rank.
struct Group {
    std::vector<int> torsion;
    int free = 0;
    bool operator==(const Group&) const = default;
    std::string str() const {
        if (torsion.empty() && free == 0) return "0";
        std::string out;
        for (int i = 0; i < free; ++i) out += out.empty() ? "Z" : "+Z";
        for (int e : torsion) out += (out.empty() ? "Z/" : "+Z/") + std::to_string(1L << e);
        return out;
    }
};

inline Group cokernel_by_minors(const Mat& a, std::size_t rows, std::size_t cols) {
    std::vector<int> v{0};  // v_0 = 0
    std::size_t rank = 0;
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        std::vector<std::size_t> cur;
        choose(rows, k, 0, cur, rs);
        choose(cols, k, 0, cur, cs);
        long g = 0;
        for (const auto& r : rs)
            for (const auto& c : cs) {
                Mat m(k, std::vector<long>(k));
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) m[i][j] = a[r[i]][c[j]];
                g = std::gcd(g, std::labs(det(m)));
            }
        if (g == 0) break;
        rank = k;
        v.push_back(val2(g));
    }
    Group out;
    for (std::size_t k = 1; k <= rank; ++k)
        if (int e = v[k] - v[k - 1]; e > 0) out.torsion.push_back(e);
    std::sort(out.torsion.begin(), out.torsion.end());
    out.free = static_cast<int>(rows - rank);
    return out;
}

// log2 |A / 2^K A| for A = Z^rows / (column span of a), by enumerating the
// subgroup the columns generate in (Z/2^K)^rows.
inline int log2_quotient_mod(const Mat& a, std::size_t rows, std::size_t cols, int K) {
    const long mod = 1L << K;
    auto encode = [&](const std::vector<long>& x) {
        std::uint64_t code = 0;
        for (long c : x) code = code * static_cast<std::uint64_t>(mod) + static_cast<std::uint64_t>(c);
        return code;
    };
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < rows; ++i) total *= static_cast<std::uint64_t>(mod);
    std::vector<char> seen(total, 0);
    std::size_t count = 1;
    std::vector<std::vector<long>> frontier{std::vector<long>(rows, 0)};
    seen[0] = 1;
    while (!frontier.empty()) {
        std::vector<std::vector<long>> next;
        for (const auto& x : frontier)
            for (std::size_t j = 0; j < cols; ++j) {
                std::vector<long> y(x);
                for (std::size_t i = 0; i < rows; ++i) y[i] = ((y[i] + a[i][j]) % mod + mod) % mod;
                auto code = encode(y);
                if (!seen[code]) {
                    seen[code] = 1;
                    ++count;
                    next.push_back(y);
                }
            }
        frontier.swap(next);
    }
    int log_sub = 0;
    while ((std::size_t{1} << log_sub) < count) ++log_sub;
    return K * static_cast<int>(rows) - log_sub;
}

// Invariant factors recovered from |A / 2^K A| for K = 1..kmax: the number of
// summands with exponent >= K (free summands included) is c_K - c_{K-1}.
inline Group cokernel_by_enumeration(const Mat& a, std::size_t rows, std::size_t cols, int kmax) {
    std::vector<int> c{0};
    for (int K = 1; K <= kmax; ++K) c.push_back(log2_quotient_mod(a, rows, cols, K));
    Group out;
    std::vector<int> at_least;  // at_least[K] for K = 1..kmax
    for (int K = 1; K <= kmax; ++K) at_least.push_back(c[K] - c[K - 1]);
    out.free = at_least.back();
    for (int K = 1; K < kmax; ++K)
        for (int n = at_least[K - 1] - at_least[K]; n > 0; --n) out.torsion.push_back(K);
    return out;
}

// Classical E_infinity read directly from expected records: boxes of infinite
// tau-order are free summands and each dot of infinite tau-order has order 2.
struct StemCount {
    int free = 0;
    int log2_torsion = 0;
};

inline StemCount classical_counts(const std::vector<mmfss::EinfRecord>& recs, int stem) {
    StemCount out;
    for (const auto& r : recs) {
        if (r.s != stem || r.tau_order) continue;
        if (r.box) ++out.free;
        else ++out.log2_torsion;
    }
    return out;
}

}  // namespace oracle
