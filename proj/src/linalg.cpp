#include "mmfss/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace mmfss {

int valuation(const mpz_class& z) {
    if (sgn(z) == 0) return INT_MAX;
    return static_cast<int>(mpz_scan1(z.get_mpz_t(), 0));
}

LocalInt::LocalInt(const mpq_class& q) : q_(q) {
    q_.canonicalize();
    if (mpz_even_p(q_.get_den().get_mpz_t()))
        throw std::domain_error("not a 2-local integer: " + q_.get_str());
}

int LocalInt::valuation() const { return mmfss::valuation(q_.get_num()); }

bool LocalInt::same_unit_class(const LocalInt& o) const {
    if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
    return valuation() == o.valuation();
}

LocalInt LocalInt::odd_part() const {
    if (is_zero()) return LocalInt();
    mpq_class q = q_;
    mpz_class num = q.get_num();
    mpz_tdiv_q_2exp(num.get_mpz_t(), num.get_mpz_t(), valuation());
    return LocalInt(mpq_class(num, q.get_den()));
}

mpz_class LocalInt::residue(unsigned k) const {
    mpz_class m = mpz_class(1) << k;
    mpz_class inv;
    mpz_class den = q_.get_den();
    if (k == 0) return 0;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    mpz_class r = q_.get_num() * inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    return r;
}

LocalInt& LocalInt::operator+=(const LocalInt& o) {
    q_ += o.q_;
    return *this;
}
LocalInt& LocalInt::operator-=(const LocalInt& o) {
    q_ -= o.q_;
    return *this;
}
LocalInt& LocalInt::operator*=(const LocalInt& o) {
    q_ *= o.q_;
    return *this;
}

LocalInt divide(const LocalInt& a, const LocalInt& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    if (a.is_zero()) return LocalInt();
    if (a.valuation() < b.valuation()) throw std::domain_error("not divisible in Z_(2)");
    return LocalInt(mpq_class(a.value() / b.value()));
}

LocalInt two_pow(unsigned k) { return LocalInt(mpz_class(mpz_class(1) << k)); }

// ------------------------------------------------------------------ IntMatrix

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i].at(j);
    return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<std::vector<LocalInt>>& cols, std::size_t rows) {
    IntMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j].at(i);
    return m;
}

std::vector<LocalInt> IntMatrix::column(std::size_t j) const {
    std::vector<LocalInt> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
    IntMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const LocalInt& a = (*this)(i, k);
            if (a.is_zero()) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                if (!o(k, j).is_zero()) r(i, j) += a * o(k, j);
        }
    return r;
}

std::vector<LocalInt> IntMatrix::operator*(const std::vector<LocalInt>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("vector shape mismatch");
    std::vector<LocalInt> r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (!v[j].is_zero() && !(*this)(i, j).is_zero()) r[i] += (*this)(i, j) * v[j];
    return r;
}

bool IntMatrix::is_diagonal() const {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i != j && !(*this)(i, j).is_zero()) return false;
    return true;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
}

void IntMatrix::add_row(std::size_t i, std::size_t j, const LocalInt& c) {
    if (c.is_zero()) return;
    for (std::size_t k = 0; k < cols_; ++k)
        if (!(*this)(j, k).is_zero()) (*this)(i, k) += c * (*this)(j, k);
}

void IntMatrix::add_col(std::size_t i, std::size_t j, const LocalInt& c) {
    if (c.is_zero()) return;
    for (std::size_t k = 0; k < rows_; ++k)
        if (!(*this)(k, j).is_zero()) (*this)(k, i) += c * (*this)(k, j);
}

void IntMatrix::scale_row(std::size_t i, const LocalInt& c) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) *= c;
}

// ----------------------------------------------------------------- LocalGroup

LocalGroup localize_divisors(const std::vector<mpz_class>& divisors) {
    std::vector<unsigned> exps;
    std::size_t free = 0;
    for (const auto& d : divisors) {
        if (sgn(d) == 0) {
            ++free;
            continue;
        }
        int v = valuation(d);
        if (v > 0) exps.push_back(static_cast<unsigned>(v));
    }
    std::sort(exps.begin(), exps.end());
    LocalGroup g;
    for (unsigned k : exps) g.divisors_.push_back(mpz_class(1) << k);
    for (std::size_t i = 0; i < free; ++i) g.divisors_.push_back(0);
    return g;
}

LocalGroup LocalGroup::cyclic(unsigned k) { return localize_divisors({mpz_class(1) << k}); }

LocalGroup LocalGroup::free(std::size_t rank) {
    return localize_divisors(std::vector<mpz_class>(rank, mpz_class(0)));
}

std::vector<unsigned> LocalGroup::torsion_exponents() const {
    std::vector<unsigned> out;
    for (const auto& d : divisors_)
        if (sgn(d) != 0) out.push_back(static_cast<unsigned>(valuation(d)));
    return out;
}

std::size_t LocalGroup::free_rank() const {
    return static_cast<std::size_t>(std::count(divisors_.begin(), divisors_.end(), mpz_class(0)));
}

long LocalGroup::log2_order() const {
    if (!is_finite()) return -1;
    long s = 0;
    for (unsigned k : torsion_exponents()) s += k;
    return s;
}

LocalGroup LocalGroup::direct_sum(const LocalGroup& o) const {
    std::vector<mpz_class> all = divisors_;
    all.insert(all.end(), o.divisors_.begin(), o.divisors_.end());
    return localize_divisors(all);
}

std::string LocalGroup::str() const {
    if (divisors_.empty()) return "0";
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += "+";
        out += s;
    };
    for (std::size_t i = 0; i < free_rank(); ++i) add("Z");
    for (unsigned k : torsion_exponents()) add("Z/" + mpz_class(mpz_class(1) << k).get_str());
    return out;
}

// ----------------------------------------------------------------------- SNF

SmithForm smith_normal_form(const IntMatrix& m) {
    const std::size_t R = m.rows(), C = m.cols();
    SmithForm sf{IntMatrix::identity(R), m, IntMatrix::identity(C), 0};
    IntMatrix& a = sf.diagonal;
    for (std::size_t t = 0; t < std::min(R, C); ++t) {
        // pivot of minimal valuation in the trailing block
        int best = INT_MAX;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < R; ++i)
            for (std::size_t j = t; j < C; ++j) {
                int v = a(i, j).valuation();
                if (v < best) best = v, bi = i, bj = j;
            }
        if (best == INT_MAX) break;
        a.swap_rows(t, bi);
        sf.left.swap_rows(t, bi);
        a.swap_cols(t, bj);
        sf.right.swap_cols(t, bj);
        // make the pivot exactly 2^best
        LocalInt unit_inv = divide(two_pow(static_cast<unsigned>(best)), a(t, t));
        a.scale_row(t, unit_inv);
        sf.left.scale_row(t, unit_inv);
        const LocalInt p = a(t, t);
        for (std::size_t i = t + 1; i < R; ++i) {
            if (a(i, t).is_zero()) continue;
            LocalInt c = -divide(a(i, t), p);
            a.add_row(i, t, c);
            sf.left.add_row(i, t, c);
        }
        for (std::size_t j = t + 1; j < C; ++j) {
            if (a(t, j).is_zero()) continue;
            LocalInt c = -divide(a(t, j), p);
            a.add_col(j, t, c);
            sf.right.add_col(j, t, c);
        }
        sf.rank = t + 1;
    }
    return sf;
}

// ---------------------------------------------------------------- subquotient

std::vector<LocalInt> Subquotient::cycle_coords(const std::vector<LocalInt>& v, bool* ok) const {
    *ok = true;
    std::vector<LocalInt> w = left1_ * v;
    std::vector<LocalInt> x(rank1_);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i < rank1_) {
            if (!w[i].is_zero() && w[i].valuation() < diag1_[i].valuation()) {
                *ok = false;
                return {};
            }
            x[i] = divide(w[i], diag1_[i]);
        } else if (!w[i].is_zero()) {
            *ok = false;
            return {};
        }
    }
    return x;
}

bool Subquotient::contains_cycle(const std::vector<LocalInt>& v) const {
    bool ok = false;
    cycle_coords(v, &ok);
    return ok;
}

std::vector<LocalInt> Subquotient::class_of(const std::vector<LocalInt>& v) const {
    if (v.size() != ambient_) throw std::invalid_argument("class_of: wrong ambient rank");
    bool ok = false;
    std::vector<LocalInt> x = cycle_coords(v, &ok);
    if (!ok) throw BoundaryNotInCycles("class_of: vector is not a cycle");
    std::vector<LocalInt> y = left2_ * x;
    std::vector<LocalInt> out;
    for (std::size_t i = 0; i < rank1_; ++i) {
        if (i < rank2_) {
            int k = diag2_[i].valuation();
            if (k == 0) continue;
            out.emplace_back(y[i].residue(static_cast<unsigned>(k)));
        } else {
            out.push_back(y[i]);
        }
    }
    return out;
}

Subquotient subquotient(std::size_t ambient_rank, const IntMatrix& cycles, const IntMatrix& boundaries) {
    if (cycles.rows() != ambient_rank || boundaries.rows() != ambient_rank)
        throw std::invalid_argument("subquotient: ambient rank mismatch");
    Subquotient q;
    q.ambient_ = ambient_rank;
    SmithForm s1 = smith_normal_form(cycles);
    q.left1_ = s1.left;
    q.rank1_ = s1.rank;
    for (std::size_t i = 0; i < s1.rank; ++i) q.diag1_.push_back(s1.diagonal(i, i));
    IntMatrix x(s1.rank, boundaries.cols());
    for (std::size_t j = 0; j < boundaries.cols(); ++j) {
        bool ok = false;
        std::vector<LocalInt> c = q.cycle_coords(boundaries.column(j), &ok);
        if (!ok) throw BoundaryNotInCycles("boundary column " + std::to_string(j) + " is not a cycle");
        for (std::size_t i = 0; i < s1.rank; ++i) x(i, j) = c[i];
    }
    SmithForm s2 = smith_normal_form(x);
    q.left2_ = s2.left;
    q.rank2_ = s2.rank;
    std::vector<mpz_class> divs;
    for (std::size_t i = 0; i < s1.rank; ++i) {
        if (i < s2.rank) {
            q.diag2_.push_back(s2.diagonal(i, i));
            divs.push_back(s2.diagonal(i, i).numerator());
        } else {
            divs.push_back(0);
        }
    }
    q.group_ = localize_divisors(divs);
    return q;
}

// -------------------------------------------------------------------- Lattice

namespace {

std::size_t lead(const Lattice::Vec& x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sgn(x[i]) != 0) return i;
    return x.size();
}

// Divide out the odd part of the content.
void normalize(Lattice::Vec& x) {
    mpz_class g = 0;
    for (const auto& e : x)
        if (sgn(e) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
    if (sgn(g) == 0) return;
    mpz_tdiv_q_2exp(g.get_mpz_t(), g.get_mpz_t(), valuation(g));
    if (g != 1)
        for (auto& e : x) mpz_divexact(e.get_mpz_t(), e.get_mpz_t(), g.get_mpz_t());
}

// x <- u*x - t*row where x[c] = 2^w t', row[c] = 2^v u, w >= v.
void eliminate(Lattice::Vec& x, const Lattice::Vec& row, std::size_t c) {
    int v = valuation(row[c]);
    mpz_class u = row[c], t = x[c];
    mpz_tdiv_q_2exp(u.get_mpz_t(), u.get_mpz_t(), v);
    mpz_tdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), v);
    for (std::size_t i = c; i < x.size(); ++i) {
        if (sgn(row[i]) == 0) {
            if (u != 1) x[i] *= u;
            continue;
        }
        x[i] = u * x[i] - t * row[i];
    }
    normalize(x);
}

}  // namespace

Lattice Lattice::full(std::size_t n) {
    Lattice l(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0);
        e[i] = 1;
        l.rows_.emplace(i, std::move(e));
    }
    return l;
}

Lattice Lattice::span(std::size_t n, const std::vector<Vec>& gens) {
    Lattice l(n);
    for (const auto& g : gens) l.insert(g);
    return l;
}

bool Lattice::contains(Vec x) const {
    if (x.size() != n_) throw std::invalid_argument("lattice: wrong ambient rank");
    for (;;) {
        std::size_t c = lead(x);
        if (c == n_) return true;
        auto it = rows_.find(c);
        if (it == rows_.end()) return false;
        if (valuation(x[c]) < valuation(it->second[c])) return false;
        eliminate(x, it->second, c);
    }
}

void Lattice::insert(Vec x) {
    if (x.size() != n_) throw std::invalid_argument("lattice: wrong ambient rank");
    normalize(x);
    for (;;) {
        std::size_t c = lead(x);
        if (c == n_) return;
        auto it = rows_.find(c);
        if (it == rows_.end()) {
            rows_.emplace(c, std::move(x));
            return;
        }
        if (valuation(x[c]) < valuation(it->second[c])) std::swap(x, it->second);
        eliminate(x, it->second, c);
    }
}

Lattice Lattice::operator+(const Lattice& o) const {
    const Lattice& big = rank() >= o.rank() ? *this : o;
    const Lattice& small = rank() >= o.rank() ? o : *this;
    Lattice r = big;
    for (const auto& [c, row] : small.rows_) r.insert(row);
    return r;
}

Lattice Lattice::scaled(unsigned k) const {
    Lattice r = *this;
    for (auto& [c, row] : r.rows_)
        for (auto& e : row) e <<= k;
    return r;
}

std::vector<Lattice::Vec> Lattice::generators() const {
    std::vector<Vec> out;
    for (const auto& [c, row] : rows_) out.push_back(row);
    return out;
}

std::vector<Lattice::Vec> Lattice::generators_from(std::size_t c) const {
    std::vector<Vec> out;
    for (auto it = rows_.lower_bound(c); it != rows_.end(); ++it) out.push_back(it->second);
    return out;
}

std::optional<std::vector<LocalInt>> Lattice::complete(const Vec& head) const {
    const std::size_t c = head.size();
    if (c > n_) throw std::invalid_argument("lattice: head longer than ambient rank");
    Vec x = head;
    x.resize(n_, 0);
    mpz_class scale = 1;
    for (;;) {
        std::size_t p = lead(x);
        if (p >= c) break;
        auto it = rows_.find(p);
        if (it == rows_.end() || valuation(x[p]) < valuation(it->second[p])) return std::nullopt;
        const Vec& row = it->second;
        int v = valuation(row[p]);
        mpz_class u = row[p], t = x[p];
        mpz_tdiv_q_2exp(u.get_mpz_t(), u.get_mpz_t(), v);
        mpz_tdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), v);
        for (std::size_t i = 0; i < n_; ++i) x[i] = u * x[i] - t * row[i];
        scale *= u;
    }
    // scale * (head, 0) - (combination of rows) = (0, x_tail)
    std::vector<LocalInt> tail;
    for (std::size_t i = c; i < n_; ++i) tail.push_back(LocalInt(mpq_class(-x[i], scale)));
    return tail;
}

long Lattice::pivot_weight() const {
    long s = 0;
    for (const auto& [c, row] : rows_) s += valuation(row[c]);
    return s;
}

bool Lattice::subset_of(const Lattice& o) const {
    for (const auto& [c, row] : rows_)
        if (!o.contains(row)) return false;
    return true;
}

bool Lattice::operator==(const Lattice& o) const {
    if (n_ != o.n_ || rank() != o.rank() || pivot_weight() != o.pivot_weight()) return false;
    return subset_of(o);
}

IntMatrix Lattice::as_columns() const {
    IntMatrix m(n_, rows_.size());
    std::size_t j = 0;
    for (const auto& [c, row] : rows_) {
        for (std::size_t i = 0; i < n_; ++i) m(i, j) = LocalInt(row[i]);
        ++j;
    }
    return m;
}

Lattice::Vec integral_multiple(const std::vector<LocalInt>& v) {
    mpz_class l = 1;
    for (const auto& e : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.denominator().get_mpz_t());
    Lattice::Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        mpq_class q = v[i].value() * l;
        out[i] = q.get_num();
    }
    return out;
}

Lattice::Vec to_mpz(const std::vector<long>& v) {
    Lattice::Vec out;
    out.reserve(v.size());
    for (long x : v) out.emplace_back(x);
    return out;
}

}  // namespace mmfss
