#pragma once

#include <gmpxx.h>

#include <climits>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmfss {

// An element of Z_(2): a rational number whose denominator is odd.
class LocalInt {
public:
    LocalInt() = default;
    LocalInt(long v) : q_(v) {}
    LocalInt(const mpz_class& v) : q_(v) {}
    explicit LocalInt(const mpq_class& q);

    const mpq_class& value() const { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_unit() const { return valuation() == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    // 2-adic valuation; INT_MAX for zero.
    int valuation() const;
    // Equal up to multiplication by a unit.
    bool same_unit_class(const LocalInt& o) const;
    LocalInt odd_part() const;

    // Residue in [0, 2^k) of this element modulo 2^k.
    mpz_class residue(unsigned k) const;

    LocalInt operator-() const { return LocalInt(mpq_class(-q_)); }
    LocalInt& operator+=(const LocalInt& o);
    LocalInt& operator-=(const LocalInt& o);
    LocalInt& operator*=(const LocalInt& o);
    friend LocalInt operator+(LocalInt a, const LocalInt& b) { return a += b; }
    friend LocalInt operator-(LocalInt a, const LocalInt& b) { return a -= b; }
    friend LocalInt operator*(LocalInt a, const LocalInt& b) { return a *= b; }
    friend bool operator==(const LocalInt& a, const LocalInt& b) { return a.q_ == b.q_; }
    friend bool operator!=(const LocalInt& a, const LocalInt& b) { return a.q_ != b.q_; }

    std::string str() const { return q_.get_str(); }

private:
    mpq_class q_;
};

// a / b in Z_(2); throws std::domain_error unless v(b) <= v(a).
LocalInt divide(const LocalInt& a, const LocalInt& b);
LocalInt two_pow(unsigned k);
int valuation(const mpz_class& z);

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows, std::size_t cols);
    static IntMatrix from_columns(const std::vector<std::vector<LocalInt>>& cols, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    LocalInt& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const LocalInt& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<LocalInt> column(std::size_t j) const;
    IntMatrix operator*(const IntMatrix& o) const;
    std::vector<LocalInt> operator*(const std::vector<LocalInt>& v) const;
    friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    bool is_diagonal() const;

    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);
    // row i += c * row j
    void add_row(std::size_t i, std::size_t j, const LocalInt& c);
    void add_col(std::size_t i, std::size_t j, const LocalInt& c);
    void scale_row(std::size_t i, const LocalInt& c);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<LocalInt> a_;
};

// Finitely generated Z_(2)-module: torsion divisors 2^k (k >= 1, nondecreasing)
// followed by free summands, stored as divisor 0.
class LocalGroup {
public:
    LocalGroup() = default;
    static LocalGroup cyclic(unsigned k);  // Z/2^k, k = 0 gives the trivial group
    static LocalGroup free(std::size_t rank);

    const std::vector<mpz_class>& divisors() const { return divisors_; }
    std::vector<unsigned> torsion_exponents() const;
    std::size_t free_rank() const;
    bool is_trivial() const { return divisors_.empty(); }
    bool is_finite() const { return free_rank() == 0; }
    // log2 of the order; -1 when infinite.
    long log2_order() const;
    LocalGroup direct_sum(const LocalGroup& o) const;
    std::string str() const;

    friend bool operator==(const LocalGroup& a, const LocalGroup& b) { return a.divisors_ == b.divisors_; }
    friend bool operator!=(const LocalGroup& a, const LocalGroup& b) { return !(a == b); }

private:
    friend LocalGroup localize_divisors(const std::vector<mpz_class>& divisors);
    std::vector<mpz_class> divisors_;
};

LocalGroup localize_divisors(const std::vector<mpz_class>& divisors);

struct SmithForm {
    IntMatrix left, diagonal, right;
    std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& m);

struct BoundaryNotInCycles : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (column span of cycles) / (column span of boundaries).
class Subquotient {
public:
    const LocalGroup& group() const { return group_; }
    // Coordinates of the class of v; torsion coordinates reduced into [0, 2^k).
    std::vector<LocalInt> class_of(const std::vector<LocalInt>& v) const;
    bool contains_cycle(const std::vector<LocalInt>& v) const;

private:
    friend Subquotient subquotient(std::size_t, const IntMatrix&, const IntMatrix&);
    std::vector<LocalInt> cycle_coords(const std::vector<LocalInt>& v, bool* ok) const;
    LocalGroup group_;
    IntMatrix left1_, left2_;
    std::vector<LocalInt> diag1_, diag2_;
    std::size_t ambient_ = 0, rank1_ = 0, rank2_ = 0;
};

Subquotient subquotient(std::size_t ambient_rank, const IntMatrix& cycles, const IntMatrix& boundaries);

// A Z_(2)-submodule of Z_(2)^n held in echelon form by integer generators.
// Rows are scaled only by odd integers, so no localization is lost.
class Lattice {
public:
    using Vec = std::vector<mpz_class>;

    Lattice() = default;
    explicit Lattice(std::size_t n) : n_(n) {}
    static Lattice full(std::size_t n);
    static Lattice span(std::size_t n, const std::vector<Vec>& gens);

    std::size_t ambient() const { return n_; }
    std::size_t rank() const { return rows_.size(); }
    bool contains(Vec x) const;
    void insert(Vec x);
    Lattice operator+(const Lattice& o) const;
    Lattice scaled(unsigned k) const;
    std::vector<Vec> generators() const;
    // Generators whose pivot column is at least c: for an echelon lattice in
    // Z^m x Z^n these span its intersection with 0 x Z^n when c = m.
    std::vector<Vec> generators_from(std::size_t c) const;
    // For a lattice in Z^c x Z^m: some t with (x, t) in the lattice, or nullopt.
    std::optional<std::vector<LocalInt>> complete(const Vec& x) const;
    // Sum of pivot valuations; with equal ranks, log2[X:Y] = Y.pivot_weight() - X.pivot_weight().
    long pivot_weight() const;
    bool operator==(const Lattice& o) const;
    bool operator!=(const Lattice& o) const { return !(*this == o); }
    bool subset_of(const Lattice& o) const;
    IntMatrix as_columns() const;

private:
    std::size_t n_ = 0;
    std::map<std::size_t, Vec> rows_;  // pivot column -> row
};

// Clears odd denominators: returns an integer vector spanning the same Z_(2)-line.
Lattice::Vec integral_multiple(const std::vector<LocalInt>& v);
Lattice::Vec to_mpz(const std::vector<long>& v);

}  // namespace mmfss
