#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mmfss/linalg.hpp"
#include "mmfss/ssdf.hpp"
#include "mmfss/word.hpp"

namespace mmfss {

struct SlotKey {
    int s = 0, f = 0;
    auto operator<=>(const SlotKey&) const = default;
    std::string str() const { return "(" + std::to_string(s) + "," + std::to_string(f) + ")"; }
};

struct DegreeOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingActionMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExpsHash {
    std::size_t operator()(const Exps& e) const {
        std::size_t h = 0;
        for (int x : e) h = h * 131 + static_cast<std::size_t>(x);
        return h;
    }
};

// An element of one (s,f) slot of the classical E2 page, in basis coordinates.
struct Element {
    SlotKey key;
    std::vector<LocalInt> c;
    bool is_zero() const;
    bool operator==(const Element& o) const;
};

struct BasisElement {
    Exps e{};
    SlotKey key;
    int index = 0;
    OrderExp order;
};

// The classical (top-weight) E2 ring: tau acts freely, so every weight of a
// slot carries the same group Z_(2)^n / (orders).
class E2Ring {
public:
    explicit E2Ring(const Dataset& d, int smax = 1 << 20);

    int smax() const { return smax_; }
    int fmax() const { return fmax_; }
    // Last filtration where E_infinity is exact: high up only h1-towers remain,
    // and their d3 targets must still lie inside the truncated page.
    int reliable_fmax() const { return fmax_ - 3; }
    const std::map<SlotKey, std::vector<int>>& slots() const { return slots_; }
    const std::vector<int>* slot(SlotKey k) const;
    std::size_t slot_size(SlotKey k) const;
    const BasisElement& basis(int id) const { return basis_[id]; }
    std::optional<int> find(const Exps& e) const;
    GeneratorWord label(int id) const;
    GeneratorWord label(SlotKey k, int i) const { return label(slot(k)->at(i)); }

    // Relation lattice of a slot: spanned by order_i * e_i.
    Lattice relations(SlotKey k) const;
    bool in_range(SlotKey k) const { return k.s >= 0 && k.f >= 0 && k.s <= smax_ && k.f <= fmax_; }

    Element zero(SlotKey k) const;
    Element unit_vector(SlotKey k, int i, const LocalInt& c = 1) const;
    // Left multiplication by one generator.
    Element act(int gen, const Element& x) const;
    // mono * x, applying generators in alphabetical order of their names.
    Element multiply(const Exps& mono, const Element& x) const;
    Element multiply(const Element& x, const Element& y) const;
    // Classical part of a word (tau power ignored); zero if no slot exists.
    Element evaluate(const GeneratorWord& w) const;
    // Same, applying the generators in reverse order.
    Element evaluate_reversed(const GeneratorWord& w) const;
    // Reduce coordinates modulo the slot orders.
    Element reduced(const Element& x) const;
    bool equal_in_e2(const Element& a, const Element& b) const;
    std::vector<GeneratorWord> words_of(const Element& x, int tau = 0) const;
    std::string str(const Element& x, int tau = 0) const;

    const Element& basis_product(int id1, int id2) const;

private:
    Element apply_gens(const std::vector<int>& order, const Exps& mono, Element x) const;
    int smax_ = 0, fmax_ = 0;
    std::vector<BasisElement> basis_;
    std::unordered_map<Exps, int, ExpsHash> index_;
    std::map<SlotKey, std::vector<int>> slots_;
    std::vector<std::vector<std::vector<std::pair<int, long>>>> actions_;  // [gen][id]
    std::vector<std::vector<bool>> has_action_;
    mutable std::unordered_map<long long, Element> product_cache_;
};

}  // namespace mmfss
