#include "mmfss/ring.hpp"

#include <algorithm>

namespace mmfss {

namespace {

// Generator indices sorted by name: 4a, Delta, P, c, d, g, h1, h1v1sq, h2.
const std::vector<int>& alphabetical() {
    static const std::vector<int> order = [] {
        std::vector<int> v(kNumGens);
        for (std::size_t i = 0; i < kNumGens; ++i) v[i] = static_cast<int>(i);
        std::sort(v.begin(), v.end(), [](int a, int b) { return kGenerators[a + 1].name < kGenerators[b + 1].name; });
        return v;
    }();
    return order;
}

}  // namespace

bool Element::is_zero() const {
    for (const auto& x : c)
        if (!x.is_zero()) return false;
    return true;
}

bool Element::operator==(const Element& o) const {
    if (is_zero() && o.is_zero()) return true;
    return key == o.key && c == o.c;
}

E2Ring::E2Ring(const Dataset& d, int smax) {
    smax_ = 0;
    fmax_ = 0;
    int data_smax = 0;
    for (const auto& s : d.slots) {
        data_smax = std::max(data_smax, s.s);
        fmax_ = std::max(fmax_, s.f);
    }
    smax_ = std::min(smax, data_smax);
    for (const auto& s : d.slots) {
        if (s.s > smax_) continue;
        TriDegree deg = degree_of_word(s.word);
        if (deg.s != s.s || deg.f != s.f)
            throw std::invalid_argument("basis word " + s.word.str() + " does not sit in its slot");
        BasisElement b;
        b.e = s.word.e;
        b.key = {s.s, s.f};
        b.order = s.order;
        auto& ids = slots_[b.key];
        b.index = static_cast<int>(ids.size());
        int id = static_cast<int>(basis_.size());
        ids.push_back(id);
        index_[b.e] = id;
        basis_.push_back(b);
    }
    actions_.assign(kNumGens, std::vector<std::vector<std::pair<int, long>>>(basis_.size()));
    for (const auto& a : d.actions) {
        int g = *generator_index(a.generator);
        auto src = find(a.source.e);
        if (!src) continue;
        auto& out = actions_[g][*src];
        for (const auto& t : a.terms) {
            auto tid = find(t.e);
            if (!tid) throw MissingActionMatrix("action term outside the loaded range: " + t.str());
            out.emplace_back(*tid, t.coeff);
        }
    }
}

const std::vector<int>* E2Ring::slot(SlotKey k) const {
    auto it = slots_.find(k);
    return it == slots_.end() ? nullptr : &it->second;
}

std::size_t E2Ring::slot_size(SlotKey k) const {
    auto* s = slot(k);
    return s ? s->size() : 0;
}

std::optional<int> E2Ring::find(const Exps& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

GeneratorWord E2Ring::label(int id) const {
    GeneratorWord w;
    w.e = basis_[id].e;
    return w;
}

Lattice E2Ring::relations(SlotKey k) const {
    Lattice l(slot_size(k));
    if (auto* ids = slot(k))
        for (std::size_t i = 0; i < ids->size(); ++i) {
            const auto& o = basis_[(*ids)[i]].order;
            if (!o) continue;
            Lattice::Vec v(ids->size(), 0);
            v[i] = mpz_class(1) << *o;
            l.insert(v);
        }
    return l;
}

Element E2Ring::zero(SlotKey k) const { return Element{k, std::vector<LocalInt>(slot_size(k))}; }

Element E2Ring::unit_vector(SlotKey k, int i, const LocalInt& c) const {
    Element x = zero(k);
    x.c.at(i) = c;
    return x;
}

Element E2Ring::act(int gen, const Element& x) const {
    const TriDegree& gd = kGenerators[gen + 1].degree;
    SlotKey tk{x.key.s + gd.s, x.key.f + gd.f};
    if (x.is_zero()) return zero(tk);
    if (!in_range(tk))
        throw MissingActionMatrix("no action of " + std::string(kGenerators[gen + 1].name) + " into " + tk.str());
    Element out = zero(tk);
    const auto* ids = slot(x.key);
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        if (x.c[i].is_zero()) continue;
        for (const auto& [tid, coeff] : actions_[gen][(*ids)[i]]) out.c[basis_[tid].index] += x.c[i] * LocalInt(coeff);
    }
    return out;
}

Element E2Ring::apply_gens(const std::vector<int>& order, const Exps& mono, Element x) const {
    TriDegree d = degree_of_exps(mono);
    SlotKey tk{x.key.s + d.s, x.key.f + d.f};
    for (int g : order)
        for (int k = 0; k < mono[g]; ++k) {
            x = act(g, x);
            if (x.is_zero()) return zero(tk);
        }
    return x;
}

Element E2Ring::multiply(const Exps& mono, const Element& x) const { return apply_gens(alphabetical(), mono, x); }

Element E2Ring::multiply(const Element& x, const Element& y) const {
    SlotKey tk{x.key.s + y.key.s, x.key.f + y.key.f};
    Element out = zero(tk);
    if (x.is_zero() || y.is_zero()) return out;
    const auto* xi = slot(x.key);
    const auto* yi = slot(y.key);
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        if (x.c[i].is_zero()) continue;
        for (std::size_t j = 0; j < y.c.size(); ++j) {
            if (y.c[j].is_zero()) continue;
            const Element& p = basis_product((*xi)[i], (*yi)[j]);
            if (p.is_zero()) continue;
            for (std::size_t t = 0; t < p.c.size(); ++t)
                if (!p.c[t].is_zero()) out.c[t] += x.c[i] * y.c[j] * p.c[t];
        }
    }
    return out;
}

const Element& E2Ring::basis_product(int id1, int id2) const {
    long long key = static_cast<long long>(id1) * static_cast<long long>(basis_.size()) + id2;
    auto it = product_cache_.find(key);
    if (it != product_cache_.end()) return it->second;
    const BasisElement& b2 = basis_[id2];
    Element r = multiply(basis_[id1].e, unit_vector(b2.key, b2.index));
    return product_cache_.emplace(key, std::move(r)).first->second;
}

Element E2Ring::evaluate(const GeneratorWord& w) const {
    TriDegree d = degree_of_exps(w.e);
    SlotKey k{d.s, d.f};
    if (!in_range(k)) throw DegreeOutOfRange("word " + w.str() + " lies outside the loaded range");
    auto unit = find(Exps{});
    if (!unit) throw DegreeOutOfRange("unit class missing");
    Element one = unit_vector({0, 0}, basis_[*unit].index, LocalInt(w.coeff));
    return multiply(w.e, one);
}

Element E2Ring::evaluate_reversed(const GeneratorWord& w) const {
    TriDegree d = degree_of_exps(w.e);
    SlotKey k{d.s, d.f};
    if (!in_range(k)) throw DegreeOutOfRange("word " + w.str() + " lies outside the loaded range");
    auto unit = find(Exps{});
    Element one = unit_vector({0, 0}, basis_[*unit].index, LocalInt(w.coeff));
    std::vector<int> rev(alphabetical().rbegin(), alphabetical().rend());
    Element r = apply_gens(rev, w.e, one);
    // reordering odd-stem generators past each other costs a Koszul sign
    int sign = 1;
    const auto& fwd = alphabetical();
    for (std::size_t i = 0; i < fwd.size(); ++i)
        for (std::size_t j = i + 1; j < fwd.size(); ++j) {
            int a = fwd[i], b = fwd[j];
            int pairs = w.e[a] * w.e[b];
            if (pairs % 2) sign *= koszul_sign(kGenerators[a + 1].degree.s, kGenerators[b + 1].degree.s);
        }
    if (sign < 0)
        for (auto& x : r.c) x = -x;
    return r;
}

Element E2Ring::reduced(const Element& x) const {
    Element r = x;
    const auto* ids = slot(x.key);
    if (!ids) return r;
    for (std::size_t i = 0; i < r.c.size(); ++i) {
        const auto& o = basis_[(*ids)[i]].order;
        if (o) r.c[i] = LocalInt(r.c[i].residue(*o));
    }
    return r;
}

bool E2Ring::equal_in_e2(const Element& a, const Element& b) const {
    if (a.is_zero() && b.is_zero()) return true;
    if (a.key != b.key) return reduced(a).is_zero() && reduced(b).is_zero();
    Element d = a;
    for (std::size_t i = 0; i < d.c.size(); ++i) d.c[i] -= b.c[i];
    return reduced(d).is_zero();
}

std::vector<GeneratorWord> E2Ring::words_of(const Element& x, int tau) const {
    std::vector<GeneratorWord> out;
    const auto* ids = slot(x.key);
    if (!ids) return out;
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        if (x.c[i].is_zero()) continue;
        GeneratorWord w = label((*ids)[i]);
        w.tau = tau;
        if (!x.c[i].is_integer()) throw std::domain_error("non-integral coordinate in words_of");
        w.coeff = x.c[i].numerator().get_si();
        out.push_back(w);
    }
    return out;
}

std::string E2Ring::str(const Element& x, int tau) const {
    auto ws = words_of(reduced(x), tau);
    if (ws.empty()) return "0";
    std::string out;
    for (const auto& w : ws) {
        if (!out.empty()) out += " + ";
        out += w.pretty();
    }
    return out;
}

}  // namespace mmfss
