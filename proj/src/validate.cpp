#include <map>
#include <set>

#include "mmfss/ring.hpp"
#include "mmfss/ssdf.hpp"

namespace mmfss {

namespace {

void degree_checks(const Dataset& d, std::vector<Violation>& out) {
    auto bad = [&](const std::string& m) { out.push_back({"DegreeViolation", m}); };
    for (const auto& g : d.generators) {
        auto gi = generator_index(g.name);
        const auto& ref = kGenerators[*gi + 1];
        if (ref.degree != g.degree) bad("generator " + g.name + " declared at " + g.degree.str());
        OrderExp o = ref.order_exp ? OrderExp(ref.order_exp) : std::nullopt;
        if (o != g.order) bad("generator " + g.name + " declared with order " + order_str(g.order));
    }
    for (const auto& s : d.slots) {
        TriDegree t = degree_of_word(s.word);
        if (t.s != s.s || t.f != s.f || (s.s + s.f) % 2 != 0 || t.w * 2 != s.s + s.f || s.word.tau != 0)
            bad("basis word " + s.word.str() + " does not sit at (" + std::to_string(s.s) + "," + std::to_string(s.f) + ")");
    }
    for (const auto& a : d.actions) {
        TriDegree src = degree_of_word(a.source) + kGenerators[*generator_index(a.generator) + 1].degree;
        for (const auto& t : a.terms)
            if (degree_of_word(t) != src) bad("action " + a.generator + " on " + a.source.str() + " has term " + t.str());
    }
    for (const auto& r : d.seeds) {
        TriDegree want = degree_of_word(r.source) + TriDegree{-1, r.r, 0};
        if (r.r < 3 || r.r > 23 || r.r % 2 == 0) bad("seed d" + std::to_string(r.r) + " has an unsupported length");
        if (degree_of_word(r.target) != want)
            bad("seed d" + std::to_string(r.r) + " " + r.source.str() + " -> " + r.target.str() + " has target degree " +
                degree_of_word(r.target).str() + ", expected " + want.str());
        if (r.target.tau < (r.r - 1) / 2) bad("seed target " + r.target.str() + " carries too small a tau power");
    }
    for (const auto& x : d.extensions) {
        TriDegree ks = extension_kind_degree(x.kind);
        TriDegree a = degree_of_word(x.source) + ks, b = degree_of_word(x.target);
        if (a.s != b.s || a.w != b.w || b.f <= a.f)
            bad("extension " + x.kind + " from " + x.source.str() + " to " + x.target.str() + " breaks degree arithmetic");
    }
    for (const auto& e : d.expected_einf) {
        TriDegree t = degree_of_word(e.label);
        if (t.s != e.s || t.f != e.f) bad("expected class " + e.label.str() + " is not at its slot");
    }
}

void commutation_checks(const E2Ring& ring, std::vector<Violation>& out) {
    for (const auto& [key, ids] : ring.slots())
        for (std::size_t i = 0; i < ids.size(); ++i) {
            Element x = ring.unit_vector(key, static_cast<int>(i));
            for (int a = 0; a < static_cast<int>(kNumGens); ++a)
                for (int b = a + 1; b < static_cast<int>(kNumGens); ++b) {
                    const TriDegree& da = kGenerators[a + 1].degree;
                    const TriDegree& db = kGenerators[b + 1].degree;
                    SlotKey t{key.s + da.s + db.s, key.f + da.f + db.f};
                    if (!ring.in_range(t)) continue;
                    Element ab = ring.act(a, ring.act(b, x));
                    Element ba = ring.act(b, ring.act(a, x));
                    if (koszul_sign(da.s, db.s) < 0)
                        for (auto& c : ba.c) c = -c;
                    if (!ring.equal_in_e2(ab, ba))
                        out.push_back({"CommutationViolation", std::string(kGenerators[a + 1].name) + " and " +
                                                                   std::string(kGenerators[b + 1].name) + " disagree on " +
                                                                   ring.label(ids[i]).str()});
                }
        }
}

void word_checks(const Dataset& d, const E2Ring& ring, std::vector<Violation>& out) {
    for (const auto& w : d.words) {
        TriDegree t = degree_of_word(w.lhs);
        if (!ring.in_range({t.s, t.f})) continue;
        Element lhs = ring.evaluate(w.lhs);
        Element rhs = ring.zero(lhs.key);
        for (const auto& term : w.rhs) {
            Element e = ring.evaluate(term);
            if (e.key != lhs.key) {
                out.push_back({"DegreeViolation", "alternate word " + w.lhs.str() + " has a term in another degree"});
                continue;
            }
            for (std::size_t i = 0; i < e.c.size(); ++i) rhs.c[i] += e.c[i];
        }
        if (!ring.equal_in_e2(lhs, rhs))
            out.push_back({"WordConsistencyViolation", w.lhs.str() + " evaluates to " + ring.str(lhs) + ", declared " +
                                                           ring.str(rhs)});
        if (!ring.equal_in_e2(lhs, ring.evaluate_reversed(w.lhs)))
            out.push_back({"WordConsistencyViolation", w.lhs.str() + " depends on evaluation order"});
    }
}

// E2 is free over Z[Delta^8]: Delta^8 carries each basis label to a basis label
// of the same order and commutes with the generator actions.  The slot 192
// stems up may be larger (P^24 is not a translate).
void periodicity_checks(const E2Ring& ring, std::vector<Violation>& out) {
    const int period = 192;
    for (const auto& [key, ids] : ring.slots()) {
        SlotKey up{key.s + period, key.f};
        if (!ring.in_range(up)) continue;
        const auto* uids = ring.slot(up);
        std::size_t n_up = uids ? uids->size() : 0;
        if (n_up < ids.size()) {
            out.push_back({"PeriodicityViolation", "slot " + up.str() + " is smaller than " + key.str()});
            continue;
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
            Exps e = ring.basis(ids[i]).e;
            e[DELTA] += 8;
            auto j = ring.find(e);
            if (!j || ring.basis(*j).order != ring.basis(ids[i]).order) {
                out.push_back({"PeriodicityViolation", "no Delta^8 translate of " + ring.label(ids[i]).str()});
                continue;
            }
            Element x = ring.unit_vector(key, static_cast<int>(i));
            Element y = ring.unit_vector(up, ring.basis(*j).index);
            for (int g = 0; g < static_cast<int>(kNumGens); ++g) {
                const TriDegree& dg = kGenerators[g + 1].degree;
                if (!ring.in_range({up.s + dg.s, up.f + dg.f})) continue;
                Element gx = ring.act(g, x), gy = ring.act(g, y);
                Exps d8{};
                d8[DELTA] = 8;
                Element shifted = ring.multiply(d8, gx);
                if (!ring.equal_in_e2(shifted, gy))
                    out.push_back({"PeriodicityViolation", std::string(kGenerators[g + 1].name) + " on " +
                                                               ring.label(*j).str() + " is not the Delta^8 translate"});
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& d) {
    std::vector<Violation> out;
    degree_checks(d, out);
    if (d.slots.empty()) return out;
    E2Ring ring(d);
    commutation_checks(ring, out);
    word_checks(d, ring, out);
    periodicity_checks(ring, out);
    return out;
}

}  // namespace mmfss
