#include "mmfss/cofiber.hpp"

#include <set>

namespace mmfss {

namespace {

constexpr long kUnits[] = {1, -1, 3, -3, 5, -5, 7, -7};

Exps g_power(int k) {
    Exps e{};
    e[G] = k;
    return e;
}

Element scaled(const Element& x, const LocalInt& c) {
    Element r = x;
    for (auto& v : r.c) v *= c;
    return r;
}

Element difference(const Element& a, const Element& b, const LocalInt& cb) {
    Element r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i] * cb;
    return r;
}

mpz_class odd_lcm(const Element& x) {
    mpz_class l = 1;
    for (const auto& c : x.c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.denominator().get_mpz_t());
    return l;
}

Lattice::Vec times_lcm(const Element& x, const mpz_class& l) {
    Lattice::Vec v;
    for (const auto& c : x.c) v.push_back((c * LocalInt(l)).numerator());
    return v;
}

std::string degree_str(SlotKey k, int tau) {
    return "(" + std::to_string(k.s) + "," + std::to_string(k.f) + "," + std::to_string((k.s + k.f) / 2 - tau) + ")";
}

}  // namespace

GeneratorWord extension_operator(const std::string& kind) {
    if (kind == "2") return GeneratorWord::parse("2");
    if (kind == "eta") return GeneratorWord::parse("1*h1^1");
    if (kind == "nu") return GeneratorWord::parse("1*h2^1");
    throw std::invalid_argument("unknown extension kind " + kind);
}

Cofiber::Cofiber(const SpectralSequence& ss) : ss_(ss) {
    depth_max_ = static_cast<int>(ss_.einf().slots.begin()->second.Z.size()) - 1;
}

int Cofiber::clamp(int depth) const { return std::min(depth, depth_max_); }

Lattice::Vec Cofiber::as_vec(const Element& x) const { return integral_multiple(x.c); }

const SlotState& Cofiber::state(SlotKey k) const {
    const SlotState* st = einf().state(k);
    if (!st) throw DegreeOutOfRange("no computed classes at " + k.str());
    return *st;
}

Detected Cofiber::detect(const Element& x, int tau) const {
    Detected d;
    d.key = x.key;
    d.tau = tau;
    d.value = x;
    if (x.key.s > ss_.options().smax + 1 || !ring().in_range(x.key))
        throw DegreeOutOfRange("class at " + x.key.str() + " lies outside the computed range");
    if (x.c.empty() || x.is_zero() || !einf().state(x.key)) return d;
    if (ss_.options().truncate && tau >= ss_.options().truncate) return d;
    d.zero = state(x.key).B[clamp(tau)]->contains(as_vec(x));
    return d;
}

Detected Cofiber::detect(const GeneratorWord& w) const {
    TriDegree t = degree_of_word(w);
    SlotKey k{t.s, t.f};
    if (k.s > ss_.options().smax + 1 || !ring().in_range(k))
        throw DegreeOutOfRange("word " + w.str() + " lies outside the computed range");
    return detect(ring().evaluate(w), w.tau);
}

bool Cofiber::same(const Detected& a, const Detected& b) const {
    if (a.zero || b.zero) return a.zero && b.zero;
    if (a.key != b.key || a.tau != b.tau) return false;
    return detect(difference(a.value, b.value, 1), a.tau).zero;
}

bool Cofiber::same_up_to_unit(const Detected& a, const Detected& b) const {
    if (a.zero || b.zero) return a.zero && b.zero;
    if (a.key != b.key || a.tau != b.tau) return false;
    for (long u : kUnits)
        if (detect(difference(a.value, b.value, u), a.tau).zero) return true;
    return false;
}

Detected Cofiber::add(const Detected& a, const Detected& b) const {
    if (a.zero) return b;
    if (b.zero) return a;
    if (a.key != b.key || a.tau != b.tau) throw std::invalid_argument("adding classes of different degrees");
    return detect(difference(a.value, b.value, -1), a.tau);
}

Detected Cofiber::times(const Detected& x, const Exps& mono, int tau, const LocalInt& c) const {
    TriDegree dm = degree_of_exps(mono);
    SlotKey k{x.key.s + dm.s, x.key.f + dm.f};
    if (k.s > ss_.options().smax + 1 || !ring().in_range(k))
        throw DegreeOutOfRange("product lands at " + k.str() + ", outside the computed range");
    if (x.value.c.empty() || x.value.is_zero()) {
        Detected d;
        d.key = k;
        d.tau = x.tau + tau;
        d.value = ring().zero(k);
        return d;
    }
    return detect(scaled(ring().multiply(mono, x.value), c), x.tau + tau);
}

bool Cofiber::injective(SlotKey src, int depth, int m, const Exps& mono) const {
    TriDegree dm = degree_of_exps(mono);
    SlotKey tgt{src.s + dm.s, src.f + dm.f};
    const std::size_t n = ring().slot_size(src);
    if (n == 0 || !einf().state(src)) return true;
    if (!einf().state(tgt)) return state(src).Z[clamp(depth)]->subset_of(*state(src).B[clamp(depth)]);
    const std::size_t nt = ring().slot_size(tgt);
    Lattice big(nt + n);
    for (const auto& z : state(src).Z[clamp(depth)]->generators()) {
        Element img = ring().multiply(mono, Element{src, std::vector<LocalInt>(z.begin(), z.end())});
        std::vector<LocalInt> row(img.c);
        row.insert(row.end(), z.begin(), z.end());
        big.insert(integral_multiple(row));
    }
    for (const auto& b : state(tgt).B[clamp(depth + m)]->generators()) {
        Lattice::Vec row = b;
        row.resize(nt + n, 0);
        big.insert(row);
    }
    const Lattice& bsrc = *state(src).B[clamp(depth)];
    for (const auto& row : big.generators_from(nt))
        if (!bsrc.contains(Lattice::Vec(row.begin() + nt, row.end()))) return false;
    return true;
}

Detected Cofiber::divide(const Detected& y, int m, const Exps& mono) const {
    TriDegree dm = degree_of_exps(mono);
    SlotKey src{y.key.s - dm.s, y.key.f - dm.f};
    int t = y.tau - m;
    Detected out;
    out.key = src;
    out.tau = t;
    if (t < 0) throw IsomorphismFailure("class at " + degree_str(y.key, y.tau) + " is not divisible by tau^" + std::to_string(m));
    if (src.s < 0 || src.f < 0) throw IsomorphismFailure("no degree to divide into below " + y.key.str());
    out.value = ring().zero(src);
    if (!injective(src, t, m, mono))
        throw IsomorphismFailure("multiplication is not injective at " + degree_str(src, t));
    if (y.zero) return out;
    const std::size_t n = ring().slot_size(src);
    if (n == 0 || !einf().state(src)) throw IsomorphismFailure("nothing to divide into at " + src.str());
    const std::size_t nt = ring().slot_size(y.key);
    Lattice big(nt + n);
    for (const auto& z : state(src).Z[clamp(t)]->generators()) {
        Element img = ring().multiply(mono, Element{src, std::vector<LocalInt>(z.begin(), z.end())});
        std::vector<LocalInt> row(img.c);
        row.insert(row.end(), z.begin(), z.end());
        big.insert(integral_multiple(row));
    }
    for (const auto& b : state(y.key).B[clamp(y.tau)]->generators()) {
        Lattice::Vec row = b;
        row.resize(nt + n, 0);
        big.insert(row);
    }
    mpz_class l = odd_lcm(y.value);
    auto tail = big.complete(times_lcm(y.value, l));
    if (!tail) throw IsomorphismFailure("class at " + degree_str(y.key, y.tau) + " is not a multiple");
    Element z{src, *tail};
    for (auto& c : z.c) c *= LocalInt(mpq_class(1, l));
    return detect(z, t);
}

std::string Cofiber::str(const Detected& x) const {
    if (x.zero) return "0";
    return ring().str(ring().reduced(x.value), x.tau) + " " + degree_str(x.key, x.tau);
}

Element Cofiber::inclusion_i(const GeneratorWord& detecting, bool tau_divisible) const {
    GeneratorWord w = detecting;
    w.tau = 0;
    Element x = ring().evaluate(w);
    if (tau_divisible || detecting.tau > 0) return ring().zero(x.key);
    return x;
}

Detected Cofiber::projection_q(const Element& x) const {
    auto fd = ss_.first_differential(x, 0);
    if (!fd) {
        Detected d;
        d.key = {x.key.s - 1, x.key.f + 1};
        return d;
    }
    return detect(scaled(fd->y, -1), (fd->r - 3) / 2);
}

DeductionReport Cofiber::deduce_hidden_extensions(const std::string& kind, int smin, int smax, int gmax) const {
    DeductionReport rep;
    const GeneratorWord op = extension_operator(kind);
    const TriDegree dop = degree_of_word(op);
    const int stop = std::min(smax, ss_.options().smax);
    const int gstem = kGenerators[G + 1].degree.s;
    auto glyphs = ss_.classes(einf(), stop, ring().fmax());
    std::set<std::pair<std::string, int>> seen;

    for (const auto& gl : glyphs) {
        if (gl.s < smin || gl.s > stop) continue;
        GeneratorWord base = gl.label;
        base.tau = 0;
        Element bx = ring().evaluate(base);
        int taus = gl.tau_order ? *gl.tau_order : 4;
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < taus; ++i) {
                Detected b = detect(scaled(bx, two_pow(j)), gl.label.tau + i);
                if (b.zero) continue;
                std::string sig = ring().str(ring().reduced(b.value), 0);
                if (!seen.insert({sig + degree_str(b.key, b.tau), 0}).second) continue;
                Detected ab;
                try {
                    ab = times(b, op.e, 0, op.coeff);
                } catch (const DegreeOutOfRange&) {
                    continue;
                }
                if (!ab.zero) continue;  // not hidden: the product is visible

                // search tau^M g^k b = q(xbar) for a classical class xbar
                std::vector<std::pair<Element, int>> matches;  // (xbar, r)
                int found_k = -1, found_r = 0;
                for (int k = 0; k <= gmax && found_k < 0; ++k) {
                    if (b.key.s + k * gstem > ss_.options().smax) break;
                    if (!ring().in_range({b.key.s + k * gstem, b.key.f + 4 * k})) break;
                    Element Y = ring().multiply(g_power(k), b.value);
                    if (ring().reduced(Y).is_zero()) break;
                    for (const auto& [r, layer] : ss_.layers()) {
                        int M = (r - 3) / 2 - b.tau;
                        if (M < 0) continue;
                        SlotKey sk{Y.key.s + 1, Y.key.f - r};
                        const LayerEntry* e = layer.entry(sk);
                        if (!e) continue;
                        const SlotState* ts = ss_.page_at(r).state(Y.key);
                        const Lattice& bt = *ts->B[std::min<int>((r - 1) / 2, depth_max_)];
                        if (bt.contains(as_vec(Y))) continue;
                        if (detect(Y, (r - 3) / 2).zero) continue;
                        for (std::size_t li = 0; li < e->labels.size(); ++li) {
                            const auto& l = e->labels[li];
                            if (l.a < 0 || l.value.c.empty() || l.value.is_zero()) continue;
                            bool hit = false;
                            for (int jj = 0; jj < 4 && !hit; ++jj)
                                for (long u : kUnits) {
                                    Element diff = difference(scaled(l.value, LocalInt(u) * two_pow(jj)), Y, 1);
                                    if (!bt.contains(as_vec(diff))) continue;
                                    Element x = ring().unit_vector(sk, static_cast<int>(li), two_pow(l.a + jj));
                                    matches.emplace_back(scaled(x, -u), r);
                                    hit = true;
                                    break;
                                }
                        }
                        if (!matches.empty()) {
                            found_k = k;
                            found_r = r;
                            break;
                        }
                    }
                }
                if (found_k < 0) continue;
                if (matches.size() > 1) {
                    rep.diagnostics.push_back("AmbiguousPreimage for " + str(b) + ": " + std::to_string(matches.size()) +
                                              " differential sources");
                    continue;
                }
                const int M = (found_r - 3) / 2 - b.tau;
                Element xbar = matches.front().first;
                if (!ring().in_range({xbar.key.s + dop.s, xbar.key.f + dop.f})) continue;
                Element xa = kind == "2" ? scaled(xbar, 2) : ring().multiply(op.e, xbar);
                xa = ring().reduced(xa);
                if (xa.is_zero()) continue;
                auto fd = ss_.first_differential(xa, 0);
                if (!fd) continue;  // q(xbar a) = 0
                Detected qa;
                try {
                    qa = detect(scaled(fd->y, -1), (fd->r - 3) / 2);
                } catch (const DegreeOutOfRange&) {
                    continue;
                }
                if (qa.zero) {
                    rep.diagnostics.push_back("projection of " + ring().str(xa) + " vanishes on E_infinity");
                    continue;
                }
                Detected c;
                try {
                    c = divide(qa, M, g_power(found_k));
                } catch (const IsomorphismFailure& ex) {
                    rep.diagnostics.push_back("IsomorphismFailure for " + str(b) + ": " + ex.what());
                    continue;
                }
                if (c.zero || c.key.f <= b.key.f + dop.f) continue;
                HiddenExtension h;
                h.kind = kind;
                h.source = b;
                h.target = c;
                h.preimage = xbar;
                h.r1 = found_r;
                h.r2 = fd->r;
                h.g_power = found_k;
                h.tau_shift = M;
                rep.extensions.push_back(std::move(h));
            }
    }

    // a source of higher filtration hitting the same target wins
    std::vector<HiddenExtension> kept;
    for (std::size_t a = 0; a < rep.extensions.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < rep.extensions.size() && !dominated; ++b)
            if (a != b && rep.extensions[b].source.key.f > rep.extensions[a].source.key.f &&
                same_up_to_unit(rep.extensions[a].target, rep.extensions[b].target))
                dominated = true;
        if (!dominated) kept.push_back(rep.extensions[a]);
    }
    rep.extensions = std::move(kept);
    return rep;
}

std::vector<RowCheck> Cofiber::verify_extension_tables(const std::vector<ExtensionRecord>& rows,
                                                       const std::vector<HiddenExtension>& deduced) const {
    std::vector<RowCheck> out;
    auto find = [&](const std::string& kind, const Detected& src) -> const HiddenExtension* {
        for (const auto& h : deduced)
            if (h.kind == kind && same_up_to_unit(h.source, src)) return &h;
        return nullptr;
    };
    for (const auto& row : rows) {
        RowCheck rc;
        rc.row = &row;
        Detected src, tgt;
        try {
            src = detect(row.source);
            tgt = detect(row.target);
        } catch (const DegreeOutOfRange&) {
            rc.detail = "outside the computed range";
            out.push_back(rc);
            continue;
        }
        if (src.zero || tgt.zero) {
            rc.contradicted = true;
            rc.detail = "source or target vanishes on E_infinity";
            out.push_back(rc);
            continue;
        }
        if (const HiddenExtension* h = find(row.kind, src)) {
            rc.reproduced = same_up_to_unit(h->target, tgt);
            rc.contradicted = !rc.reproduced;
            rc.detail = "deduced target " + str(h->target);
        } else {
            rc.detail = "not deduced";
        }
        // translates by g^k Delta^(8m)
        for (int m = 0; m <= 1 && !rc.contradicted; ++m)
            for (int k = 0; k <= 6 && !rc.contradicted; ++k) {
                if (m == 0 && k == 0) continue;
                Exps mono{};
                mono[G] = k;
                mono[DELTA] = 8 * m;
                try {
                    Detected s2 = times(src, mono), t2 = times(tgt, mono);
                    if (s2.zero || t2.zero) continue;
                    const HiddenExtension* h = find(row.kind, s2);
                    if (h && !same_up_to_unit(h->target, t2)) {
                        rc.contradicted = true;
                        rc.detail = "translate " + str(s2) + " deduced to hit " + str(h->target) + ", table gives " + str(t2);
                    }
                } catch (const DegreeOutOfRange&) {
                } catch (const MissingActionMatrix&) {
                }
            }
        out.push_back(rc);
    }
    return out;
}

ScriptResult tau_squared_script(const Cofiber& cf, const SpectralSequence& truncated,
                                const std::vector<ExtensionRecord>& rows) {
    ScriptResult res;
    const E2Ring& ring = cf.ring();
    const auto& full = cf.sequence();
    auto word = [](const char* s) { return GeneratorWord::parse(s); };
    auto line = [&](std::string s) { res.steps.push_back(std::move(s)); };
    bool ok = true;

    // top cell of the cofiber of tau^2: d_{2r+1}(x) = tau^r y gives -tau^(r-2) y
    Element x1 = ring.evaluate(word("2*h2^1*Delta^7"));
    Element x2 = ring.evaluate(word("1*h1^3*Delta^7"));
    auto fd1 = full.first_differential(x1, 0);
    auto fd2 = full.first_differential(x2, 0);
    if (!fd1 || !fd2) {
        line("missing differential on 2Delta^7h2 or Delta^7h1^3");
        return res;
    }
    line("d" + std::to_string(fd1->r) + "(2Delta^7h2) = " + ring.str(fd1->y, (fd1->r - 1) / 2));
    line("d" + std::to_string(fd2->r) + "(Delta^7h1^3) = " + ring.str(fd2->y, (fd2->r - 1) / 2));
    Detected p1 = cf.detect(scaled(fd1->y, -1), (fd1->r - 1) / 2 - 2);
    Detected p2 = cf.detect(scaled(fd2->y, -1), 1 + (fd2->r - 1) / 2 - 2);
    line("top-cell images: 2Delta^7h2 -> " + cf.str(p1) + ", tau Delta^7h1^3 -> " + cf.str(p2));
    ok = ok && !p1.zero && !p2.zero;

    Element d7 = ring.evaluate(word("1*Delta^7"));
    auto fd_full = full.first_differential(d7, 0);
    auto fd_trunc = truncated.first_differential(d7, 0);
    line("Delta^7: d" + std::to_string(fd_full ? fd_full->r : 0) + " = " +
         (fd_full ? ring.str(fd_full->y, (fd_full->r - 1) / 2) : std::string("0")) + " integrally; " +
         (fd_trunc ? "supports a differential" : "permanent") + " modulo tau^2");
    ok = ok && fd_full && !fd_trunc;

    const ExtensionRecord* base = nullptr;
    for (const auto& r : rows)
        if (r.kind == "2" && r.source == word("2*h2^1") && r.target == word("1*tau^1*h1^3")) base = &r;
    if (!base) {
        line("the 3-stem 2 extension is not in the tables");
        return res;
    }
    const Page& te = truncated.einf();
    bool s_ok = te.is_cycle(x1, 0) && !te.is_boundary(x1, 0);
    bool t_ok = te.is_cycle(x2, 1) && !te.is_boundary(x2, 1);
    line(std::string("Delta^7 times (2h2 -> tau h1^3): 2Delta^7h2 ") + (s_ok ? "survives" : "vanishes") +
         ", tau Delta^7h1^3 " + (t_ok ? "survives" : "vanishes") + " modulo tau^2");
    ok = ok && s_ok && t_ok;

    Exps g3{};
    g3[G] = 3;
    try {
        res.source = cf.divide(p1, 4, g3);
        res.target = cf.divide(p2, 4, g3);
    } catch (const IsomorphismFailure& e) {
        line(std::string("division by tau^4 g^3 failed: ") + e.what());
        return res;
    }
    line("divide by tau^4 g^3: " + cf.str(res.source) + " -> " + cf.str(res.target));
    Detected want_s = cf.detect(word("1*d^1*Delta^4"));
    Detected want_t = cf.detect(word("1*tau^6*h1^2*g^3*Delta^2"));
    ok = ok && cf.same_up_to_unit(res.source, want_s) && cf.same_up_to_unit(res.target, want_t);
    res.ok = ok;
    return res;
}

}  // namespace mmfss
