#include "mmfss/homotopy.hpp"

#include <sstream>

namespace mmfss {

namespace {

constexpr int kDeltaStem = 24;

Exps mono(Gen g, int k) {
    Exps e{};
    e[g] = k;
    return e;
}

Element scaled(const Element& x, const LocalInt& c) {
    Element r = x;
    for (auto& v : r.c) v *= c;
    return r;
}

Detected negated(const Cofiber& cf, const Detected& x) {
    if (x.zero) return x;
    return cf.detect(scaled(x.value, -1), x.tau);
}

Detected zero_at(SlotKey k, int tau) {
    Detected d;
    d.key = k;
    d.tau = tau;
    return d;
}

int depth_max(const Cofiber& cf) {
    return static_cast<int>(cf.einf().slots.begin()->second.Z.size()) - 1;
}

// Moves every basis monomial of x by n powers of Delta.
Element shift_delta(const E2Ring& ring, const Element& x, int n) {
    SlotKey k{x.key.s + n * kDeltaStem, x.key.f};
    Element out = ring.zero(k);
    if (out.c.empty()) throw DegreeOutOfRange("no slot at " + k.str());
    const auto& ids = *ring.slot(x.key);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (x.c[i].is_zero()) continue;
        Exps e = ring.basis(ids[i]).e;
        e[DELTA] += n;
        auto id = e[DELTA] >= 0 ? ring.find(e) : std::nullopt;
        if (!id) throw DegreeOutOfRange("Delta shift leaves the basis at " + x.key.str());
        out.c[ring.basis(*id).index] += x.c[i];
    }
    return out;
}

// y = Delta^p * z with p = the common Delta exponent of x; checks x = Delta^p z.
std::pair<Element, int> split_delta(const E2Ring& ring, const Element& x) {
    int p = 1 << 20;
    const auto& ids = *ring.slot(x.key);
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!x.c[i].is_zero()) p = std::min(p, ring.basis(ids[i]).e[DELTA]);
    if (p == 1 << 20) return {x, 0};
    Element z = shift_delta(ring, x, -p);
    if (!ring.equal_in_e2(ring.multiply(mono(DELTA, p), z), x))
        throw std::logic_error("Delta does not act by exponent shift at " + x.key.str());
    return {z, p};
}

// Delta^n * z with n folded mod 8; the folded powers become M.
std::pair<Element, int> delta_times(const E2Ring& ring, int n, const Element& z) {
    int m = n / 8;
    return {ring.multiply(mono(DELTA, n % 8), z), m};
}

// Hidden 2 extensions whose g^k Delta^8m translate starts at stem s.
struct Translate {
    const ExtensionRecord* row;
    Exps factor;
};

std::vector<Translate> translates_at(const std::vector<ExtensionRecord>& ext, int s) {
    const int gstem = kGenerators[G + 1].degree.s;
    std::vector<Translate> out;
    for (const auto& r : ext) {
        if (r.kind != "2") continue;
        int s0 = degree_of_word(r.source).s;
        for (int m = 0; m <= 1; ++m)
            for (int k = 0; k <= 9; ++k)
                if (s0 + 8 * kDeltaStem * m + gstem * k == s) {
                    Exps f{};
                    f[G] = k;
                    f[DELTA] = 8 * m;
                    out.push_back({&r, f});
                }
    }
    return out;
}

Element translate(const E2Ring& ring, const GeneratorWord& w, const Exps& f) {
    GeneratorWord c = w;
    c.tau = 0;
    for (std::size_t i = 0; i < kNumGens; ++i) c.e[i] += f[i];
    TriDegree t = degree_of_word(c);
    if (!ring.in_range({t.s, t.f})) throw DegreeOutOfRange("translate outside the ring");
    return ring.evaluate(c);
}

struct Piece {
    int f;
    int depth;
    Subquotient sq;
    std::size_t offset;
};

HomotopyGroup assemble(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int s, std::optional<int> w) {
    const Page& p = cf.einf();
    const int dmax = depth_max(cf);
    HomotopyGroup out;
    out.s = s;
    out.w = w;

    std::vector<Piece> pieces;
    std::size_t n = 0;
    for (const auto& [key, st] : p.slots) {
        if (key.s != s || key.f > cf.ring().reliable_fmax()) continue;
        int d = dmax;
        if (w) {
            auto dd = p.depth_for(key, *w);
            if (!dd) continue;
            d = *dd;
        }
        Subquotient sq = p.subquotient_at(key, d);
        if (sq.group().is_trivial()) continue;
        pieces.push_back({key.f, d, sq, n});
        n += sq.group().divisors().size();
    }
    if (n == 0) return out;

    auto piece_of = [&](int f) -> const Piece* {
        for (const auto& pc : pieces)
            if (pc.f == f) return &pc;
        return nullptr;
    };
    auto exponent = [](const LocalGroup& g, std::size_t i) -> int {
        const mpz_class& d = g.divisors()[i];
        return d == 0 ? -1 : valuation(d);
    };

    std::vector<std::vector<LocalInt>> rels;
    const auto trs = translates_at(ext, s);
    for (const auto& pc : pieces) {
        const LocalGroup& g = pc.sq.group();
        const std::size_t k = g.divisors().size();
        // socle basis over F_2, table extensions first
        std::vector<std::vector<int>> basis;  // mod 2 vectors
        std::vector<int> pivots;
        auto reduce = [&](std::vector<int> v) {
            for (std::size_t b = 0; b < basis.size(); ++b)
                if (v[pivots[b]])
                    for (std::size_t i = 0; i < k; ++i) v[i] ^= basis[b][i];
            return v;
        };
        auto accept = [&](const std::vector<int>& v) {
            auto r = reduce(v);
            for (std::size_t i = 0; i < k; ++i)
                if (r[i]) {
                    basis.push_back(r);
                    pivots.push_back(static_cast<int>(i));
                    return true;
                }
            return false;
        };

        for (const auto& t : trs) {
            SlotKey sk{s, degree_of_word(t.row->source).f + degree_of_exps(t.factor).f};
            if (sk.f != pc.f) continue;
            Element bx, cx;
            try {
                bx = translate(cf.ring(), t.row->source, t.factor);
                cx = translate(cf.ring(), t.row->target, t.factor);
            } catch (const DegreeOutOfRange&) {
                continue;
            }
            int shift = pc.depth - t.row->source.tau;
            if (w && shift < 0) continue;
            const Piece* tp = piece_of(cx.key.f);
            if (!tp) continue;
            if (!cf.einf().is_cycle(bx, pc.depth) || !cf.einf().is_cycle(cx, tp->depth)) continue;
            if (cf.detect(bx, pc.depth).zero || cf.detect(cx, tp->depth).zero) continue;
            if (cx.key.f <= pc.f) throw ExtensionCycle("2 extension from " + sk.str() + " does not raise filtration");
            auto beta = pc.sq.class_of(bx.c);
            std::vector<int> v(k, 0);
            std::vector<LocalInt> u(k, 0);
            bool torsion = true;
            for (std::size_t i = 0; i < k; ++i) {
                if (beta[i].is_zero()) continue;
                int e = exponent(g, i);
                if (e < 0 || beta[i].valuation() < e - 1) {
                    torsion = false;
                    break;
                }
                u[i] = LocalInt(mpq_class(beta[i].value() / mpq_class(mpz_class(mpz_class(1) << (e - 1)))));
                v[i] = u[i].valuation() == 0 ? 1 : 0;
            }
            if (!torsion || !accept(v)) continue;
            std::vector<LocalInt> rel(n, 0);
            for (std::size_t i = 0; i < k; ++i)
                if (!u[i].is_zero()) rel[pc.offset + i] = u[i] * two_pow(exponent(g, i));
            auto gamma = tp->sq.class_of(cx.c);
            for (std::size_t i = 0; i < gamma.size(); ++i) rel[tp->offset + i] -= gamma[i];
            rels.push_back(rel);
        }
        for (std::size_t i = 0; i < k; ++i) {
            int e = exponent(g, i);
            if (e < 0) continue;
            std::vector<int> v(k, 0);
            v[i] = 1;
            if (!accept(v)) continue;
            std::vector<LocalInt> rel(n, 0);
            rel[pc.offset + i] = two_pow(e);
            rels.push_back(rel);
        }
    }

    IntMatrix rel = IntMatrix::from_columns(rels, n);
    out.group = subquotient(n, IntMatrix::identity(n), rel).group();

    auto glyphs = cf.sequence().classes(p, s, cf.ring().fmax());
    for (const auto& pc : pieces) {
        std::ostringstream os;
        os << "f=" << pc.f << " " << pc.sq.group().str() << ":";
        for (const auto& gl : glyphs) {
            if (gl.s != s || gl.f != pc.f) continue;
            int d0 = gl.label.tau;
            if (w) {
                if (pc.depth < d0 || (gl.tau_order && pc.depth >= d0 + *gl.tau_order && pc.depth < dmax)) continue;
                if (gl.tau_order && pc.depth == dmax) continue;
            } else if (gl.tau_order) {
                continue;
            }
            GeneratorWord lw = gl.label;
            lw.tau = w ? pc.depth : 0;
            os << " " << lw.pretty();
        }
        out.pieces.push_back(os.str());
    }
    return out;
}

}  // namespace

HomotopyGroup assemble_homotopy_group(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int s, int w) {
    return assemble(cf, ext, s, w);
}

HomotopyGroup assemble_classical(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int s) {
    return assemble(cf, ext, s, std::nullopt);
}

std::map<int, LocalGroup> classicalize(const Cofiber& cf, int s) {
    std::map<int, LocalGroup> out;
    const int dmax = depth_max(cf);
    for (const auto& [key, st] : cf.einf().slots) {
        if (key.s != s || key.f > cf.ring().reliable_fmax()) continue;
        LocalGroup g = cf.einf().subquotient_at(key, dmax).group();
        if (!g.is_trivial()) out[key.f] = g;
    }
    return out;
}

Detected times_two(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, const Detected& x) {
    if (x.zero) return x;
    Detected y = cf.times(x, Exps{}, 0, 2);
    if (!y.zero) return y;
    for (const auto& t : translates_at(ext, x.key.s)) {
        if (degree_of_word(t.row->source).f + degree_of_exps(t.factor).f != x.key.f) continue;
        int shift = x.tau - t.row->source.tau;
        if (shift < 0) continue;
        Detected b, c;
        try {
            b = cf.detect(translate(cf.ring(), t.row->source, t.factor), x.tau);
            c = cf.detect(translate(cf.ring(), t.row->target, t.factor), t.row->target.tau + shift);
        } catch (const DegreeOutOfRange&) {
            continue;
        }
        if (b.zero) continue;
        for (long u : {1L, -1L, 3L, -3L, 5L, -5L, 7L, -7L})
            if (cf.detect(Element{x.key, [&] {
                              std::vector<LocalInt> d = x.value.c;
                              for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b.value.c[i] * LocalInt(u);
                              return d;
                          }()},
                          x.tau)
                    .zero)
                return c.zero ? c : cf.detect(scaled(c.value, u), c.tau);
    }
    return zero_at({x.key.s, x.key.f + 1}, x.tau);
}

Periodic q_delta_power(const Cofiber& cf, int k) {
    int n = k + 1;
    Periodic out;
    out.m = n / 8;
    n %= 8;
    GeneratorWord w;
    w.e[DELTA] = n;
    out.cls = cf.projection_q(cf.ring().evaluate(w));
    return out;
}

NuElement nu_detect(const Cofiber& cf, int k) {
    NuElement out;
    out.k = k;
    Periodic q = q_delta_power(cf, k);
    out.detecting.m = q.m;
    if (q.cls.zero) {
        out.detecting.cls = zero_at({24 * (k % 8) + 3, 1}, 0);
        return out;
    }
    // q(Delta^(k+1)) = -tau kbar nu_k
    out.detecting.cls = cf.divide(negated(cf, q.cls), 1, mono(G, 1));
    out.filtration = out.detecting.cls.zero ? 0 : out.detecting.cls.key.f;
    return out;
}

namespace {

// x = Delta^n * z: q(x) / (-tau^t kbar), with the Delta^8 part split off as M.
Periodic divided_q(const Cofiber& cf, int n, const Element& z, int t) {
    auto [x, m] = delta_times(cf.ring(), n, z);
    Periodic out;
    out.m = m;
    Detected q = cf.projection_q(x);
    if (q.zero) {
        out.cls = q;
        return out;
    }
    out.cls = cf.divide(negated(cf, q), t, mono(G, 1));
    return out;
}

Periodic times_int(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, Periodic p, long c) {
    int v = 0;
    while (c % 2 == 0) {
        c /= 2;
        ++v;
    }
    if (!p.cls.zero) p.cls = cf.times(p.cls, Exps{}, 0, c);
    for (int i = 0; i < v; ++i) p.cls = times_two(cf, ext, p.cls);
    return p;
}

bool same(const Cofiber& cf, const Periodic& a, const Periodic& b) {
    if (a.cls.zero || b.cls.zero) return a.cls.zero && b.cls.zero;
    return a.m == b.m && cf.same(a.cls, b.cls);
}

Periodic product_lhs(const Cofiber& cf, int j, int k) {
    const int jr = j % 8, kr = k % 8, m0 = j / 8 + k / 8;
    NuElement nk = nu_detect(cf, kr);
    Periodic out;
    if (nk.filtration == 0) {
        out.cls = zero_at({24 * (jr + kr) + 6, 2}, 0);
        return out;
    }
    // nu_j nu_k = q(Delta^(j+1) i(nu_k)) / (-tau kbar), or / (-kbar) when nu_k = tau alpha
    auto [z, p] = split_delta(cf.ring(), nk.detecting.cls.value);
    out = divided_q(cf, jr + 1 + p, z, nk.filtration == 1 ? 1 : 0);
    out.m += m0 + nk.detecting.m;
    return out;
}

}  // namespace

NuProduct nu_product(const Cofiber& cf, const std::vector<ExtensionRecord>& ext, int j, int k) {
    NuProduct out;
    out.j = j;
    out.k = k;
    out.coeff = k + 1;
    out.lhs = product_lhs(cf, j, k);
    // nu_{j+k} nu_0 = q(Delta^(j+k+1) h2) / (-tau kbar)
    const int jr = j % 8, kr = k % 8;
    Periodic base = divided_q(cf, jr + kr + 1, cf.ring().evaluate(GeneratorWord::parse("1*h2^1")), 1);
    base.m += j / 8 + k / 8;
    out.rhs = times_int(cf, ext, base, out.coeff);
    out.law = same(cf, out.lhs, out.rhs);
    return out;
}

std::vector<Identity> nu_identities(const Cofiber& cf, const std::vector<ExtensionRecord>& ext) {
    std::vector<Identity> out;
    auto record = [&](std::string name, const Periodic& a, const Periodic& b) {
        Identity id{std::move(name), same(cf, a, b), str(cf, a) + " vs " + str(cf, b)};
        out.push_back(id);
    };

    NuElement n7 = nu_detect(cf, 7);
    out.push_back({"nu7 = 0", n7.filtration == 0, str(cf, n7.detecting)});

    // D_4 is detected by 2 Delta^4
    Periodic nu_d4 = divided_q(cf, 5, cf.ring().evaluate(GeneratorWord::parse("2")), 1);
    record("nu0 D4 = 2 nu4", nu_d4, times_int(cf, ext, nu_detect(cf, 4).detecting, 2));

    Periodic n06 = product_lhs(cf, 0, 6);
    record("nu1 nu5 = 2 nu0 nu6", product_lhs(cf, 1, 5), times_int(cf, ext, n06, 2));
    record("nu2 nu4 = 3 nu0 nu6", product_lhs(cf, 2, 4), times_int(cf, ext, n06, 3));

    Periodic n02 = product_lhs(cf, 0, 2);
    n02.m += 1;
    record("nu4 nu6 = nu nu2 M", product_lhs(cf, 4, 6), n02);
    return out;
}

std::string str(const Cofiber& cf, const Periodic& p) {
    if (p.cls.zero) return "0";
    std::string s = cf.str(p.cls);
    if (p.m == 1) s += " M";
    if (p.m > 1) s += " M^" + std::to_string(p.m);
    return s;
}

}  // namespace mmfss
