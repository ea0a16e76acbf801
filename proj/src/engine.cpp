#include "mmfss/engine.hpp"

#include <algorithm>
#include <functional>

namespace mmfss {

namespace {

constexpr int kMaxCoeff = 8;  // labels 2^a e_i with a above this are treated as absent

Lattice::Vec unit_vec(std::size_t n, int i, int a) {
    Lattice::Vec v(n, 0);
    v[i] = mpz_class(1) << a;
    return v;
}

Lattice::Vec scaled_vec(const Element& x) { return integral_multiple(x.c); }

// Odometer over 0 <= e1 <= e, last coordinate fastest, skipping 0 and e.
void for_each_split(const Exps& e, const std::function<bool(const Exps&)>& fn) {
    Exps cur{};
    for (;;) {
        bool trivial = true, whole = true;
        for (std::size_t i = 0; i < kNumGens; ++i) {
            if (cur[i]) trivial = false;
            if (cur[i] != e[i]) whole = false;
        }
        if (!trivial && !whole && fn(cur)) return;
        int i = static_cast<int>(kNumGens) - 1;
        while (i >= 0 && cur[i] == e[i]) cur[i--] = 0;
        if (i < 0) return;
        ++cur[i];
    }
}

Element scale(const Element& x, const LocalInt& c) {
    Element r = x;
    for (auto& v : r.c) v *= c;
    return r;
}

void add_into(Element& acc, const Element& x, const LocalInt& c) {
    if (x.c.empty()) return;
    for (std::size_t i = 0; i < x.c.size(); ++i)
        if (!x.c[i].is_zero()) acc.c[i] += x.c[i] * c;
}

}  // namespace

const char* to_string(DiffSource s) {
    switch (s) {
        case DiffSource::Zero: return "zero";
        case DiffSource::Seed: return "seed";
        case DiffSource::Leibniz: return "leibniz";
        case DiffSource::Power: return "power";
    }
    return "?";
}

// ----------------------------------------------------------------------- Page

const SlotState* Page::state(SlotKey k) const {
    auto it = slots.find(k);
    return it == slots.end() ? nullptr : &it->second;
}

bool Page::stable_below(SlotKey k) const {
    const SlotState* st = state(k);
    if (!st || truncate) return true;
    std::size_t n = st->Z.size();
    if (n < 2) return true;
    return *st->Z[n - 1] == *st->Z[n - 2] && *st->B[n - 1] == *st->B[n - 2];
}

std::optional<int> Page::depth_for(SlotKey k, int w) const {
    if ((k.s + k.f) % 2) return std::nullopt;
    int top = (k.s + k.f) / 2;
    if (w > top || !state(k)) return std::nullopt;
    int depth = top - w;
    int dmax = static_cast<int>(state(k)->Z.size()) - 1;
    if (truncate && depth >= truncate) return std::nullopt;
    if (depth > dmax) {
        if (!stable_below(k)) throw WindowViolation("slot " + k.str() + " is not stable below the window");
        depth = dmax;
    }
    return depth;
}

Subquotient Page::subquotient_at(SlotKey k, int depth) const {
    const SlotState* st = state(k);
    std::size_t n = ring->slot_size(k);
    return subquotient(n, st->Z.at(depth)->as_columns(), st->B.at(depth)->as_columns());
}

LocalGroup Page::group(int s, int f, int w) const {
    auto d = depth_for({s, f}, w);
    if (!d) return LocalGroup();
    return subquotient_at({s, f}, *d).group();
}

bool Page::is_cycle(const Element& x, int depth) const {
    if (x.is_zero()) return true;
    const SlotState* st = state(x.key);
    if (!st) return true;
    if (truncate && depth >= truncate) return true;
    int d = std::min<int>(depth, static_cast<int>(st->Z.size()) - 1);
    return st->Z[d]->contains(scaled_vec(x));
}

bool Page::is_boundary(const Element& x, int depth) const {
    if (x.is_zero()) return true;
    const SlotState* st = state(x.key);
    if (!st) return true;
    if (truncate && depth >= truncate) return true;
    int d = std::min<int>(depth, static_cast<int>(st->B.size()) - 1);
    return st->B[d]->contains(scaled_vec(x));
}

std::optional<int> Page::tau_order(const Element& x, int depth) const {
    const SlotState* st = state(x.key);
    if (!st) return 0;
    int dmax = static_cast<int>(st->B.size()) - 1;
    for (int d = depth; d <= dmax; ++d)
        if (is_boundary(x, d)) return d - depth;
    if (truncate) return truncate - depth;
    return std::nullopt;
}

// ----------------------------------------------------------------- LayerEntry

Element LayerEntry::apply(const E2Ring& ring, const Lattice::Vec& z) const {
    Element y = ring.zero(tgt);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (sgn(z[i]) == 0) continue;
        const LabelDiff& l = labels.at(i);
        if (l.a < 0) throw InconsistentDifferential("vector outside the cycle lattice at " + src.str());
        if (l.value.c.empty() || l.value.is_zero()) continue;
        LocalInt c = divide(LocalInt(z[i]), two_pow(static_cast<unsigned>(l.a)));
        add_into(y, l.value, c);
    }
    return y;
}

std::vector<std::pair<int, Element>> LayerEntry::reduced_values(const E2Ring& ring) const {
    std::vector<std::pair<int, Element>> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& l = labels[i];
        if (l.value.c.empty() || l.value.is_zero()) continue;
        if (target_boundaries->contains(scaled_vec(l.value))) continue;
        out.emplace_back(static_cast<int>(i), ring.reduced(l.value));
    }
    return out;
}

const LayerEntry* DifferentialLayer::entry(SlotKey src) const {
    auto it = entries.find(src);
    return it == entries.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------- SpectralSequence

SpectralSequence::SpectralSequence(const E2Ring& ring, const std::vector<DifferentialRecord>& seeds, EngineOptions opt)
    : ring_(ring), opt_(opt) {
    depth_max_ = opt_.truncate > 0 ? opt_.truncate - 1 : opt_.window;
    for (const auto& rec : seeds) {
        if (rec.r % 2 == 0 || rec.r < 3) throw std::invalid_argument("even or short seed differential d" + std::to_string(rec.r));
        TriDegree sd = degree_of_word(rec.source);
        if (sd.s > opt_.smax + 1 || !ring_.in_range({sd.s, sd.f})) continue;
        Element src = ring_.evaluate(rec.source);
        int nz = -1, count = 0;
        for (std::size_t i = 0; i < src.c.size(); ++i)
            if (!src.c[i].is_zero()) nz = static_cast<int>(i), ++count;
        if (count != 1) throw UnresolvedSeed("seed source " + rec.source.str() + " is not a multiple of a basis class");
        Seed s;
        s.r = rec.r;
        s.key = src.key;
        s.index = nz;
        s.coeff = src.c[nz];
        s.target = ring_.evaluate(rec.target.monomial());
        s.target = scale(s.target, LocalInt(rec.target.coeff));
        s.tau = rec.target.tau;
        if (s.target.key != SlotKey{src.key.s - 1, src.key.f + rec.r})
            throw UnresolvedSeed("seed target " + rec.target.str() + " is in the wrong degree");
        const Exps& e = ring_.basis(ring_.slot(src.key)->at(nz)).e;
        s.pure_delta = true;
        for (std::size_t g = 0; g < kNumGens; ++g)
            if (g != DELTA && e[g]) s.pure_delta = false;
        s.delta_power = e[DELTA];
        seeds_.push_back(s);
    }
    Page p;
    p.r = 2;
    p.window = opt_.window;
    p.truncate = opt_.truncate;
    p.ring = &ring_;
    for (const auto& [key, ids] : ring_.slots()) {
        // differentials into stem smax start one stem higher
        if (key.s > opt_.smax + 1) continue;
        auto full = std::make_shared<const Lattice>(Lattice::full(ids.size()));
        auto rel = std::make_shared<const Lattice>(ring_.relations(key));
        SlotState st;
        st.Z.assign(depth_max_ + 1, full);
        st.B.assign(depth_max_ + 1, rel);
        p.slots.emplace(key, std::move(st));
    }
    pages_.push_back(std::move(p));
}

const Page& SpectralSequence::page_at(int r) const {
    if (r <= 3) return pages_.front();
    int want = r % 2 ? r : r + 1;
    for (const auto& p : pages_)
        if (p.r >= want) return p;
    return pages_.back();
}

int SpectralSequence::min_coeff(const Lattice& z, std::size_t n, int i) const {
    for (int a = 0; a <= kMaxCoeff; ++a)
        if (z.contains(unit_vec(n, i, a))) return a;
    return -1;
}

std::vector<int> SpectralSequence::labels(SlotKey key, const Lattice& z) const {
    std::size_t n = ring_.slot_size(key);
    std::vector<int> out(n);
    Lattice span(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = min_coeff(z, n, static_cast<int>(i));
        if (out[i] >= 0) span.insert(unit_vec(n, static_cast<int>(i), out[i]));
    }
    if (!(span == z)) throw NonMonomialCycle("cycles at " + key.str() + " are not spanned by multiples of basis classes");
    return out;
}

std::optional<int> SpectralSequence::min_depth(SlotKey key, const Lattice::Vec& v) const {
    const SlotState* st = cur_->state(key);
    for (int d = 0; d <= depth_max_; ++d)
        if (st->Z[d]->contains(v)) return d;
    return std::nullopt;
}

bool SpectralSequence::same_in_target(const Element& a, const Element& b, SlotKey tkey) const {
    Element diff = ring_.zero(tkey);
    add_into(diff, a, 1);
    add_into(diff, b, -1);
    if (diff.is_zero()) return true;
    return cur_->state(tkey)->B[depth_max_]->contains(scaled_vec(diff));
}

std::optional<Element> SpectralSequence::split_value(SlotKey key, int i, int a, const Exps& e1, int sign_mode,
                                                     bool* valid) {
    *valid = false;
    const Exps& e = ring_.basis(ring_.slot(key)->at(i)).e;
    Exps e2{};
    for (std::size_t g = 0; g < kNumGens; ++g) e2[g] = e[g] - e1[g];
    auto id1 = ring_.find(e1), id2 = ring_.find(e2);
    if (!id1 || !id2) return std::nullopt;
    const BasisElement& b1 = ring_.basis(*id1);
    const BasisElement& b2 = ring_.basis(*id2);
    if (!cur_->state(b1.key) || !cur_->state(b2.key)) return std::nullopt;
    std::size_t n1 = ring_.slot_size(b1.key), n2 = ring_.slot_size(b2.key);
    auto key_of = [&](const BasisElement& b) { return label_cache_.find(b.key); };
    auto it1 = key_of(b1), it2 = key_of(b2);
    int a1 = it1 != label_cache_.end() ? it1->second[b1.index]
                                       : min_coeff(*cur_->state(b1.key)->Z[depth_max_], n1, b1.index);
    int a2 = it2 != label_cache_.end() ? it2->second[b2.index]
                                       : min_coeff(*cur_->state(b2.key)->Z[depth_max_], n2, b2.index);
    if (a1 < 0 || a2 < 0) return std::nullopt;
    const Element& prod = ring_.basis_product(*id1, *id2);
    for (std::size_t t = 0; t < prod.c.size(); ++t)
        if (static_cast<int>(t) != i && !prod.c[t].is_zero()) return std::nullopt;
    if (prod.c.empty() || prod.key != key) return std::nullopt;
    LocalInt u = prod.c[i];
    const auto& ord = ring_.basis(ring_.slot(key)->at(i)).order;
    if (ord) u = LocalInt(u.residue(*ord));
    if (u.is_zero()) return std::nullopt;
    int vu = u.valuation();
    int need = a1 + a2 + vu;
    if (need > a) return std::nullopt;
    std::size_t n = ring_.slot_size(key);
    auto dw = min_depth(key, unit_vec(n, i, a));
    auto d1 = min_depth(b1.key, unit_vec(n1, b1.index, a1));
    auto d2 = min_depth(b2.key, unit_vec(n2, b2.index, a2));
    if (!dw || !d1 || !d2 || *d1 + *d2 > *dw) return std::nullopt;
    const Memo& m1 = diff_label(b1.key, b1.index, a1);
    if (!m1.done) return std::nullopt;
    Element y1 = m1.value;
    const Memo& m2 = diff_label(b2.key, b2.index, a2);
    if (!m2.done) return std::nullopt;
    Element y2 = m2.value;

    SlotKey tkey{key.s - 1, key.f + cur_r_};
    Element t = ring_.zero(tkey);
    if (!y1.c.empty() && !y1.is_zero()) {
        // d(U) V = (-1)^{s(dU) s(V)} V d(U)
        Element part = ring_.multiply(e2, y1);
        int sign = sign_mode == 0 ? koszul_sign(y1.key.s, b2.key.s) : 1;
        add_into(t, part, LocalInt(sign) * two_pow(static_cast<unsigned>(a2)));
    }
    if (!y2.c.empty() && !y2.is_zero()) {
        Element part = ring_.multiply(e1, y2);
        int sign = sign_mode == 0 ? koszul_sign(-1, b1.key.s) : 1;
        add_into(t, part, LocalInt(sign) * two_pow(static_cast<unsigned>(a1)));
    }
    LocalInt sc = divide(two_pow(static_cast<unsigned>(a - need)), u.odd_part());
    *valid = true;
    return scale(t, sc);
}

const SpectralSequence::Memo& SpectralSequence::diff_label(SlotKey key, int i, int a) {
    auto mk = std::make_tuple(key.s, key.f, i, a);
    Memo& m = memo_[mk];
    if (m.done || m.busy) return m;
    m.busy = true;
    SlotKey tkey{key.s - 1, key.f + cur_r_};
    Element res;
    DiffSource src = DiffSource::Zero;
    int seed_used = -1;
    std::size_t n = ring_.slot_size(key);
    if (!cur_->state(tkey)) {
        res = ring_.zero(tkey);
    } else if (cur_->state(key)->B[depth_max_]->contains(unit_vec(n, i, a))) {
        res = ring_.zero(tkey);
    } else {
        const Exps& e = ring_.basis(ring_.slot(key)->at(i)).e;
        std::optional<Element> found;
        Exps used{};
        for_each_split(e, [&](const Exps& e1) {
            bool valid = false;
            auto y = split_value(key, i, a, e1, 0, &valid);
            if (!valid) return false;
            found = *y;
            used = e1;
            return true;
        });
        if (found) {
            res = *found;
            src = DiffSource::Leibniz;
            bool valid = false;
            auto alt = split_value(key, i, a, used, 1, &valid);
            if (valid && !alt->is_zero() && !res.is_zero() && !same_in_target(*alt, res, tkey))
                flags_.push_back("SignSensitive d" + std::to_string(cur_r_) + " at " + ring_.label(key, i).str());
            if (opt_.verify_splits)
                for_each_split(e, [&](const Exps& e1) {
                    bool ok = false;
                    auto y = split_value(key, i, a, e1, 0, &ok);
                    if (ok && !same_in_target(*y, res, tkey))
                        flags_.push_back("LeibnizConflict d" + std::to_string(cur_r_) + " at " + ring_.label(key, i).str());
                    return false;
                });
        }
        if (!found) {
            for (std::size_t si = 0; si < seeds_.size(); ++si) {
                const Seed& s = seeds_[si];
                if (s.r != cur_r_ || s.key != key || s.index != i) continue;
                int vc = s.coeff.valuation();
                if (vc > a) continue;
                if (s.tau != cur_k_) throw UnresolvedSeed("seed tau power does not match its page");
                res = scale(s.target, divide(two_pow(static_cast<unsigned>(a - vc)), s.coeff.odd_part()));
                src = DiffSource::Seed;
                seed_used = static_cast<int>(si);
                found = res;
                break;
            }
        }
        bool pure = true;
        for (std::size_t g = 0; g < kNumGens; ++g)
            if (g != DELTA && e[g]) pure = false;
        if (!found && pure && e[DELTA] > 0) {
            int m = e[DELTA];
            for (const Seed& s : seeds_) {
                if (s.r != cur_r_ || !s.pure_delta || s.delta_power > m) continue;
                LocalInt num = two_pow(static_cast<unsigned>(a)) * LocalInt(m);
                LocalInt den = s.coeff * LocalInt(s.delta_power);
                if (num.valuation() < den.valuation()) continue;
                Exps shift{};
                shift[DELTA] = m - s.delta_power;
                Element moved = ring_.multiply(shift, s.target);
                res = scale(moved, divide(num, den));
                src = DiffSource::Power;
                found = res;
                break;
            }
        }
        if (!found) res = ring_.zero(tkey);
        if (src != DiffSource::Seed)
            for (std::size_t si = 0; si < seeds_.size(); ++si) {
                const Seed& s = seeds_[si];
                if (s.r == cur_r_ && s.key == key && s.index == i && s.coeff.valuation() <= a && src != DiffSource::Zero)
                    flags_.push_back("DecomposableSeed " + std::to_string(si));
            }
    }
    Memo& done = memo_[mk];
    done.value = std::move(res);
    done.source = src;
    done.seed = seed_used;
    done.done = true;
    done.busy = false;
    return done;
}

void SpectralSequence::turn(int r) {
    const int k = (r - 1) / 2;
    cur_r_ = r;
    cur_k_ = k;
    cur_ = &pages_.back();
    memo_.clear();
    label_cache_.clear();
    DifferentialLayer layer;
    layer.r = r;

    for (const auto& [key, st] : cur_->slots) label_cache_[key] = labels(key, *st.Z[depth_max_]);

    for (const auto& [key, st] : cur_->slots) {
        SlotKey tkey{key.s - 1, key.f + r};
        if (!cur_->state(tkey)) continue;
        const auto& labs = label_cache_[key];
        LayerEntry entry;
        entry.src = key;
        entry.tgt = tkey;
        entry.target_boundaries = cur_->state(tkey)->B[depth_max_];
        bool any = false;
        for (std::size_t i = 0; i < labs.size(); ++i) {
            LabelDiff ld;
            ld.a = labs[i];
            if (labs[i] >= 0) {
                const Memo& m = diff_label(key, static_cast<int>(i), labs[i]);
                ld.value = m.value;
                ld.source = m.source;
                ld.seed = m.seed;
                if (!ld.value.c.empty() && !ring_.reduced(ld.value).is_zero()) any = true;
            }
            entry.labels.push_back(std::move(ld));
        }
        if (any) layer.entries.emplace(key, std::move(entry));
    }

    // next page
    std::map<SlotKey, SlotState> next = cur_->slots;
    const int W = depth_max_;
    // the boundary tau^k y must land strictly inside the window
    if (!opt_.truncate && k >= W)
        for (const auto& [key, entry] : layer.entries)
            if (!entry.reduced_values(ring_).empty())
                throw WindowViolation("d" + std::to_string(r) + " at " + key.str() + " needs a window deeper than " +
                                      std::to_string(opt_.window));
    for (const auto& [key, entry] : layer.entries) {
        const SlotState& src = cur_->slots.at(key);
        const SlotState& tgt = cur_->slots.at(entry.tgt);
        const std::size_t n = ring_.slot_size(key), nt = ring_.slot_size(entry.tgt);
        const LayerEntry* second = layer.entry(entry.tgt);
        std::map<std::pair<const Lattice*, const Lattice*>, LatticePtr> kernel_cache;
        for (int dd = 0; dd <= W; ++dd) {
            int td = dd + k;
            bool beyond = opt_.truncate > 0 && td >= opt_.truncate;
            td = std::min(td, W);
            const Lattice& Zd = *src.Z[dd];
            for (const auto& z : Zd.generators()) {
                Element y = entry.apply(ring_, z);
                if (beyond) continue;
                if (!tgt.Z[td]->contains(scaled_vec(y)))
                    throw InconsistentDifferential("d" + std::to_string(r) + " on " + key.str() + " depth " +
                                                   std::to_string(dd) + " leaves the target cycles");
                if (second) {
                    int t2 = dd + 2 * k;
                    bool beyond2 = opt_.truncate > 0 && t2 >= opt_.truncate;
                    t2 = std::min(t2, W);
                    Element yy = second->apply(ring_, scaled_vec(y));
                    ++dd_checks_;
                    if (!beyond2 && !cur_->state(second->tgt)->B[t2]->contains(scaled_vec(yy)))
                        throw InconsistentDifferential("d" + std::to_string(r) + " composed with itself is nonzero on " +
                                                       key.str());
                }
            }
            if (beyond) continue;
            for (const auto& b : src.B[dd]->generators()) {
                Element y = entry.apply(ring_, b);
                if (!tgt.B[td]->contains(scaled_vec(y)))
                    throw InconsistentDifferential("d" + std::to_string(r) + " is not defined on boundaries at " + key.str());
            }
            auto ck = std::make_pair(src.Z[dd].get(), tgt.B[td].get());
            auto hit = kernel_cache.find(ck);
            if (hit != kernel_cache.end()) {
                next[key].Z[dd] = hit->second;
                continue;
            }
            Lattice big(nt + n);
            for (const auto& z : Zd.generators()) {
                Element y = entry.apply(ring_, z);
                std::vector<LocalInt> row(y.c);
                for (const auto& x : z) row.emplace_back(x);
                big.insert(integral_multiple(row));
            }
            for (const auto& b : tgt.B[td]->generators()) {
                Lattice::Vec row = b;
                row.resize(nt + n, 0);
                big.insert(row);
            }
            Lattice ker(n);
            for (auto row : big.generators_from(nt)) ker.insert(Lattice::Vec(row.begin() + nt, row.end()));
            LatticePtr kp = ker == Zd ? src.Z[dd] : std::make_shared<const Lattice>(std::move(ker));
            kernel_cache.emplace(ck, kp);
            next[key].Z[dd] = kp;
        }
        SlotState& nt_state = next[entry.tgt];
        for (int dd = k; dd <= W; ++dd) {
            Lattice nb = *tgt.B[dd];
            bool changed = false;
            for (const auto& z : src.Z[dd - k]->generators()) {
                Lattice::Vec y = scaled_vec(entry.apply(ring_, z));
                if (!nb.contains(y)) {
                    nb.insert(y);
                    changed = true;
                }
            }
            if (changed) nt_state.B[dd] = std::make_shared<const Lattice>(std::move(nb));
        }
    }
    Page np;
    np.r = r + 2;
    np.window = opt_.window;
    np.truncate = opt_.truncate;
    np.ring = &ring_;
    np.slots = std::move(next);
    layers_.emplace(r, std::move(layer));
    pages_.push_back(std::move(np));
    cur_ = nullptr;
}

void SpectralSequence::check_window(int r) const {
    if (opt_.truncate) return;
    const Page& p = pages_.back();
    for (const auto& [key, st] : p.slots)
        if (!p.stable_below(key))
            throw WindowViolation("after d" + std::to_string(r) + ", slot " + key.str() +
                                  " still changes at the bottom of the window");
}

void SpectralSequence::run() {
    for (int r = 3; r <= opt_.last_page; r += 2) {
        turn(r);
        check_window(r);
    }
    // one more page to confirm nothing longer exists
    int r = opt_.last_page + 2;
    turn(r);
    const auto& extra = layers_.at(r);
    for (const auto& [key, e] : extra.entries)
        if (!e.reduced_values(ring_).empty())
            throw UnexpectedSurvivor("a d" + std::to_string(r) + " differential is forced at " + key.str());
    layers_.erase(r);
    pages_.pop_back();
}

std::vector<DifferentialFact> SpectralSequence::differentials() const {
    std::vector<DifferentialFact> out;
    for (const auto& [r, layer] : layers_)
        for (const auto& [key, e] : layer.entries) {
            if (key.s > opt_.smax) continue;
            for (const auto& [i, y] : e.reduced_values(ring_)) {
                const auto& l = e.labels[i];
                GeneratorWord w = ring_.label(key, i);
                w.coeff = 1L << l.a;
                out.push_back({r, key, w, y, l.source, l.seed});
            }
        }
    return out;
}

std::vector<int> SpectralSequence::decomposable_seeds() const {
    std::vector<int> out;
    for (const auto& f : flags_)
        if (f.rfind("DecomposableSeed ", 0) == 0) out.push_back(std::stoi(f.substr(17)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> SpectralSequence::unused_seeds() const {
    std::vector<bool> used(seeds_.size(), false);
    for (const auto& [r, layer] : layers_)
        for (const auto& [key, e] : layer.entries)
            for (const auto& l : e.labels)
                if (l.source == DiffSource::Seed && l.seed >= 0) used[l.seed] = true;
    std::vector<int> out;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (!used[i]) out.push_back(static_cast<int>(i));
    return out;
}

Element SpectralSequence::d(int r, const Element& x) const {
    SlotKey tkey{x.key.s - 1, x.key.f + r};
    auto it = layers_.find(r);
    if (it == layers_.end()) return ring_.zero(tkey);
    const LayerEntry* e = it->second.entry(x.key);
    if (!e || x.is_zero()) return ring_.zero(tkey);
    mpz_class l = 1;
    for (const auto& c : x.c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.denominator().get_mpz_t());
    Element y = e->apply(ring_, integral_multiple(x.c));
    return scale(y, LocalInt(mpq_class(1, l)));
}

std::optional<SpectralSequence::FirstDiff> SpectralSequence::first_differential(const Element& x, int depth) const {
    if (x.is_zero()) return std::nullopt;
    for (std::size_t pi = 0; pi + 1 < pages_.size(); ++pi) {
        const Page& p = pages_[pi];
        const Page& nxt = pages_[pi + 1];
        int r = nxt.r - 2;
        if (p.is_boundary(x, depth)) return std::nullopt;
        if (!p.is_cycle(x, depth)) return std::nullopt;
        if (!nxt.is_cycle(x, depth)) return FirstDiff{r, d(r, x)};
    }
    return std::nullopt;
}

// ------------------------------------------------------------------- glyphs

std::vector<EinfRecord> SpectralSequence::classes(const Page& p, int smax, int fmax) const {
    std::vector<EinfRecord> out;
    const int W = static_cast<int>(p.slots.begin()->second.Z.size()) - 1;
    for (const auto& [key, st] : p.slots) {
        if (key.s > smax || key.f > fmax) continue;
        const std::size_t n = ring_.slot_size(key);
        const auto* ids = ring_.slot(key);
        if (key.f == 0) {
            auto labs = labels(key, *st.Z[W]);
            for (std::size_t i = 0; i < n; ++i) {
                if (ring_.basis((*ids)[i]).order || labs[i] < 0) continue;
                EinfRecord rec;
                rec.s = key.s;
                rec.f = key.f;
                rec.box = true;
                rec.label = ring_.label((*ids)[i]);
                rec.label.coeff = 1L << labs[i];
                out.push_back(rec);
            }
            continue;
        }
        bool trivial = true;
        for (int d = 0; d <= W && trivial; ++d)
            if (!(*st.Z[d] == *st.B[d])) trivial = false;
        if (trivial) continue;
        for (int lev = 0; lev < 4; ++lev) {
            std::vector<Lattice> num, den;
            for (int d = 0; d <= W; ++d) {
                num.push_back(st.Z[d]->scaled(lev) + *st.B[d]);
                den.push_back(st.Z[d]->scaled(lev + 1) + *st.B[d]);
            }
            struct Chosen {
                int start;
                int index;
                int exp;
                std::optional<int> len;
            };
            std::vector<Chosen> chosen;
            auto in_span = [&](int e, const std::vector<Lattice::Vec>& vecs, const Lattice::Vec& x) {
                std::size_t m = vecs.size();
                for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
                    Lattice::Vec y = x;
                    for (std::size_t j = 0; j < m; ++j)
                        if (mask >> j & 1)
                            for (std::size_t t = 0; t < n; ++t) y[t] -= vecs[j][t];
                    if (den[e].contains(y)) return true;
                }
                return false;
            };
            auto chosen_vecs = [&]() {
                std::vector<Lattice::Vec> v;
                for (const auto& c : chosen) v.push_back(unit_vec(n, c.index, c.exp));
                return v;
            };
            for (int dd = 0; dd <= W; ++dd) {
                if (dd > 0 && st.Z[dd] == st.Z[dd - 1] && st.B[dd] == st.B[dd - 1]) continue;
                auto labs = labels(key, *st.Z[dd]);
                struct Cand {
                    int index, exp;
                    std::optional<int> len;
                };
                std::vector<Cand> cands;
                auto prev = chosen_vecs();
                for (std::size_t i = 0; i < n; ++i) {
                    if (labs[i] < 0) continue;
                    int ex = labs[i] + lev;
                    auto v = unit_vec(n, static_cast<int>(i), ex);
                    if (!num[dd].contains(v) || den[dd].contains(v)) continue;
                    if (in_span(dd, prev, v)) continue;
                    Cand c{static_cast<int>(i), ex, std::nullopt};
                    for (int e = dd; e <= W; ++e)
                        if (den[e].contains(v)) {
                            c.len = e - dd;
                            break;
                        }
                    cands.push_back(c);
                }
                std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
                    int lx = x.len ? *x.len : 999, ly = y.len ? *y.len : 999;
                    if (lx != ly) return lx > ly;
                    if (x.index != y.index) return x.index > y.index;
                    return x.exp < y.exp;
                });
                for (const auto& c : cands) {
                    auto v = unit_vec(n, c.index, c.exp);
                    auto cv = chosen_vecs();
                    if (in_span(dd, cv, v)) continue;
                    std::optional<int> len;
                    for (int e = dd; e <= W; ++e)
                        if (in_span(e, cv, v)) {
                            len = e - dd;
                            break;
                        }
                    chosen.push_back({dd, c.index, c.exp, len});
                }
            }
            for (const auto& c : chosen) {
                EinfRecord rec;
                rec.s = key.s;
                rec.f = key.f;
                rec.label = ring_.label((*ids)[c.index]);
                rec.label.coeff = 1L << c.exp;
                rec.label.tau = c.start;
                rec.tau_order = c.len;
                rec.level = lev;
                out.push_back(rec);
            }
        }
    }
    return out;
}

}  // namespace mmfss
