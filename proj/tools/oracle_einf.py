#!/usr/bin/env python3
"""Independent E-infinity oracle.

Recomputes the tau-Bockstein pages from the E2 data and the seed
differentials with lattices held in Howell form over Z/2^N, instead of the
Smith-form arithmetic used by the C++ engine.  Every lattice in play
contains 2^3 Z^n (differential targets have exponent at most 8), so working
modulo 2^N with N well above 3 loses nothing; divisors at or above
2^(N-4) are read back as free summands.

Writes data/mmf-expected-einf.ssdf.
"""
import argparse
import re
import sys
from collections import defaultdict

N = 12
M = 1 << N
DMAX = 16  # depth window


def val2(x):
    x %= M
    if x == 0:
        return N
    return (x & -x).bit_length() - 1


# ---------------------------------------------------------------- Howell form

def howell(rows, n):
    work = [[x % M for x in r] for r in rows]
    work = [r for r in work if any(r)]
    piv = []
    for col in range(n):
        best, bv = -1, N
        for i, r in enumerate(work):
            v = val2(r[col])
            if v < bv:
                best, bv = i, v
        if best < 0:
            continue
        p = work.pop(best)
        u = p[col] >> bv
        inv = pow(u, -1, M)
        p = [x * inv % M for x in p]
        nxt = []
        for r in work:
            if r[col]:
                fct = r[col] >> bv
                r = [(a - fct * b) % M for a, b in zip(r, p)]
            if any(r):
                nxt.append(r)
        extra = [(x << (N - bv)) % M for x in p]
        if any(extra):
            nxt.append(extra)
        work = nxt
        piv.append((col, bv, p))
    # back-reduce
    for i in range(len(piv)):
        ci, vi, pi = piv[i]
        for j in range(i):
            cj, vj, pj = piv[j]
            if pj[ci] >> vi:
                fct = pj[ci] >> vi
                piv[j] = (cj, vj, [(a - fct * b) % M for a, b in zip(pj, pi)])
    return tuple((c, v, tuple(p)) for c, v, p in piv)


def hrows(h):
    return [list(p) for _, _, p in h]


def member(h, x):
    x = [a % M for a in x]
    for col, v, p in h:
        if x[col] % (1 << v):
            return False
        fct = x[col] >> v
        if fct:
            x = [(a - fct * b) % M for a, b in zip(x, p)]
    return not any(x)


def reduce_vec(h, x):
    x = [a % M for a in x]
    for col, v, p in h:
        fct = x[col] >> v
        if fct:
            x = [(a - fct * b) % M for a, b in zip(x, p)]
    return x


# ---------------------------------------------------------------- SSDF reading

WORD_RE = re.compile(r"^[-+]?\d+(\*[A-Za-z0-9]+\^\d+)*$")


def parse_word(tok, names):
    parts = tok.split("*")
    coeff = int(parts[0])
    tau = 0
    e = [0] * len(names)
    for p in parts[1:]:
        nm, ex = p.split("^")
        if nm == "tau":
            tau += int(ex)
        else:
            e[names.index(nm)] += int(ex)
    return coeff, tau, tuple(e)


def strip_comment(line):
    out, q = [], False
    for ch in line:
        if ch == '"':
            q = not q
        if ch == "#" and not q:
            break
        out.append(ch)
    return "".join(out).strip()


class Data:
    def __init__(self, paths):
        self.names = []
        self.gdeg = {}
        self.slots = defaultdict(list)  # (s,f) -> [(exps, order)]
        self.index = {}  # exps -> (s,f,i)
        self.actions = {}  # (gen, exps) -> [(coeff, exps)]
        self.seeds = []  # (r, coeff, exps, tcoeff, ttau, texps)
        for path in paths:
            self._read(path)

    def _read(self, path):
        sec = None
        with open(path) as fh:
            for raw in fh:
                line = strip_comment(raw)
                if not line:
                    continue
                if line.startswith("["):
                    sec = line.strip("[]")
                    continue
                tok = line.split()
                if sec == "generators":
                    if tok[0] != "tau":
                        self.names.append(tok[0])
                    self.gdeg[tok[0]] = (int(tok[1]), int(tok[2]))
                elif sec == "slots":
                    s, f = int(tok[0]), int(tok[1])
                    _, _, e = parse_word(tok[2], self.names)
                    o = 0 if tok[3] == "inf" else 1 << int(tok[3].split("^")[1])
                    self.index[e] = (s, f, len(self.slots[(s, f)]))
                    self.slots[(s, f)].append((e, o))
                elif sec == "actions":
                    _, _, e = parse_word(tok[1], self.names)
                    terms = []
                    for t in tok[2:]:
                        c, _, te = parse_word(t, self.names)
                        terms.append((c, te))
                    self.actions[(tok[0], e)] = terms
                elif sec == "seed-differentials":
                    r = int(tok[0][1:])
                    c, _, e = parse_word(tok[1], self.names)
                    tc, tt, te = parse_word(tok[2], self.names)
                    self.seeds.append((r, c, e, tc, tt, te))

    def degree(self, e):
        s = sum(self.gdeg[n][0] * x for n, x in zip(self.names, e))
        f = sum(self.gdeg[n][1] * x for n, x in zip(self.names, e))
        return s, f


# ---------------------------------------------------------------- ring

class Ring:
    def __init__(self, data):
        self.d = data
        self.cache = {}

    def gen_times(self, gi, vecd):
        """vecd: dict exps->coeff; multiply by generator gi."""
        out = defaultdict(int)
        g = self.d.names[gi]
        for e, c in vecd.items():
            for tc, te in self.d.actions.get((g, e), []):
                out[te] += c * tc
        return {k: v for k, v in out.items() if v % M}

    def mono_times(self, e1, vecd):
        # x*y with x = g1^a1 g2^a2 ... applied as g1(g2(...y))
        cur = dict(vecd)
        for gi in reversed(range(len(e1))):
            for _ in range(e1[gi]):
                cur = self.gen_times(gi, cur)
                if not cur:
                    return {}
        return cur

    def mul_basis(self, e1, e2):
        key = (e1, e2)
        if key not in self.cache:
            self.cache[key] = self.mono_times(e1, {e2: 1})
        return self.cache[key]


# ---------------------------------------------------------------- engine

class Oracle:
    def __init__(self, data, smax, verbose=False):
        self.d = data
        self.ring = Ring(data)
        self.smax = smax
        self.verbose = verbose
        self.slots = {k: v for k, v in data.slots.items() if k[0] <= smax}
        self.rel = {}
        for key, basis in self.slots.items():
            n = len(basis)
            rows = []
            for i, (_, o) in enumerate(basis):
                if o:
                    r = [0] * n
                    r[i] = o
                    rows.append(r)
            self.rel[key] = howell(rows, n)
        self.Z = {}
        self.B = {}
        for key, basis in self.slots.items():
            n = len(basis)
            full = howell([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)
            self.Z[key] = [full] * (DMAX + 1)
            self.B[key] = [self.rel[key]] * (DMAX + 1)
        self.seeds = defaultdict(list)
        unit = tuple([0] * len(data.names))
        for r, c, e, tc, tt, te in data.seeds:
            src = self.ring.mono_times(e, {unit: 1})
            tgt = self.ring.mono_times(te, {unit: tc})
            if len(src) != 1:
                raise RuntimeError("seed source is not a basis multiple")
            (be, u), = src.items()
            self.seeds[r].append((c * u, be, tgt, tt))
        self.diffs = {}  # r -> {(key, label_exps): (coeff, target vec)}
        self.seed_hits = defaultdict(list)

    # vectors are dicts exps->coeff; convert to coordinate lists
    def to_coords(self, key, vecd):
        basis = self.slots.get(key)
        if basis is None:
            return None
        x = [0] * len(basis)
        for e, c in vecd.items():
            s, f, i = self.d.index[e]
            assert (s, f) == key
            x[i] = (x[i] + c) % M
        return x

    def from_coords(self, key, x):
        if not x:
            return {}
        return {self.slots[key][i][0]: c for i, c in enumerate(x) if c % M}

    def min_coeff(self, key, h, i):
        n = len(self.slots[key])
        for a in range(N + 1):
            v = [0] * n
            v[i] = 1 << a
            if member(h, v):
                return a
        return N

    def labels(self, key, h):
        """Monomial generators (i, 2-exponent) of the lattice h, or error."""
        n = len(self.slots[key])
        labs = []
        rows = []
        for i in range(n):
            a = self.min_coeff(key, h, i)
            labs.append((i, a))
            v = [0] * n
            v[i] = (1 << a) % M
            rows.append(v)
        if howell(rows, n) != h:
            raise RuntimeError("NonMonomialCycle at %s" % (key,))
        return labs

    def min_depth(self, Zlist, key, vec):
        for dd in range(DMAX + 1):
            if member(Zlist[dd], vec):
                return dd
        return None

    def run(self):
        out_pages = []
        for r in range(3, 25, 2):
            k = (r - 1) // 2
            self.page(r, k)
        return out_pages

    def page(self, r, k):
        D = {}  # key -> {i: target coords}  for labels at max depth
        memo = {}
        self.cur_r, self.cur_k, self.memo = r, k, memo
        for key in sorted(self.slots):
            tkey = (key[0] - 1, key[1] + r)
            if tkey not in self.slots:
                continue
            labs = self.labels(key, self.Z[key][DMAX])
            vals = {}
            for i, a in labs:
                if a >= N:
                    continue
                y = self.diff_label(key, i, a)
                if y is not None and any(y):
                    vals[i] = y
            if vals:
                D[key] = (labs, vals, self.B[tkey][DMAX])
        self.diffs[r] = D
        # consistency and new lattices
        newZ, newB = {}, {}
        for key, (labs, vals, _) in D.items():
            tkey = (key[0] - 1, key[1] + r)
            n, nt = len(self.slots[key]), len(self.slots[tkey])
            lab = dict(labs)

            def apply(z):
                y = [0] * nt
                for i, c in enumerate(z):
                    if c % M and i in vals:
                        fct = (c % M) >> lab[i]
                        y = [(a + fct * b) % M for a, b in zip(y, vals[i])]
                return y

            zl, bl = [], []
            for dd in range(DMAX + 1):
                td = min(dd + k, DMAX)
                imgs = [apply(z) for z in hrows(self.Z[key][dd])]
                for y in imgs:
                    if not member(self.Z[tkey][td], y):
                        raise RuntimeError("InconsistentDifferential d%d at %s depth %d" % (r, key, dd))
                for b in hrows(self.B[key][dd]):
                    if not member(self.B[tkey][td], apply(b)):
                        raise RuntimeError("d%d not well defined on boundaries at %s" % (r, key))
                rows = [list(y) + list(z) for y, z in zip(imgs, hrows(self.Z[key][dd]))]
                rows += [list(b) + [0] * n for b in hrows(self.B[tkey][td])]
                h = howell(rows, nt + n)
                ker = [list(p[nt:]) for c, v, p in h if c >= nt]
                zl.append(howell(ker, n))
            newZ[key] = zl
            for dd in range(DMAX + 1):
                if dd >= k:
                    imgs = [apply(z) for z in hrows(self.Z[key][dd - k])]
                    newB.setdefault(tkey, list(self.B[tkey]))
                    cur = newB[tkey][dd]
                    newB[tkey][dd] = howell(hrows(cur) + imgs, nt)
        for key, zl in newZ.items():
            self.Z[key] = zl
        for key, bl in newB.items():
            self.B[key] = bl
        if self.verbose:
            print("page %d done: %d sources" % (r, len(D)), file=sys.stderr)

    def label_vec(self, key, i, a):
        n = len(self.slots[key])
        v = [0] * n
        v[i] = (1 << a) % M
        return v

    def diff_label(self, key, i, a):
        """d_r of 2^a * basis_i (a label of Z_r at max depth)."""
        mk = (key, i, a)
        if mk in self.memo:
            return self.memo[mk]
        self.memo[mk] = None
        r, k = self.cur_r, self.cur_k
        tkey = (key[0] - 1, key[1] + r)
        if tkey not in self.slots:
            self.memo[mk] = []
            return []
        e = self.slots[key][i][0]
        wv = self.label_vec(key, i, a)
        if member(self.B[key][DMAX], wv):
            self.memo[mk] = [0] * len(self.slots[tkey])
            return self.memo[mk]
        dw = self.min_depth(self.Z[key], key, wv)
        res = None
        # Leibniz splits
        for e1 in sub_exps(e):
            e2 = tuple(x - y for x, y in zip(e, e1))
            if e1 not in self.d.index or e2 not in self.d.index:
                continue
            k1 = self.d.index[e1][:2]
            k2 = self.d.index[e2][:2]
            if k1 not in self.slots or k2 not in self.slots:
                continue
            i1, i2 = self.d.index[e1][2], self.d.index[e2][2]
            a1 = self.min_coeff(k1, self.Z[k1][DMAX], i1)
            a2 = self.min_coeff(k2, self.Z[k2][DMAX], i2)
            if a1 >= N - 4 or a2 >= N - 4:
                continue
            prod = self.ring.mul_basis(e1, e2)
            if set(prod) != {e} and not (len(prod) == 1 and e in prod):
                continue
            u = prod[e] % M
            if self.slots[key][i][1]:
                u %= self.slots[key][i][1]
            if u == 0:
                continue
            vu = val2(u)
            need = a1 + a2 + vu
            if need > a:
                continue
            d1 = self.min_depth(self.Z[k1], k1, self.label_vec(k1, i1, a1))
            d2 = self.min_depth(self.Z[k2], k2, self.label_vec(k2, i2, a2))
            if d1 is None or d2 is None or dw is None or d1 + d2 > dw:
                continue
            y1 = self.diff_label(k1, i1, a1)
            y2 = self.diff_label(k2, i2, a2)
            if y1 is None or y2 is None:
                continue
            # d(U V) = d(U) V + (-1)^{s(U)} U d(V)
            t = defaultdict(int)
            if any(y1):
                part = self.mul_vec_right(self.from_coords((k1[0] - 1, k1[1] + r), y1), e2)
                for ee, c in part.items():
                    t[ee] += c * (1 << a2)
            if any(y2):
                sign = -1 if k1[0] % 2 else 1
                part = self.ring.mono_times(e1, self.from_coords((k2[0] - 1, k2[1] + r), y2))
                for ee, c in part.items():
                    t[ee] += sign * c * (1 << a1)
            y = self.to_coords(tkey, {ee: c for ee, c in t.items() if c % M})
            # divide by u * 2^(need - vu - a1 - a2) -> scale by 2^(a-need)/ (u/2^vu)
            uo = u >> vu
            scale = (pow(uo, -1, M) << (a - need)) % M
            y = [c * scale % M for c in y]
            res = y
            break
        if res is None:
            for (c, se, tgt, tt) in self.seeds.get(r, []):
                if se != e:
                    continue
                vc = val2(c)
                if vc > a:
                    continue
                if tt != k:
                    raise RuntimeError("seed tau power mismatch")
                tv = self.to_coords(tkey, tgt)
                co = (c >> vc)
                scale = (pow(co, -1, M) << (a - vc)) % M
                res = [x * scale % M for x in tv]
                self.seed_hits[r].append((key, e, a))
                break
        if res is None and all(x == 0 for j, x in enumerate(e) if self.d.names[j] != "Delta"):
            m = e[self.d.names.index("Delta")]
            dl = self.d.names.index("Delta")
            for (c, se, tgt, tt) in self.seeds.get(r, []):
                if any(x for j, x in enumerate(se) if j != dl):
                    continue
                nn = se[dl]
                num, den = m << a, c * nn
                if val2(num) < val2(den):
                    continue
                shift = [0] * len(e)
                shift[dl] = m - nn
                moved = self.ring.mono_times(tuple(shift), tgt)
                if any(x not in self.d.index for x in moved):
                    continue
                vd = val2(den)
                scale = ((num >> vd) * pow(den >> vd, -1, M)) % M
                tv = self.to_coords(tkey, moved)
                res = [x * scale % M for x in tv]
                break
        if res is None:
            res = [0] * len(self.slots[tkey])
        self.memo[mk] = res
        return res

    def mul_vec_right(self, vecd, e2):
        # (sum c_x x) * m2 = sum c_x (-1)^{s(x)s(m2)} m2 * x
        out = defaultdict(int)
        s2 = self.d.degree(e2)[0]
        for e, c in vecd.items():
            s1 = self.d.degree(e)[0]
            sign = -1 if (s1 * s2) % 2 else 1
            for ee, cc in self.ring.mul_basis(e2, e).items():
                out[ee] += sign * c * cc
        return out

    # ------------------------------------------------------------ E-infinity
    def einf(self, key):
        basis = self.slots[key]
        n = len(basis)
        Zl, Bl = self.Z[key], self.B[key]
        glyphs = []
        if key[1] == 0:
            labs = self.labels(key, Zl[DMAX])
            for i, a in labs:
                if basis[i][1] == 0:
                    glyphs.append(("box", i, a, 0, 0, None))
            return glyphs
        for lev in range(4):
            def Q(dd):
                num = howell([[(x << lev) % M for x in z] for z in hrows(Zl[dd])] + hrows(Bl[dd]), n)
                den = howell([[(x << (lev + 1)) % M for x in z] for z in hrows(Zl[dd])] + hrows(Bl[dd]), n)
                return num, den
            Qs = [Q(dd) for dd in range(DMAX + 1)]
            chosen = []  # (start, vec, len)

            def in_span(dd, vecs, x):
                num, den = Qs[dd]
                # x in den + span_F2(vecs)?
                from itertools import product
                for bits in product((0, 1), repeat=len(vecs)):
                    y = list(x)
                    for b, v in zip(bits, vecs):
                        if b:
                            y = [(p - q) % M for p, q in zip(y, v)]
                    if member(den, y):
                        return True
                return False

            for dd in range(DMAX + 1):
                num, den = Qs[dd]
                cands = []
                labs = self.labels(key, Zl[dd])
                for i, a in labs:
                    if a < N - 4:
                        v = self.label_vec(key, i, min(a + lev, N))
                        if member(num, v) and not member(den, v):
                            cands.append(v)
                prev = [v for (_, v, _) in chosen]
                # greedy: prefer longest-lived new vectors
                scored = []
                for v in cands:
                    if in_span(dd, prev, v):
                        continue
                    ln = None
                    for ee in range(dd, DMAX + 1):
                        if in_span(ee, [], v):
                            ln = ee - dd
                            break
                    scored.append((-(ln if ln is not None else 999), v, ln))
                scored.sort(key=lambda t: (t[0], t[1]))
                for _, v, ln in scored:
                    if in_span(dd, [w for (_, w, _) in chosen], v):
                        continue
                    # recompute length relative to chosen (quotient by earlier)
                    ln2 = None
                    for ee in range(dd, DMAX + 1):
                        if in_span(ee, [w for (_, w, _) in chosen], v):
                            ln2 = ee - dd
                            break
                    chosen.append((dd, v, ln2))
            for dd, v, ln in chosen:
                i = next(j for j, x in enumerate(v) if x)
                glyphs.append(("dot", i, val2(v[i]), dd, lev, ln))
        return glyphs

    def group_orders(self, key):
        """log2 order (or -1 for infinite) of E_inf at each depth."""
        n = len(self.slots[key])
        res = []
        for dd in range(DMAX + 1):
            z, b = self.Z[key][dd], self.B[key][dd]
            # index [Z:B] computed from Howell pivots: sum of (N - v) differences
            lz = sum(N - v for _, v, _ in z)
            lb = sum(N - v for _, v, _ in b)
            res.append(lz - lb)
        return res


def sub_exps(e):
    ranges = [range(x + 1) for x in e]
    from itertools import product
    for t in product(*ranges):
        if any(t) and t != tuple(e):
            yield t


def word_of(data, coeff, tau, e):
    parts = [str(coeff)]
    if tau:
        parts.append("tau^%d" % tau)
    for nm, x in zip(data.names, e):
        if x:
            parts.append("%s^%d" % (nm, x))
    return "*".join(parts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default="data")
    ap.add_argument("--smax", type=int, default=192)
    ap.add_argument("--report", type=int, default=191)
    ap.add_argument("--freport", type=int, default=53)
    ap.add_argument("-o", "--out", default=None)
    ap.add_argument("--dump-diffs", action="store_true")
    ap.add_argument("-v", action="store_true")
    args = ap.parse_args()
    data = Data([args.data + "/mmf-e2.ssdf", args.data + "/mmf-seeds.ssdf"])
    o = Oracle(data, args.smax, args.v)
    o.run()
    if args.dump_diffs:
        for r, D in sorted(o.diffs.items()):
            for key, (labs, vals, bt) in sorted(D.items()):
                tkey = (key[0] - 1, key[1] + r)
                lab = dict(labs)
                for i, y in sorted(vals.items()):
                    y = reduce_vec(bt, y)
                    if not any(y):
                        continue
                    e = o.slots[key][i][0]
                    tv = o.from_coords(tkey, y)
                    ts = " + ".join(word_of(data, c, (r - 1) // 2, te) for te, c in tv.items())
                    print("d%d %s -> %s" % (r, word_of(data, 1 << lab[i], 0, e), ts))
    lines = ["# expected E-infinity, stems 0..%d, filtrations 0..%d" % (args.report, args.freport),
             "# produced by tools/oracle_einf.py (Howell-form lattices mod 2^%d)" % N,
             "# s f kind label tau_order two_level",
             "[expected-einf]"]
    for key in sorted(o.slots):
        if key[0] > args.report or key[1] > args.freport:
            continue
        for kind, i, a, dd, lev, ln in o.einf(key):
            e = o.slots[key][i][0]
            lab = word_of(data, 1 << a, dd, e)
            lines.append("%d %d %s %s %s %d" % (key[0], key[1], kind, lab,
                                                 "inf" if ln is None else str(ln), lev))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
