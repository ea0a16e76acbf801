#!/usr/bin/env python3
"""Generate data/mmf-e2.ssdf: the classical E2 ring tensored with Z[tau].

Basis families (top weight, tau-power zero):
  M  Delta^n P^m 4a^e            filtration 0, free
  W  h1^b v1^(2j) Delta^n        the h1-towers, order 2
  T  t g^k Delta^n               the g-periodic torsion part
Products are computed by reducing exponent vectors to these families.
"""
import argparse
import sys

GENS = [  # name, stem, filtration, weight, order (0 = inf)
    ("tau", 0, 0, -1, 0),
    ("h1", 1, 1, 1, 2),
    ("h2", 3, 1, 2, 4),
    ("h1v1sq", 5, 1, 3, 2),
    ("P", 8, 0, 4, 0),
    ("c", 8, 2, 5, 2),
    ("4a", 12, 0, 6, 0),
    ("d", 14, 2, 8, 2),
    ("g", 20, 4, 12, 8),
    ("Delta", 24, 0, 12, 0),
]
NAMES = [g[0] for g in GENS[1:]]
IDX = {n: i for i, n in enumerate(NAMES)}
DEG = {g[0]: (g[1], g[2]) for g in GENS}

# torsion heads: word exponents (h1,h2,c,d) and additive order
T_HEADS = {
    "h2": ({"h2": 1}, 4), "h2^2": ({"h2": 2}, 2), "h2^3": ({"h2": 3}, 2),
    "c": ({"c": 1}, 2), "d": ({"d": 1}, 2), "h1d": ({"h1": 1, "d": 1}, 2),
    "h2d": ({"h2": 1, "d": 1}, 2),
    "1": ({}, 8), "h1": ({"h1": 1}, 2), "h1^2": ({"h1": 2}, 2),
    "h1^3": ({"h1": 3}, 2),
}
G_ONLY = {"1", "h1", "h1^2", "h1^3"}  # need k >= 1


def vec(**kw):
    v = [0] * len(NAMES)
    for k, e in kw.items():
        v[IDX[k if k != "a4" else "4a"]] = e
    return tuple(v)


def key_exps(key):
    fam = key[0]
    e = dict()
    if fam == "M":
        _, n, m, eps = key
        e = {"P": m, "4a": eps, "Delta": n}
    elif fam == "W":
        _, b, j, n = key
        if j == 0:
            e = {"h1": b, "Delta": n}
        elif j == 1:
            e = {"h1": b - 1, "h1v1sq": 1, "Delta": n}
        else:
            eps = j % 2
            m = (j - 3 * eps) // 2
            e = {"h1": b, "P": m, "4a": eps, "Delta": n}
    else:
        _, t, n, k = key
        e = dict(T_HEADS[t][0])
        e["g"] = k
        e["Delta"] = n
    v = [0] * len(NAMES)
    for k, x in e.items():
        v[IDX[k]] += x
    return tuple(v)


def key_order(key):
    if key[0] == "M":
        return 0
    if key[0] == "W":
        return 2
    return T_HEADS[key[1]][1]


def degree(v):
    s = sum(DEG[NAMES[i]][0] * e for i, e in enumerate(v))
    f = sum(DEG[NAMES[i]][1] * e for i, e in enumerate(v))
    return s, f


def word_str(coeff, v, tau=0):
    parts = [str(coeff)]
    if tau:
        parts.append("tau^%d" % tau)
    for i, e in enumerate(v):
        if e:
            parts.append("%s^%d" % (NAMES[i], e))
    return "*".join(parts)


def order_str(o):
    if o == 0:
        return "inf"
    return "2^%d" % (o.bit_length() - 1)


def reduce_vec(v, coeff):
    """Reduce an exponent vector to a dict key -> coefficient."""
    out = {}

    def add(key, c):
        if c:
            out[key] = out.get(key, 0) + c

    stack = [(list(v), coeff)]
    while stack:
        e, cf = stack.pop()
        a, b, x, P, cc, A, dd, k, n = (e[IDX[t]] for t in NAMES)
        if A >= 2:
            e1 = list(e)
            e1[IDX["4a"]] -= 2
            e1[IDX["P"]] += 3
            stack.append((e1, cf))
            e2 = list(e)
            e2[IDX["4a"]] -= 2
            e2[IDX["Delta"]] += 1
            stack.append((e2, -1728 * cf))
            continue
        if b or cc or dd or k:
            if P or A or x:
                continue
            while cc and a:
                cc -= 1
                a -= 1
                b += 3
            if cc >= 2:
                continue
            if cc == 1:
                if b or dd or a:
                    continue
                add(("T", "c", n, k), cf)
                continue
            if a and b:
                continue
            if dd >= 2:
                continue
            if dd == 1:
                if a >= 2:
                    continue
                if a == 1:
                    add(("T", "h1d", n, k), cf)
                elif b == 0:
                    add(("T", "d", n, k), cf)
                elif b == 1:
                    add(("T", "h2d", n, k), cf)
                elif b == 2:
                    add(("T", "1", n, k + 1), 4 * cf)
                continue
            if a:
                if k == 0:
                    add(("W", a, 0, n), cf)
                elif a <= 3:
                    add(("T", "h1" if a == 1 else "h1^%d" % a, n, k), cf)
                continue
            if b:
                if b <= 3:
                    add(("T", "h2" if b == 1 else "h2^%d" % b, n, k), cf)
                continue
            add(("T", "1", n, k), cf)
            continue
        if a == 0 and x == 0:
            add(("M", n, P, A), cf)
        else:
            add(("W", a + x, x + 2 * P + 3 * A, n), cf)
    res = {}
    for key, c in out.items():
        o = key_order(key)
        if o:
            c %= o
        if c:
            res[key] = c
    return res


def enumerate_basis(smax, fmax):
    keys = []
    for n in range(smax // 24 + 1):
        for m in range(smax // 8 + 1):
            for eps in (0, 1):
                keys.append(("M", n, m, eps))
    for b in range(1, fmax + 1):
        for j in range(smax // 4 + 1):
            for n in range(smax // 24 + 1):
                keys.append(("W", b, j, n))
    for t in T_HEADS:
        for n in range(smax // 24 + 1):
            for k in range(smax // 20 + 1):
                if k == 0 and t in G_ONLY:
                    continue
                keys.append(("T", t, n, k))
    out = []
    for key in keys:
        s, f = degree(key_exps(key))
        if s <= smax and f <= fmax:
            out.append(key)
    return out


def sort_key(key):
    s, f = degree(key_exps(key))
    fam = "MWT".index(key[0])
    return (s, f, fam, key_exps(key))


ALIASES = [
    # (lhs exponents, coefficient) -- rhs computed by reduction
    vec(h1=1, c=1), vec(h2=2, d=1), vec(h1=1, h2=1), vec(a4=2),
    vec(h1v1sq=2), vec(h1=4, g=1), vec(h2=1, c=1), vec(h1=2, c=1),
    vec(h1=2, d=1), vec(c=2), vec(d=2), vec(c=1, d=1), vec(h2=4),
    vec(h2=1, h1=1, d=1), vec(h1=1, h2=1, d=1), vec(h2=3, d=1),
    vec(h1=1, c=1, Delta=1), vec(h2=2, d=1, g=1), vec(P=1, g=1),
    vec(h1=3, h1v1sq=1), vec(h1=1, a4=1, P=1), vec(h2=1, P=1),
    vec(h1v1sq=1, g=1), vec(h1=1, c=1, g=2, Delta=3),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--smax", type=int, default=255)
    ap.add_argument("--fmax", type=int, default=56)
    ap.add_argument("-o", "--out", default="-")
    args = ap.parse_args()
    basis = sorted(enumerate_basis(args.smax, args.fmax), key=sort_key)
    inbasis = set(basis)

    def clip(d):
        return {k: c for k, c in d.items() if k in inbasis}

    lines = []
    w = lines.append
    w("# mmf motivic Adams-Novikov E2-page, classical top-weight basis")
    w("# stems 0..%d, filtrations 0..%d" % (args.smax, args.fmax))
    w("[generators]")
    for name, s, f, wt, o in GENS:
        note = "  # transcribed" if name in ("h2", "g") else ""
        w("%s %d %d %d %s%s" % (name, s, f, wt, order_str(o), note))
    w("")
    w("[slots]")
    w("# s f word order")
    for key in basis:
        v = key_exps(key)
        s, f = degree(v)
        w("%d %d %s %s" % (s, f, word_str(1, v), order_str(key_order(key))))
    w("")
    w("[actions]")
    w("# generator source term...")
    for gi, gname in enumerate(NAMES):
        for key in basis:
            v = list(key_exps(key))
            v[gi] += 1
            prod = clip(reduce_vec(v, 1))
            if not prod:
                continue
            terms = " ".join(word_str(c, key_exps(k)) for k, c in
                             sorted(prod.items(), key=lambda kc: sort_key(kc[0])))
            w("%s %s %s" % (gname, word_str(1, key_exps(key)), terms))
    w("")
    w("[words]")
    w("# alternate word = value")
    for v in ALIASES:
        s, f = degree(v)
        if s > args.smax or f > args.fmax:
            continue
        prod = clip(reduce_vec(list(v), 1))
        rhs = " ".join(word_str(c, key_exps(k)) for k, c in
                       sorted(prod.items(), key=lambda kc: sort_key(kc[0])))
        w("%s = %s" % (word_str(1, v), rhs if rhs else "0"))
    w("")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
