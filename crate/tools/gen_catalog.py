#!/usr/bin/env python3
"""Generate crates/core/data/catalog.txt from glue-code tables.

Glue codes follow the standard Niemeier tables (Conway & Sloane, SPLAG
ch. 16, table 16.1).  Each glue word lists a discriminant class per
component; the script converts classes to rational coordinates in the
simple-root basis of each component, which is what the catalog stores.
"""
from fractions import Fraction as F
import sys


def cartan(family, n):
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
    edges = []
    if family == "A":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "D":
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    elif family == "E":
        # Bourbaki: 1-3-4-5-6-7-8 chain, 2 attached to 4 (0-based below)
        chain = [0, 2, 3, 4, 5, 6, 7][: n - 1]
        edges = [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)] + [(1, 3)]
    for a, b in edges:
        c[a][b] = c[b][a] = -1
    return c


def inverse(m):
    n = len(m)
    a = [[F(x) for x in row] + [F(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def d_from_e(x):
    """Coordinates of x (in the orthonormal e-basis of D_n) in simple roots."""
    n = len(x)
    p = [sum(x[: k + 1], F(0)) for k in range(n)]
    c = p[: n - 2]
    c.append((p[n - 2] - x[n - 1]) / 2)
    c.append(p[n - 1] / 2)
    return c


def glue_class(family, n, k):
    if k == 0:
        return [F(0)] * n
    if family == "A":
        return list(inverse(cartan("A", n))[k - 1])
    if family == "D":
        half = F(1, 2)
        e = {1: [half] * n, 2: [F(0)] * (n - 1) + [F(1)], 3: [half] * (n - 1) + [-half]}[k]
        return d_from_e(e)
    if family == "E":
        inv = inverse(cartan("E", n))
        if n == 6:
            return list(inv[0] if k == 1 else inv[5])
        if n == 7:
            assert k == 1
            return list(inv[6])
    raise ValueError((family, n, k))


def cyclic(word_fixed, cyc):
    out = []
    for s in range(len(cyc)):
        out.append(word_fixed + cyc[s:] + cyc[:s])
    return out


def even_perms_0123():
    import itertools
    res = []
    for p in itertools.permutations(range(4)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j])
        if inv % 2 == 0:
            res.append(list(p))
    return res


def hexacode():
    # additive span needs the omega-multiples too (omega acts as 1->2->3->1)
    base = [[1] * 6] + cyclic([0], [0, 2, 3, 3, 2])
    omega = {0: 0, 1: 2, 2: 3, 3: 1}
    return base + [[omega[x] for x in w] for w in base]


GOLAY = [int(c) for c in "00000101001100110101111"]

NIEMEIER = [
    ("D24", [("D", 24)], [[1]], 1104),
    ("D16E8", [("D", 16), ("E", 8)], [[1, 0]], 720),
    ("E8^3", [("E", 8)] * 3, [], 720),
    ("A24", [("A", 24)], [[5]], 600),
    ("D12^2", [("D", 12)] * 2, [[1, 2], [2, 1]], 528),
    ("A17E7", [("A", 17), ("E", 7)], [[3, 1]], 432),
    ("D10E7^2", [("D", 10), ("E", 7), ("E", 7)], [[1, 1, 0], [3, 0, 1]], 432),
    ("A15D9", [("A", 15), ("D", 9)], [[2, 1]], 384),
    ("D8^3", [("D", 8)] * 3, [[1, 2, 2], [2, 1, 2], [2, 2, 1]], 336),
    ("A12^2", [("A", 12)] * 2, [[1, 5]], 312),
    ("A11D7E6", [("A", 11), ("D", 7), ("E", 6)], [[1, 1, 1]], 288),
    ("E6^4", [("E", 6)] * 4, cyclic([1], [0, 1, 2]), 288),
    ("A9^2D6", [("A", 9), ("A", 9), ("D", 6)], [[2, 4, 0], [5, 0, 1], [0, 5, 3]], 240),
    ("D6^4", [("D", 6)] * 4, even_perms_0123(), 240),
    ("A8^3", [("A", 8)] * 3, cyclic([], [1, 1, 4]), 216),
    ("A7^2D5^2", [("A", 7), ("A", 7), ("D", 5), ("D", 5)], [[1, 1, 1, 2], [1, 7, 2, 1]], 192),
    ("A6^4", [("A", 6)] * 4, cyclic([1], [2, 1, 6]), 168),
    ("A5^4D4", [("A", 5)] * 4 + [("D", 4)],
     [w + [0] for w in cyclic([2], [0, 2, 4])] + [[3, 3, 0, 0, 1], [3, 0, 3, 0, 2], [3, 0, 0, 3, 3]], 144),
    ("D4^6", [("D", 4)] * 6, hexacode(), 144),
    ("A4^6", [("A", 4)] * 6, cyclic([1], [0, 1, 4, 4, 1]), 120),
    ("A3^8", [("A", 3)] * 8, cyclic([3], [2, 0, 0, 1, 0, 1, 1]), 96),
    ("A2^12", [("A", 2)] * 12, cyclic([2], [1, 1, 2, 1, 1, 1, 2, 2, 2, 1, 2]), 72),
    ("A1^24", [("A", 1)] * 24, cyclic([1], GOLAY), 48),
]


def fmt(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def comp_str(comps):
    out, i = [], 0
    while i < len(comps):
        j = i
        while j < len(comps) and comps[j] == comps[i]:
            j += 1
        name = f"{comps[i][0]}{comps[i][1]}"
        out.append(name if j - i == 1 else f"{name}*{j - i}")
        i = j
    return " ".join(out)


def glue_row(comps, word):
    row = []
    for (fam, n), k in zip(comps, word):
        row += glue_class(fam, n, k)
    return row


def golay_words():
    return [[1] + GOLAY[s:] + GOLAY[:s] for s in range(23)]


def leech_rows():
    """Leech lattice inside sqrt(2)*D24-ambient (scale 2), coordinates in D24 simple roots."""
    rows = []
    for w in golay_words():
        rows.append(d_from_e([F(b, 2) for b in w]))
    rows.append(d_from_e([F(-3, 4)] + [F(1, 4)] * 23))
    return rows


def emit(out):
    w = out.write
    w("# Built-in lattice catalog.\n")
    w("# Glue rows are rational coordinates in the simple-root basis of the\n")
    w("# listed components, concatenated in order.  Generated by tools/gen_catalog.py\n")
    w("version 1\n\n")

    def section(name, comps, rows, roots, scale=None, rank_group=None):
        w(f"name {name}\n")
        w(f"components {comp_str(comps)}\n")
        if scale is not None:
            w(f"scale {scale}\n")
        for r in rows:
            w("glue " + " ".join(fmt(x) for x in r) + "\n")
        if roots is not None:
            w(f"expected_roots {roots}\n")
        w("\n")

    section("E8", [("E", 8)], [], 240)
    section("E8^2", [("E", 8)] * 2, [], 480)
    section("D16+", [("D", 16)], [glue_row([("D", 16)], [1])], 480)
    for name, comps, words, roots in NIEMEIER:
        section(f"Niemeier({name})", comps, [glue_row(comps, wd) for wd in words], roots)
    section("Leech", [("D", 24)], leech_rows(), 0, scale=2)


if __name__ == "__main__":
    emit(sys.stdout)
