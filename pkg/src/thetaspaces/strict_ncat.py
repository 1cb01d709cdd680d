"""Finite strict n-categories as globular cell sets with total composition tables."""
from __future__ import annotations

import itertools
import random
import sys
from functools import lru_cache

from ._order import ckey, csorted
from .delta_core import iso_chain, ordinal
from .reports import SizeGuardExceeded
from .theta_cell import ThetaSyntaxError, parse_theta

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

VALIDATE_EXHAUSTIVE = 200
SAMPLES = 1500
FUNCTOR_GUARD = 60_000


class StrictNCat:
    """cells[k] for 0 <= k <= n; src/tgt/ident tables per level; comp[(k, j)] = {(g, f): g o_j f}."""

    def __init__(self, n, cells, src, tgt, ident, comp, start=None, end=None, name="", validate=True):
        self.n = n
        self.cells = [tuple(csorted(cs)) for cs in cells]
        self.src_ = src
        self.tgt_ = tgt
        self.ident_ = ident
        self.comp_ = comp
        self.start = start
        self.end = end
        self.name = name
        self.index = [{c: i for i, c in enumerate(cs)} for cs in self.cells]
        self._between = [None]
        for k in range(1, n + 1):
            b = {}
            for c in self.cells[k]:
                b.setdefault((src[k][c], tgt[k][c]), []).append(c)
            self._between.append(b)
        self._homs = {}
        if validate:
            self.validate()

    # -- accessors ---------------------------------------------------------

    @property
    def objects(self):
        return self.cells[0]

    def size(self):
        return sum(len(cs) for cs in self.cells)

    def src(self, k, c):
        return self.src_[k][c]

    def tgt(self, k, c):
        return self.tgt_[k][c]

    def bsrc(self, k, c, j):
        """Iterated source down to level j."""
        while k > j:
            c = self.src_[k][c]
            k -= 1
        return c

    def btgt(self, k, c, j):
        while k > j:
            c = self.tgt_[k][c]
            k -= 1
        return c

    def ident(self, k, c):
        return self.ident_[k][c]

    def ident_to(self, c, k, level):
        while k < level:
            c = self.ident_[k][c]
            k += 1
        return c

    def comp(self, k, j, g, f):
        """g o_j f at level k."""
        return self.comp_[(k, j)][(g, f)]

    def comp_get(self, k, j, g, f):
        return self.comp_[(k, j)].get((g, f))

    def between(self, k, s, t):
        return self._between[k].get((s, t), ())

    def is_identity(self, k, c):
        return k >= 1 and self.ident_[k - 1][self.src_[k][c]] == c

    def identity_cells(self, k):
        return frozenset(c for c in self.cells[k] if self.is_identity(k, c))

    def __repr__(self):
        sizes = "/".join(str(len(cs)) for cs in self.cells)
        return f"StrictNCat({self.name or '?'}, n={self.n}, cells={sizes})"

    # -- validation --------------------------------------------------------

    def validate(self, seed=0):
        n = self.n
        exhaustive = self.size() <= VALIDATE_EXHAUSTIVE
        rng = random.Random(seed)

        def pick(xs):
            xs = list(xs)
            if exhaustive or len(xs) <= SAMPLES:
                return xs
            return rng.sample(xs, SAMPLES)

        for k in range(1, n + 1):
            for c in self.cells[k]:
                s, t = self.src_[k].get(c), self.tgt_[k].get(c)
                if s is None or t is None or s not in self.index[k - 1] or t not in self.index[k - 1]:
                    raise ValueError(f"level {k} cell {c!r} has a bad boundary")
                if k >= 2 and (self.src(k - 1, s) != self.src(k - 1, t) or self.tgt(k - 1, s) != self.tgt(k - 1, t)):
                    raise ValueError(f"globularity fails at {c!r}")
        for k in range(n):
            for c in self.cells[k]:
                i = self.ident_[k].get(c)
                if i is None or self.src(k + 1, i) != c or self.tgt(k + 1, i) != c:
                    raise ValueError(f"identity on {c!r} is malformed")
        for k in range(1, n + 1):
            for j in range(k):
                table = self.comp_[(k, j)]
                pairs = self._composable(k, j)
                if len(pairs) != len(table):
                    raise ValueError(f"o_{j} table at level {k} is not exactly the composable pairs")
                for g, f in pick(pairs):
                    h = table.get((g, f))
                    if h is None:
                        raise ValueError(f"missing composite {g!r} o_{j} {f!r}")
                    if j == k - 1:
                        want = (self.src(k, f), self.tgt(k, g))
                    else:
                        want = (self.comp(k - 1, j, self.src(k, g), self.src(k, f)),
                                self.comp(k - 1, j, self.tgt(k, g), self.tgt(k, f)))
                    if (self.src(k, h), self.tgt(k, h)) != want:
                        raise ValueError(f"composite {g!r} o_{j} {f!r} has the wrong boundary")
                    if k < n:
                        ig = self.comp(k + 1, j, self.ident(k, g), self.ident(k, f))
                        if ig != self.ident(k, h):
                            raise ValueError(f"identities do not respect o_{j} at {g!r}, {f!r}")
                for f in pick(self.cells[k]):
                    lu = self.ident_to(self.btgt(k, f, j), j, k)
                    ru = self.ident_to(self.bsrc(k, f, j), j, k)
                    if table[(lu, f)] != f or table[(f, ru)] != f:
                        raise ValueError(f"unit law fails at {f!r} for o_{j}")
                by_src = {}
                for g, f in pairs:
                    by_src.setdefault(f, []).append(g)
                for g, f in pick(pairs):
                    gf = table[(g, f)]
                    for h in by_src.get(g, ()):
                        if table[(h, gf)] != table[(table[(h, g)], f)]:
                            raise ValueError(f"associativity fails for o_{j} at {h!r}, {g!r}, {f!r}")
                for i in range(j):
                    self._check_interchange(k, i, j, pick)

    def _composable(self, k, j):
        by_src = {}
        for g in self.cells[k]:
            by_src.setdefault(self.bsrc(k, g, j), []).append(g)
        return [(g, f) for f in self.cells[k] for g in by_src.get(self.btgt(k, f, j), ())]

    def _check_interchange(self, k, i, j, pick):
        pairs = self._composable(k, j)
        by_isrc = {}
        for d, c in pairs:
            by_isrc.setdefault(self.bsrc(k, self.comp(k, j, d, c), i), []).append((d, c))
        for b, a in pick(pairs):
            left_inner = self.comp(k, j, b, a)
            for d, c in by_isrc.get(self.btgt(k, left_inner, i), ()):
                lhs = self.comp(k, i, self.comp(k, j, d, c), left_inner)
                rhs = self.comp(k, j, self.comp(k, i, d, b), self.comp(k, i, c, a))
                if lhs != rhs:
                    raise ValueError(f"interchange fails at level {k}, o_{i}/o_{j}")

    # -- homs --------------------------------------------------------------

    def hom(self, x, y):
        key = (x, y)
        if key not in self._homs:
            self._homs[key] = hom_ncat_object(self, x, y)
        return self._homs[key]


def materialize(n, cells, src, tgt, ident, comp, start=None, end=None, name="", validate=True):
    """Tabulate an n-category from cell lists and structure functions.

    src(k, c), tgt(k, c) for k >= 1; ident(k, c) for k < n; comp(k, j, g, f) on j-composable pairs.
    """
    cells = [tuple(csorted(set(cs))) for cs in cells]
    S = [None] + [{c: src(k, c) for c in cells[k]} for k in range(1, n + 1)]
    T = [None] + [{c: tgt(k, c) for c in cells[k]} for k in range(1, n + 1)]
    I = [{c: ident(k, c) for c in cells[k]} for k in range(n)]

    def bdry(table, k, c, j):
        while k > j:
            c = table[k][c]
            k -= 1
        return c

    C = {}
    for k in range(1, n + 1):
        for j in range(k):
            by_src = {}
            for g in cells[k]:
                by_src.setdefault(bdry(S, k, g, j), []).append(g)
            C[(k, j)] = {(g, f): comp(k, j, g, f) for f in cells[k] for g in by_src.get(bdry(T, k, f, j), ())}
    return StrictNCat(n, cells, S, T, I, C, start=start, end=end, name=name, validate=validate)


# -- constructors -----------------------------------------------------------


def terminal_ncat(n):
    return materialize(n, [("*",)] * (n + 1), lambda k, c: "*", lambda k, c: "*",
                       lambda k, c: "*", lambda k, j, g, f: "*", start="*", end="*", name=f"term@{n}")


def empty_ncat(n):
    return materialize(n, [()] * (n + 1), None, None, None, None, name=f"empty@{n}")


def discrete_ncat(objects, n=0):
    objects = list(objects)
    return materialize(n, [objects] + [objects] * n, lambda k, c: c, lambda k, c: c,
                       lambda k, c: c, lambda k, j, g, f: g, name="discrete")


def from_category(C, n=1, start=None, end=None, name=""):
    """C as an n-category with only identities above dimension 1."""
    assert n >= 1
    mors = C.morphisms

    def src(k, c):
        return C.source[c] if k == 1 else c

    def tgt(k, c):
        return C.target[c] if k == 1 else c

    def ident(k, c):
        return C.identities[c] if k == 0 else c

    def comp(k, j, g, f):
        if j == 0:
            return C.compose(g, f)
        assert g == f
        return g

    return materialize(n, [C.objects] + [mors] * n, src, tgt, ident, comp, start=start, end=end,
                       name=name or f"cat@{n}")


def ordinal_ncat(m, n=1):
    return from_category(ordinal(m), n, start=0, end=m, name=f"ord({m})@{n}")


def iso_chain_flat(p, n=1):
    return from_category(iso_chain(p), n, start=0, end=p, name=f"isochain({p})@{n}")


def suspension(B):
    """Two new objects 0, 1 with hom(0, 1) = B and trivial endpoint homs."""
    n = B.n + 1
    cells = [(0, 1)] + [[("B", c) for c in B.cells[k - 1]] + [("e", 0), ("e", 1)] for k in range(1, n + 1)]

    def src(k, c):
        if c[0] == "e":
            return c[1] if k == 1 else c
        return 0 if k == 1 else ("B", B.src(k - 1, c[1]))

    def tgt(k, c):
        if c[0] == "e":
            return c[1] if k == 1 else c
        return 1 if k == 1 else ("B", B.tgt(k - 1, c[1]))

    def ident(k, c):
        if k == 0:
            return ("e", c)
        if c[0] == "e":
            return c
        return ("B", B.ident(k - 1, c[1]))

    def comp(k, j, g, f):
        if j == 0:
            if f[0] == "e":
                return g
            if g[0] == "e":
                return f
            raise AssertionError("no composable non-trivial pair across objects")
        if f[0] == "e":
            assert g == f
            return g
        return ("B", B.comp(k - 1, j - 1, g[1], f[1]))

    return materialize(n, cells, src, tgt, ident, comp, start=0, end=1, name=f"susp({B.name})")


def _is_sink(A, x):
    # only identity towers start at x
    return all(A.is_identity(k, c) for k in range(1, A.n + 1) for c in A.cells[k] if A.bsrc(k, c, 0) == x)


def _is_source(A, x):
    return all(A.is_identity(k, c) for k in range(1, A.n + 1) for c in A.cells[k] if A.btgt(k, c, 0) == x)


def glue(A, B):
    """Pushout of A <- [0] -> B along A.end and B.start."""
    if A.n != B.n:
        raise ValueError(f"dimension mismatch in glue: {A.n} vs {B.n}")
    if A.end is None or B.start is None:
        raise ValueError("glue needs distinguished endpoints")
    if not (_is_sink(A, A.end) and _is_source(B, B.start)):
        raise ValueError("glue is only supported when A.end has no outgoing and B.start no incoming cells")
    n, e, s = A.n, A.end, B.start

    def norm_r(k, b):
        if k == 0:
            return ("L", e) if b == s else ("R", b)
        if B.bsrc(k, b, 0) == s and B.btgt(k, b, 0) == s:
            return ("L", A.ident_to(e, 0, k))
        return ("R", b)

    cells = []
    for k in range(n + 1):
        level = [("L", a) for a in A.cells[k]]
        level += [norm_r(k, b) for b in B.cells[k] if norm_r(k, b)[0] == "R"]
        if k >= 1:
            left = [a for a in A.cells[k] if A.btgt(k, a, 0) == e and A.bsrc(k, a, 0) != e]
            right = [b for b in B.cells[k] if B.bsrc(k, b, 0) == s and B.btgt(k, b, 0) != s]
            level += [("X", a, b) for a in left for b in right]
        cells.append(level)

    def src(k, c):
        if c[0] == "L":
            return ("L", A.src(k, c[1]))
        if c[0] == "R":
            return norm_r(k - 1, B.src(k, c[1]))
        if k == 1:
            return ("L", A.src(1, c[1]))
        return ("X", A.src(k, c[1]), B.src(k, c[2]))

    def tgt(k, c):
        if c[0] == "L":
            return ("L", A.tgt(k, c[1]))
        if c[0] == "R":
            return norm_r(k - 1, B.tgt(k, c[1]))
        if k == 1:
            return norm_r(0, B.tgt(1, c[2]))
        return ("X", A.tgt(k, c[1]), B.tgt(k, c[2]))

    def ident(k, c):
        if c[0] == "L":
            return ("L", A.ident(k, c[1]))
        if c[0] == "R":
            return norm_r(k + 1, B.ident(k, c[1]))
        return ("X", A.ident(k, c[1]), B.ident(k, c[2]))

    def comp(k, j, g, f):
        if j > 0:
            if f[0] == "L":
                return ("L", A.comp(k, j, g[1], f[1]))
            if f[0] == "R":
                return ("R", B.comp(k, j, g[1], f[1]))
            return ("X", A.comp(k, j, g[1], f[1]), B.comp(k, j, g[2], f[2]))
        tf, tg = f[0], g[0]
        if tf == "L" and tg == "L":
            return ("L", A.comp(k, 0, g[1], f[1]))
        if tf == "R" and tg == "R":
            return ("R", B.comp(k, 0, g[1], f[1]))
        if tf == "L" and tg == "R":
            if A.bsrc(k, f[1], 0) == e:
                return g
            return ("X", f[1], g[1])
        if tf == "L" and tg == "X":
            return ("X", A.comp(k, 0, g[1], f[1]), g[2])
        if tf == "X" and tg == "R":
            return ("X", f[1], B.comp(k, 0, g[1], f[2]))
        raise AssertionError(f"unexpected composable pair {g!r}, {f!r}")

    return materialize(n, cells, src, tgt, ident, comp, start=("L", A.start), end=norm_r(0, B.end),
                       name=f"glue({A.name};{B.name})")


def glue_many(parts):
    out = parts[0]
    for p in parts[1:]:
        out = glue(out, p)
    return out


def product(A, B):
    if A.n != B.n:
        raise ValueError(f"dimension mismatch in product: {A.n} vs {B.n}")
    n = A.n
    cells = [[(a, b) for a in A.cells[k] for b in B.cells[k]] for k in range(n + 1)]
    start = (A.start, B.start) if A.start is not None and B.start is not None else None
    end = (A.end, B.end) if A.end is not None and B.end is not None else None
    return materialize(
        n, cells,
        lambda k, c: (A.src(k, c[0]), B.src(k, c[1])),
        lambda k, c: (A.tgt(k, c[0]), B.tgt(k, c[1])),
        lambda k, c: (A.ident(k, c[0]), B.ident(k, c[1])),
        lambda k, j, g, f: (A.comp(k, j, g[0], f[0]), B.comp(k, j, g[1], f[1])),
        start=start, end=end, name=f"prod({A.name},{B.name})")


def enriched(n, objects, hom, unit, hcomp, name=""):
    """An n-category from hom (n-1)-categories, units and horizontal composition functors.

    hom(x, y) is a StrictNCat of dimension n-1, unit(x) an object of hom(x, x), and
    hcomp(x, y, z, k, d, c) composes a level-k cell d of hom(y, z) after c of hom(x, y).
    """
    objects = list(objects)
    homs = {(x, y): hom(x, y) for x in objects for y in objects}
    cells = [objects] + [[(x, y, c) for (x, y), H in homs.items() for c in H.cells[k - 1]] for k in range(1, n + 1)]

    def src(k, c):
        x, y, a = c
        return x if k == 1 else (x, y, homs[(x, y)].src(k - 1, a))

    def tgt(k, c):
        x, y, a = c
        return y if k == 1 else (x, y, homs[(x, y)].tgt(k - 1, a))

    def ident(k, c):
        if k == 0:
            return (c, c, unit(c))
        x, y, a = c
        return (x, y, homs[(x, y)].ident(k - 1, a))

    def comp(k, j, g, f):
        if j == 0:
            return (f[0], g[1], hcomp(f[0], f[1], g[1], k - 1, g[2], f[2]))
        return (f[0], f[1], homs[(f[0], f[1])].comp(k - 1, j - 1, g[2], f[2]))

    return materialize(n, cells, src, tgt, ident, comp, name=name)


def hom_ncat_object(A, x, y):
    """The (n-1)-category of cells from x to y, keeping A's cell names."""
    n = A.n
    cells = [[c for c in A.cells[k + 1] if A.bsrc(k + 1, c, 0) == x and A.btgt(k + 1, c, 0) == y]
             for k in range(n)]
    keep = [set(cs) for cs in cells]
    S = [None] + [{c: A.src(k + 1, c) for c in cells[k]} for k in range(1, n)]
    T = [None] + [{c: A.tgt(k + 1, c) for c in cells[k]} for k in range(1, n)]
    I = [{c: A.ident(k + 1, c) for c in cells[k]} for k in range(n - 1)]
    C = {}
    for k in range(1, n):
        for j in range(k):
            C[(k, j)] = {gf: h for gf, h in A.comp_[(k + 1, j + 1)].items() if gf[0] in keep[k] and gf[1] in keep[k]}
    return StrictNCat(n - 1, cells, S, T, I, C, name=f"hom({A.name},{x!r},{y!r})", validate=False)


# -- Theta objects as n-categories -------------------------------------------


@lru_cache(maxsize=None)
def theta_ncat(x):
    """The free n-category on the pasting shape x; cells (i, j, child cells)."""
    if x.depth == 0:
        return materialize(0, [("*",)], None, None, None, None, name="*")
    kids = [theta_ncat(c) for c in x.children]
    m, n = x.arity, x.depth

    cells = [list(range(m + 1))]
    for k in range(1, n + 1):
        level = []
        for i in range(m + 1):
            level.append((i, i, ()))
            for j in range(i + 1, m + 1):
                for cs in itertools.product(*(kids[l].cells[k - 1] for l in range(i, j))):
                    level.append((i, j, cs))
        cells.append(level)

    def src(k, c):
        i, j, cs = c
        if k == 1:
            return i
        return (i, j, tuple(kids[i + a].src(k - 1, e) for a, e in enumerate(cs)))

    def tgt(k, c):
        i, j, cs = c
        if k == 1:
            return j
        return (i, j, tuple(kids[i + a].tgt(k - 1, e) for a, e in enumerate(cs)))

    def ident(k, c):
        if k == 0:
            return (c, c, ())
        i, j, cs = c
        return (i, j, tuple(kids[i + a].ident(k - 1, e) for a, e in enumerate(cs)))

    def comp(k, r, g, f):
        if r == 0:
            return (f[0], g[1], f[2] + g[2])
        i, j, cs = f
        return (i, j, tuple(kids[i + a].comp(k - 1, r - 1, d, e) for a, (d, e) in enumerate(zip(g[2], cs))))

    return materialize(n, cells, src, tgt, ident, comp, start=0, end=m, name=str(x))


def theta_cellmap(psi):
    """The cell map of the n-functor realizing a Theta morphism."""
    if psi.delta is None:
        return lambda k, c: c
    phi = psi.delta
    subs = {key: theta_cellmap(f) for key, f in psi.blocks}

    def F(k, c):
        if k == 0:
            return phi(c)
        i0, j0, cs = c
        out = []
        for i in range(i0 + 1, j0 + 1):
            e = cs[i - i0 - 1]
            for l in range(phi(i - 1) + 1, phi(i) + 1):
                out.append(subs[(i, l)](k - 1, e))
        return (phi(i0), phi(j0), tuple(out))

    return F


# -- functors ---------------------------------------------------------------


class NFunctor:
    """Per-level images listed in the source's canonical cell order."""

    __slots__ = ("source", "target", "images", "_hash")

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = images
        self._hash = hash(images)

    def __call__(self, k, c):
        return self.images[k][self.source.index[k][c]]

    def __eq__(self, other):
        return isinstance(other, NFunctor) and self.images == other.images

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return ckey(self.images)

    def compose(self, other):
        """self after other."""
        A = other.source
        return NFunctor(A, self.target, tuple(tuple(self(k, other(k, c)) for c in A.cells[k])
                                              for k in range(A.n + 1)))

    def __repr__(self):
        return f"NFunctor({self.images})"


def functor_from_cellmap(A, B, F):
    return NFunctor(A, B, tuple(tuple(F(k, c) for c in A.cells[k]) for k in range(A.n + 1)))


def _search_plan(A):
    """Cells in an order where each cell follows its boundary and objects come in connected order,
    so composites and boundaries prune as early as possible."""
    entries = {}
    decomposable = set()
    for (k, j), table in A.comp_.items():
        for (g, f), h in table.items():
            for c in {g, f, h}:
                entries.setdefault((k, c), []).append((j, g, f, h))
            if h != g and h != f:
                decomposable.add((k, h))
    rank = {}
    for k in range(1, A.n + 1):
        for c in A.cells[k]:
            rank[(k, c)] = 0 if A.is_identity(k, c) else (1 if (k, c) not in decomposable else 2)
    pending = sorted(rank, key=lambda kc: (rank[kc], kc[0], A.index[kc[0]][kc[1]]))
    neighbours = {x: [] for x in A.cells[0]}
    for c in A.cells[1] if A.n >= 1 else ():
        s, t = A.src(1, c), A.tgt(1, c)
        neighbours[s].append(t)
        neighbours[t].append(s)
    objects = []
    seen = set()
    for root in A.cells[0]:
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            x = queue.pop(0)
            objects.append(x)
            for y in neighbours[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    order = []
    placed = set()
    for x in objects:
        order.append((0, x))
        placed.add((0, x))
        changed = True
        while changed:
            changed = False
            rest = []
            for k, c in pending:
                if (k - 1, A.src(k, c)) in placed and (k - 1, A.tgt(k, c)) in placed:
                    order.append((k, c))
                    placed.add((k, c))
                    changed = True
                else:
                    rest.append((k, c))
            pending = rest
    return order, entries


def enumerate_nfunctors(A, B, first=False, injective=False, guard=FUNCTOR_GUARD, fixed=None):
    """All strict n-functors A -> B, in canonical order."""
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")
    estimate = A.size() * B.size()
    if guard is not None and estimate > guard:
        raise SizeGuardExceeded(f"functor search {A.name} -> {B.name} exceeds the size guard", estimate)
    order, entries = _search_plan(A)
    assign = {}
    used = [set() for _ in range(A.n + 1)]
    fixed = fixed or {}

    def put(k, c, v, trail):
        stack = [(k, c, v)]
        while stack:
            k, c, v = stack.pop()
            cur = assign.get((k, c))
            if cur is not None:
                if cur != v:
                    return False
                continue
            if k > 0 and (B.src(k, v) != assign[(k - 1, A.src(k, c))] or B.tgt(k, v) != assign[(k - 1, A.tgt(k, c))]):
                return False
            if injective:
                if v in used[k]:
                    return False
                used[k].add(v)
            assign[(k, c)] = v
            trail.append((k, c))
            for j, g, f, h in entries.get((k, c), ()):
                vg, vf = assign.get((k, g)), assign.get((k, f))
                if vg is not None and vf is not None:
                    vh = B.comp_get(k, j, vg, vf)
                    if vh is None:
                        return False
                    stack.append((k, h, vh))
        return True

    def undo(trail):
        for key in trail:
            v = assign.pop(key)
            if injective:
                used[key[0]].discard(v)

    out = []

    def dfs(idx):
        if idx == len(order):
            out.append(NFunctor(A, B, tuple(tuple(assign[(k, c)] for c in A.cells[k]) for k in range(A.n + 1))))
            return first
        k, c = order[idx]
        if (k, c) in assign:
            return dfs(idx + 1)
        if (k, c) in fixed:
            cands = (fixed[(k, c)],)
        elif A.is_identity(k, c):
            cands = (B.ident(k - 1, assign[(k - 1, A.src(k, c))]),)
        elif k == 0:
            cands = B.cells[0]
        else:
            cands = B.between(k, assign[(k - 1, A.src(k, c))], assign[(k - 1, A.tgt(k, c))])
        for v in cands:
            trail = []
            ok = put(k, c, v, trail)
            if ok and dfs(idx + 1):
                undo(trail)
                return True
            undo(trail)
        return False

    dfs(0)
    return tuple(sorted(out, key=NFunctor.sort_key))


def find_isomorphism(A, B):
    if A.n != B.n or [len(c) for c in A.cells] != [len(c) for c in B.cells]:
        return None
    found = enumerate_nfunctors(A, B, first=True, injective=True, guard=None)
    return found[0] if found else None


def is_isomorphic(A, B):
    return find_isomorphism(A, B) is not None


# -- nerve levels -----------------------------------------------------------


def nerve_level(A, x):
    """Hom(x, A) for a Theta object x of depth A.n, as chain-encoded elements."""
    if x.depth != A.n:
        raise ValueError(f"{x} has depth {x.depth} but A has dimension {A.n}")
    return _chains(A, x, 0, None, None)


def _chains(A, x, r, s, t):
    memo = A.__dict__.setdefault("_chain_memo", {})
    key = (x, r, s, t)
    hit = memo.get(key)
    if hit is not None:
        return hit
    cands = A.cells[0] if r == 0 else A.between(r, s, t)
    if x.depth == 0:
        out = tuple(cands)
    else:
        out = []
        m = x.arity

        def rec(i, xs, subs):
            if i == m:
                out.append((xs, subs))
                return
            for y in cands:
                for sub in _chains(A, x.children[i], r + 1, xs[-1], y):
                    rec(i + 1, xs + (y,), subs + (sub,))

        for x0 in cands:
            rec(0, (x0,), ())
        out = tuple(out)
    memo[key] = out
    return out


def chain_cellmap(A, x, e, r=0):
    """Cell map real(x) -> A (levels shifted by r) of a chain element."""
    if x.depth == 0:
        return lambda k, c: e
    xs, subs = e
    kids = [chain_cellmap(A, c, s, r + 1) for c, s in zip(x.children, subs)]

    def F(k, c):
        if k == 0:
            return xs[c]
        i, j, cs = c
        if i == j:
            return A.ident_to(xs[i], r, r + k)
        acc = kids[i](k - 1, cs[0])
        for l in range(i + 1, j):
            acc = A.comp(r + k, r, kids[l](k - 1, cs[l - i]), acc)
        return acc

    return F


def extract(x, F):
    """The chain element of a cell map real(x) -> A."""
    if x.depth == 0:
        return F(0, "*")
    xs = tuple(F(0, i) for i in range(x.arity + 1))
    subs = tuple(extract(c, _shift(F, i)) for i, c in enumerate(x.children, 1))
    return (xs, subs)


def _shift(F, i):
    return lambda k, c: F(k + 1, (i - 1, i, (c,)))


def nerve_act(A, psi, e):
    """Precompose a chain element of Hom(psi.target, A) with psi."""
    F = chain_cellmap(A, psi.target, e)
    R = theta_cellmap(psi)
    return extract(psi.source, lambda k, c: F(k, R(k, c)))


# -- equivalences -----------------------------------------------------------


def equivalence_cells(A, k):
    """k-cells that are equivalences, computed from the top dimension down."""
    if not 1 <= k <= A.n:
        raise ValueError(f"k must lie in 1..{A.n}")
    n = A.n
    eq = {}
    for l in range(n, k - 1, -1):
        found = set()
        for f in A.cells[l]:
            s, t = A.src(l, f), A.tgt(l, f)
            for g in A.between(l, t, s):
                gf = A.comp(l, l - 1, g, f)
                fg = A.comp(l, l - 1, f, g)
                if l == n:
                    ok = gf == A.ident(l - 1, s) and fg == A.ident(l - 1, t)
                else:
                    ok = (_connected(A, l, gf, A.ident(l - 1, s), eq[l + 1])
                          and _connected(A, l, fg, A.ident(l - 1, t), eq[l + 1]))
                if ok:
                    found.add(f)
                    break
        eq[l] = frozenset(found)
    return eq[k]


def _connected(A, l, a, b, eqcells):
    return any(c in eqcells for c in A.between(l + 1, a, b))


def is_gaunt_in_dimension(A, k):
    return equivalence_cells(A, k) == A.identity_cells(k)


# -- expressions ------------------------------------------------------------


class NCatSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at column {pos + 1}: {text!r}")
        self.pos = pos


def parse_ncat(text):
    """Build from `ord(m)[@n]`, `susp(e)`, `glue(e1;e2;...)`, `prod(e1,e2)`,
    `isochain(p)@n`, `term@n`, `cell(<theta>)`."""
    s = text
    pos = 0

    def ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def word():
        nonlocal pos
        ws()
        st = pos
        while pos < len(s) and (s[pos].isalpha()):
            pos += 1
        return s[st:pos]

    def number():
        nonlocal pos
        ws()
        st = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if st == pos:
            raise NCatSyntaxError("expected a number", text, pos)
        return int(s[st:pos])

    def expect(ch):
        nonlocal pos
        ws()
        if pos >= len(s) or s[pos] != ch:
            raise NCatSyntaxError(f"expected {ch!r}", text, pos)
        pos += 1

    def at_dim(default=None):
        nonlocal pos
        ws()
        if pos < len(s) and s[pos] == "@":
            pos += 1
            return number()
        if default is None:
            raise NCatSyntaxError("expected @<dimension>", text, pos)
        return default

    def expr():
        nonlocal pos
        start = pos
        w = word()
        try:
            if w == "ord":
                expect("(")
                m = number()
                expect(")")
                return ordinal_ncat(m, at_dim(1))
            if w == "isochain":
                expect("(")
                p = number()
                expect(")")
                return iso_chain_flat(p, at_dim(1))
            if w == "term":
                return terminal_ncat(at_dim())
            if w == "susp":
                expect("(")
                e = expr()
                expect(")")
                return suspension(e)
            if w == "glue":
                expect("(")
                parts = [expr()]
                ws()
                while pos < len(s) and s[pos] == ";":
                    pos += 1
                    parts.append(expr())
                expect(")")
                return glue_many(parts)
            if w == "prod":
                expect("(")
                a = expr()
                expect(",")
                b = expr()
                expect(")")
                return product(a, b)
            if w == "cell":
                expect("(")
                depth = 0
                st = pos
                while pos < len(s) and not (s[pos] == ")" and depth == 0):
                    depth += {"(": 1, ")": -1}.get(s[pos], 0)
                    pos += 1
                x = parse_theta(s[st:pos])
                expect(")")
                return theta_ncat(x)
        except (ValueError, ThetaSyntaxError) as exc:
            if isinstance(exc, NCatSyntaxError):
                raise
            raise NCatSyntaxError(str(exc), text, start) from exc
        raise NCatSyntaxError(f"unknown constructor {w!r}", text, start)

    out = expr()
    ws()
    if pos != len(s):
        raise NCatSyntaxError("trailing input", text, pos)
    return out
