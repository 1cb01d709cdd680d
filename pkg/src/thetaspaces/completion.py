"""Explicit precompletions of discrete nerves and the comparison maps into them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .delta_core import (FiniteCategory, FiniteGroupoid, Functor, NatTrans, functor_category, groupoid_core,
                         iso_chain, ordinal)
from .presheaf_engine import (Intertwine, PresheafMap, Presheaf, Product, Representable, WalkingEquivalence,
                              Nerve)
from .reports import CheckReport, SizeGuardExceeded, term
from .segal_complete import (check_completeness, check_dk, check_levelwise_bijection, check_segal,
                             presented_groupoid)
from .strict_ncat import (chain_cellmap, enriched, enumerate_nfunctors, from_category, iso_chain_flat, product,
                          theta_cellmap, theta_ncat)
from .theta_cell import tau_object, theta_objects

MAX_CELLS = 64
MAX_ARITY = 6
MAX_P = 4


def check_guards(A, x=None, p=0, force=False):
    if force:
        return
    if A.size() > MAX_CELLS:
        raise SizeGuardExceeded(f"{A.name} has {A.size()} cells (limit {MAX_CELLS})", A.size())
    if x is not None and x.total_arity() > MAX_ARITY:
        raise SizeGuardExceeded(f"{x} has total arity {x.total_arity()} (limit {MAX_ARITY})", x.total_arity())
    if p > MAX_P:
        raise SizeGuardExceeded(f"degree {p} exceeds the limit {MAX_P}", p)


@dataclass
class PresentedLevel:
    count: int
    elements: tuple | None = None
    groupoid: FiniteGroupoid | None = None
    provenance: str = "recursive"

    def __len__(self):
        return self.count

    def to_json(self):
        out = {"count": self.count, "provenance": self.provenance}
        if self.groupoid is not None:
            out["groupoid"] = {"objects": len(self.groupoid.objects), "morphisms": len(self.groupoid.morphisms),
                               "components": len(self.groupoid.components())}
        if self.elements is not None:
            out["elements"] = term(self.elements)
        return out


def nerve_count(G, p):
    """Number of p-simplices of the nerve of a finite category."""
    obs = G.objects
    vec = {x: 1 for x in obs}
    for _ in range(p):
        vec = {y: sum(vec[x] * len(G.hom(x, y)) for x in obs) for y in obs}
    return sum(vec.values())


# -- dimension one: the grid algorithm -----------------------------------------

MATERIALIZE_LIMIT = 100_000


def diagram_chains(C, m):
    """Functors [m] -> C as (objects, morphisms)."""
    out = []

    def chain(obs, hs):
        if len(hs) == m:
            out.append((obs, hs))
            return
        for h in C.hom_from(obs[-1]):
            chain(obs + (C.target[h],), hs + (h,))

    for x in C.objects:
        chain((x,), ())
    return out


def _row_moves(C, m):
    """For each row, the vertical iso tuples out of it and the rows they force."""
    isos_from = {x: [f for f in C.hom_from(x) if C.is_iso(f)] for x in C.objects}
    inverse = {f: C.inverse_of(f) for fs in isos_from.values() for f in fs}

    def moves(row):
        obs, hs = row
        for vs in itertools.product(*(isos_from[x] for x in obs)):
            new_hs = tuple(C.compose(vs[a + 1], C.compose(hs[a], inverse[vs[a]])) for a in range(m))
            yield vs, (tuple(C.target[v] for v in vs), new_hs)
    return moves


def grid_transfer(C, m):
    """Row-to-row counts: how many vertical iso tuples carry one row onto another."""
    moves = _row_moves(C, m)
    T = {}
    for row in diagram_chains(C, m):
        out = T.setdefault(row, {})
        for _, new in moves(row):
            out[new] = out.get(new, 0) + 1
    return T


def transfer_count(T, p):
    vec = {row: 1 for row in T}
    for _ in range(p):
        nxt = dict.fromkeys(T, 0)
        for row, c in vec.items():
            for new, k in T[row].items():
                nxt[new] += c * k
        vec = nxt
    return sum(vec.values())


def grid_functors(C, m, p):
    """Functors [m] x I(p) -> C as (rows, vertical isomorphisms): the first row is a chain,
    each later row is forced by the vertical isomorphisms out of the previous one."""
    moves = _row_moves(C, m)
    out = []

    def extend(rows, verts):
        if len(rows) == p + 1:
            out.append((tuple(rows), tuple(verts)))
            return
        for vs, new in moves(rows[-1]):
            extend(rows + [new], verts + [vs])

    for row in diagram_chains(C, m):
        extend([row], [])
    return out


def iso_diagram_groupoid(C, m):
    """Iso(C^[m]): chains in C with natural isomorphisms."""
    return groupoid_core(functor_category(ordinal(m), C))


def classifying_diagram_level(C, m, p, present=False):
    """Fun([m] x I(p), C), counted through the row transfer of the grid algorithm."""
    T = grid_transfer(C, m)
    count = transfer_count(T, p)
    elements = tuple(grid_functors(C, m, p)) if count <= MATERIALIZE_LIMIT else None
    if elements is not None and len(elements) != count:
        raise AssertionError("grid enumeration disagrees with its transfer count")
    G = None
    if present:
        G = iso_diagram_groupoid(C, m)
        if nerve_count(G, p) != count:
            raise AssertionError("presentation does not reproduce the level")
    return PresentedLevel(count, elements, G, "grid")


# -- Q diagrams ---------------------------------------------------------------


def q_presheaf(k, x, p):
    """Q^k_{x,p}: F(x) x pi*E(p) for k = 1, V[m](Q^{k-1}_{x_i,p}) above."""
    if k == 1:
        return Product(Representable(x), WalkingEquivalence(p, x.depth))
    if x.depth < k:
        raise ValueError(f"Q^{k} needs an object of depth at least {k}")
    return Intertwine([q_presheaf(k - 1, c, p) for c in x.children], x.depth)


def q_level(k, x, p, probe, q=0):
    return q_presheaf(k, x, p).eval(probe, q)


# -- the recursive precompletion ----------------------------------------------


@lru_cache(maxsize=None)
def base_shape(x, p):
    """The n-category real(x) x I(p) with only identities above dimension 1."""
    return product(theta_ncat(x), iso_chain_flat(p, x.depth))


def _iso_cellmap(alpha):
    def F(k, c):
        if k == 0:
            return alpha(c)
        return (alpha(c[0]), alpha(c[1]))
    return F


def _base_elements(B, x, p):
    return tuple(F.images for F in enumerate_nfunctors(base_shape(x, p), B))


def _base_precompose(images, src_shape, tgt_shape, cellmap):
    """Images of h o G where G: src_shape -> tgt_shape is given by a cell map."""
    out = []
    for k, level in enumerate(src_shape.cells):
        idx = tgt_shape.index[k]
        out.append(tuple(images[k][idx[cellmap(k, c)]] for c in level))
    return tuple(out)


def _product_map(F, G):
    return lambda k, c: (F(k, c[0]), G(k, c[1]))


def _ident_cellmap(k, c):
    return c


class Precompletion(Presheaf):
    """The dimension-k precompletion of the nerve of A, on Theta_n."""

    discrete = False

    def __init__(self, A, k, force=False):
        if not 1 <= k <= A.n:
            raise ValueError(f"k must lie in 1..{A.n}")
        check_guards(A, force=force)
        super().__init__(A.n, f"T{k}(N({A.name}))")
        self.ncat, self.k, self.force = A, k, force
        self._levels = {}

    def _eval(self, x, p):
        check_guards(self.ncat, x, p, self.force)
        return self._level(self.ncat, self.k, x, p)

    def _level(self, B, k, x, p):
        key = (id(B), k, x, p)
        hit = self._levels.get(key)
        if hit is not None:
            return hit
        if k == 1:
            out = _base_elements(B, x, p)
        else:
            out = []
            m = x.arity

            def rec(i, xs, subs):
                if i == m:
                    out.append((xs, subs))
                    return
                for y in B.objects:
                    for sub in self._level(B.hom(xs[-1], y), k - 1, x.children[i], p):
                        rec(i + 1, xs + (y,), subs + (sub,))

            for x0 in B.objects:
                rec(0, (x0,), ())
            out = tuple(out)
        self._levels[key] = out
        return out

    def act(self, psi, p, e):
        return self._act(self.ncat, self.k, psi, p, e)

    def _act(self, B, k, psi, p, e):
        if k == 1:
            return _base_precompose(e, base_shape(psi.source, p), base_shape(psi.target, p),
                                    _product_map(theta_cellmap(psi), _ident_cellmap))
        xs, subs = e
        phi = psi.delta
        m2 = psi.source.arity
        nxs = tuple(xs[phi(i)] for i in range(m2 + 1))
        nsubs = []
        for i in range(1, m2 + 1):
            child = psi.source.children[i - 1]
            js = range(phi(i - 1) + 1, phi(i) + 1)
            if not js:
                nsubs.append(_constant(B, k - 1, child, p, nxs[i], 1))
                continue
            acc = None
            for j in js:
                piece = self._act(B.hom(xs[j - 1], xs[j]), k - 1, psi.block(i, j), p, subs[j - 1])
                acc = piece if acc is None else _pointwise(B, k - 1, child, p, piece, acc, 1)
            nsubs.append(acc)
        return (nxs, tuple(nsubs))

    def dact(self, alpha, x, e):
        return self._dact(self.k, x, alpha, e)

    def _dact(self, k, x, alpha, e):
        if k == 1:
            return _base_precompose(e, base_shape(x, alpha.source), base_shape(x, alpha.target),
                                    _product_map(_ident_cellmap, _iso_cellmap(alpha)))
        xs, subs = e
        return (xs, tuple(self._dact(k - 1, c, alpha, s) for c, s in zip(x.children, subs)))

    def presented(self, x):
        elements = self.eval(x, 0)
        return PresentedLevel(len(elements), elements, presented_groupoid(self, x), "recursive")


def _pointwise(B, k, x, p, e2, e1, off):
    """Composite e2 o e1 along the 0-composition of B, cells of e at local level l sitting at B-level l + off."""
    if k == 1:
        shape = base_shape(x, p)
        return tuple(tuple(B.comp(l + off, 0, b, a) for a, b in zip(e1[l], e2[l])) for l in range(len(shape.cells)))
    xs1, subs1 = e1
    xs2, subs2 = e2
    xs = tuple(B.comp(off, 0, b, a) for a, b in zip(xs1, xs2))
    subs = tuple(_pointwise(B, k - 1, c, p, s2, s1, off + 1) for c, s1, s2 in zip(x.children, subs1, subs2))
    return (xs, subs)


def _constant(B, k, x, p, obj, off):
    """The identity element on a B-cell obj of level off - 1."""
    if k == 1:
        shape = base_shape(x, p)
        return tuple(tuple(B.ident_to(obj, off - 1, l + off) for _ in shape.cells[l]) for l in range(len(shape.cells)))
    unit = B.ident_to(obj, off - 1, off)
    xs = (unit,) * (x.arity + 1)
    return (xs, tuple(_constant(B, k - 1, c, p, unit, off + 1) for c in x.children))


def precompletion(A, k, force=False):
    memo = A.__dict__.setdefault("_precompletions", {})
    key = (k, force)
    if key not in memo:
        memo[key] = Precompletion(A, k, force)
    return memo[key]


def precompletion_level(A, k, x, p, present=False, force=False):
    T = precompletion(A, k, force)
    elements = T.eval(x, p)
    G = presented_groupoid(T, x) if present else None
    return PresentedLevel(len(elements), elements, G, "recursive")


# -- comparison maps ----------------------------------------------------------


def _eta_component(B, k, x, p, e):
    if k == 1:
        F = chain_cellmap(B, x, e)
        shape = base_shape(x, p)
        return tuple(tuple(F(l, c[0]) for c in shape.cells[l]) for l in range(len(shape.cells)))
    xs, subs = e
    return (xs, tuple(_eta_component(B.hom(xs[i], xs[i + 1]), k - 1, c, p, s)
                      for i, (c, s) in enumerate(zip(x.children, subs))))


def eta(A, k, force=False):
    """N(A) -> T^k N(A), precomposition along Q^k_{x,p} -> F(x)."""
    T = precompletion(A, k, force)
    return PresheafMap(Nerve(A), T, lambda x, p, e: _eta_component(A, k, x, p, e), f"eta{k}")


def _post(F, k, x, p, e, off=0):
    if k == 1:
        return tuple(tuple(F(l + off, c) for c in level) for l, level in enumerate(e))
    xs, subs = e
    return (tuple(F(off, y) for y in xs), tuple(_post(F, k - 1, c, p, s, off + 1) for c, s in zip(x.children, subs)))


def precompletion_map(F, k, force=False):
    """T^k N(F) for an n-functor F: A -> B."""
    return PresheafMap(precompletion(F.source, k, force), precompletion(F.target, k, force),
                       lambda x, p, e: _post(F, k, x, p, e), f"T{k}(F)")


def underlying_levels(n, k, max_arity):
    """Objects tau(y) with y of depth at most k - 2: where Q^k is representable."""
    out = []
    for j in range(0, k - 1):
        out.extend(tau_object(y, n) for y in theta_objects(j, max_arity))
    return list(dict.fromkeys(out))


def verify_eta_properties(A, k, max_arity=2, degrees=(0, 1), force=False):
    T = precompletion(A, k, force)
    objects = list(theta_objects(A.n, max_arity))
    out = {}
    out["segal"] = check_segal(T, objects, degrees)
    out["complete"] = check_completeness(T, k, objects, degrees)
    dk = check_dk(eta(A, k, force))
    out["dk"] = (CheckReport("dk", True, witnesses=[dk.to_json()]) if dk.verdict
                 else CheckReport("dk", False, counterexample=dk.first_failure()))
    e = eta(A, k, force)
    under = underlying_levels(A.n, k, max_arity)
    out["underlying"] = check_levelwise_bijection(e, under, degrees) if under else CheckReport(
        "levelwise_bijection", True, caveats=["no underlying levels below dimension k - 1"])
    inj = _injective(e, objects, degrees)
    out["monomorphism"] = inj
    return out


def _injective(f, objects, degrees):
    for x in objects:
        for p in degrees:
            src = f.source.eval(x, p)
            if len({f(x, p, e) for e in src}) != len(src):
                return CheckReport("monomorphism", False, counterexample=(str(x), p))
    return CheckReport("monomorphism", True, witnesses=[len(objects)])


# -- walking exponentials and the diagonal -------------------------------------


class WalkingExponential(Presheaf):
    """N(A)^{pi*E(p)}: discrete, x -> maps F(x) x pi*E(p) -> N(A)."""

    def __init__(self, A, p):
        super().__init__(A.n, f"N({A.name})^E({p})")
        self.ncat, self.p = A, p

    def _eval(self, x, q):
        return _base_elements(self.ncat, x, self.p)

    def act(self, psi, q, e):
        return _base_precompose(e, base_shape(psi.source, self.p), base_shape(psi.target, self.p),
                                _product_map(theta_cellmap(psi), _ident_cellmap))


def exponential_reindex(alpha, x, e):
    return _base_precompose(e, base_shape(x, alpha.source), base_shape(x, alpha.target),
                            _product_map(_ident_cellmap, _iso_cellmap(alpha)))


# -- total precompletion in dimension two ---------------------------------------


def ncat_to_category(H):
    assert H.n == 1
    return FiniteCategory(H.cells[0], {c: (H.src(1, c), H.tgt(1, c)) for c in H.cells[1]},
                          {x: H.ident(0, x) for x in H.cells[0]}, dict(H.comp_[(1, 0)]), validate=False)


def cotensor(A, p):
    """A 2-category with A's objects and hom(x, y) = Fun(I(p), hom_A(x, y))."""
    assert A.n == 2
    Ip = iso_chain(p)
    homs = {}

    def hom_cat(x, y):
        if (x, y) not in homs:
            H = ncat_to_category(A.hom(x, y))
            homs[(x, y)] = (H, functor_category(Ip, H))
        return homs[(x, y)]

    def hom(x, y):
        H, FC = hom_cat(x, y)
        return from_category(FC, 1, name=f"Fun(I({p}),hom)")

    def unit(x):
        H, _ = hom_cat(x, x)
        i = A.ident(0, x)
        return Functor(Ip, H, (i,) * len(Ip.objects), (A.ident(1, i),) * len(Ip.morphisms))

    def fcomp(x, y, z, d, c):
        H, _ = hom_cat(x, z)
        return Functor(Ip, H, tuple(A.comp(1, 0, b, a) for a, b in zip(c.ob, d.ob)),
                       tuple(A.comp(2, 0, b, a) for a, b in zip(c.mor, d.mor)))

    def hcomp(x, y, z, k, d, c):
        if k == 0:
            return fcomp(x, y, z, d, c)
        return NatTrans(fcomp(x, y, z, d.source, c.source), fcomp(x, y, z, d.target, c.target),
                        tuple(A.comp(2, 0, b, a) for a, b in zip(c.components, d.components)))

    return enriched(2, A.objects, hom, unit, hcomp, name=f"{A.name}^I({p})")


def _cotensor_reindex(alpha):
    Iq = iso_chain(alpha.source)

    def rf(F):
        return Functor(Iq, F.target, tuple(F.ob[alpha(i)] for i in Iq.objects),
                       tuple(F.mor[F.source.morphisms.index((alpha(i), alpha(j)))] for i, j in Iq.morphisms))

    def G(k, c):
        if k == 0:
            return c
        x, y, a = c
        if k == 1:
            return (x, y, rf(a))
        return (x, y, NatTrans(rf(a.source), rf(a.target), tuple(a.components[alpha(i)] for i in Iq.objects)))
    return G


class TotalPrecompletion(Presheaf):
    """T^1 T^2 N(A) for a 2-category A: level (x, p) is 2-functors real(x) x I(p) -> A^I(p)."""

    discrete = False

    def __init__(self, A, force=False):
        assert A.n == 2
        check_guards(A, force=force)
        super().__init__(2, f"T(N({A.name}))")
        self.ncat, self.force = A, force
        self._cot = {}

    def cot(self, p):
        if p not in self._cot:
            self._cot[p] = cotensor(self.ncat, p)
        return self._cot[p]

    def _eval(self, x, p):
        check_guards(self.ncat, x, p, self.force)
        return _base_elements(self.cot(p), x, p)

    def act(self, psi, p, e):
        return _base_precompose(e, base_shape(psi.source, p), base_shape(psi.target, p),
                                _product_map(theta_cellmap(psi), _ident_cellmap))

    def dact(self, alpha, x, e):
        inner = _base_precompose(e, base_shape(x, alpha.source), base_shape(x, alpha.target),
                                 _product_map(_ident_cellmap, _iso_cellmap(alpha)))
        G = _cotensor_reindex(alpha)
        return tuple(tuple(G(k, c) for c in level) for k, level in enumerate(inner))


def total_precompletion(A, force=False):
    if A.n == 1:
        return precompletion(A, 1, force)
    if A.n == 2:
        return TotalPrecompletion(A, force)
    raise SizeGuardExceeded("total precompletion is implemented for n <= 2 only", A.n)


def total_eta(A, force=False):
    """N(A) -> T N(A): an n-functor real(x) -> A becomes the constant diagram in the cotensor."""
    T = total_precompletion(A, force)
    if A.n == 1:
        return eta(A, 1, force)

    def comp(x, p, e):
        F = chain_cellmap(A, x, e)
        Ip = iso_chain(p)

        def const(a):
            # functor equality only sees the image tuples, so the target category is left implicit
            return Functor(Ip, None, (a,) * len(Ip.objects), (A.ident(1, a),) * len(Ip.morphisms))

        def cell(k, c):
            if k == 0:
                return c
            s, t = A.bsrc(k, c, 0), A.btgt(k, c, 0)
            if k == 1:
                return (s, t, const(c))
            return (s, t, NatTrans(const(A.src(2, c)), const(A.tgt(2, c)), (c,) * len(Ip.objects)))

        shape = base_shape(x, p)
        return tuple(tuple(cell(l, F(l, c[0])) for c in shape.cells[l]) for l in range(len(shape.cells)))

    return PresheafMap(Nerve(A), T, comp, "eta")
