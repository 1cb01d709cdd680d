"""Lazy simplicial presheaves on Theta_n, their combinators and a brute-force hom oracle."""
from __future__ import annotations

import itertools
import json
import random
from functools import lru_cache
from dataclasses import dataclass, field

from ._order import csorted
from .delta_core import OrdinalMap, enumerate_ordinal_maps
from .reports import term
from .strict_ncat import nerve_act, nerve_level, parse_ncat
from .theta_cell import (compose, hom_theta, identity, parse_theta, pi_morphism, pi_object, point_at,
                         suspend_morphism, suspend_object, tau_morphism, tau_object, vertex_map)


class Presheaf:
    """Evaluation contract: eval(x, p) is a tuple of canonical elements,
    act(psi, p, e) restricts along psi: x' -> x, dact(alpha, x, e) along alpha: [q] -> [p]."""

    discrete = True

    def __init__(self, depth, label):
        self.depth = depth
        self.label = label
        self._memo = {}

    def eval(self, x, p=0):
        if x.depth != self.depth:
            raise ValueError(f"{self.label} lives on Theta_{self.depth}, got {x}")
        key = x if self.discrete else (x, p)
        out = self._memo.get(key)
        if out is None:
            out = self._memo.setdefault(key, tuple(csorted(set(self._eval(x, p)))))
        return out

    def count(self, x, p=0):
        return len(self.eval(x, p))

    def _eval(self, x, p):
        raise NotImplementedError

    def act(self, psi, p, e):
        raise NotImplementedError

    def dact(self, alpha, x, e):
        if self.discrete:
            return e
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.label} on Theta_{self.depth}>"


class Representable(Presheaf):
    def __init__(self, theta):
        super().__init__(theta.depth, f"F({theta})")
        self.theta = theta

    def _eval(self, x, p):
        return hom_theta(x, self.theta)

    def act(self, psi, p, e):
        return compose(e, psi)


class Nerve(Presheaf):
    def __init__(self, A):
        super().__init__(A.n, f"N({A.name})")
        self.ncat = A

    def _eval(self, x, p):
        return nerve_level(self.ncat, x)

    def act(self, psi, p, e):
        return nerve_act(self.ncat, psi, e)


class WalkingEquivalence(Presheaf):
    """pi^*E(p): labelings of the top spine of x by objects of I(p)."""

    def __init__(self, p, depth):
        assert depth >= 1
        super().__init__(depth, f"E({p})")
        self.p = p

    def _eval(self, x, q):
        return itertools.product(range(self.p + 1), repeat=x.arity + 1)

    def act(self, psi, q, e):
        return tuple(e[v] for v in psi.delta.values)


class Terminal(Presheaf):
    def __init__(self, depth):
        super().__init__(depth, "term")

    def _eval(self, x, p):
        return ("*",)

    def act(self, psi, p, e):
        return e


class Empty(Presheaf):
    def __init__(self, depth):
        super().__init__(depth, "empty")

    def _eval(self, x, p):
        return ()

    def act(self, psi, p, e):
        raise ValueError("the empty presheaf has no elements")


class Product(Presheaf):
    def __init__(self, X, Y):
        assert X.depth == Y.depth
        super().__init__(X.depth, f"times({X.label};{Y.label})")
        self.X, self.Y = X, Y
        self.discrete = X.discrete and Y.discrete

    def _eval(self, x, p):
        return [(a, b) for a in self.X.eval(x, p) for b in self.Y.eval(x, p)]

    def act(self, psi, p, e):
        return (self.X.act(psi, p, e[0]), self.Y.act(psi, p, e[1]))

    def dact(self, alpha, x, e):
        return (self.X.dact(alpha, x, e[0]), self.Y.dact(alpha, x, e[1]))


class Coproduct(Presheaf):
    def __init__(self, X, Y):
        assert X.depth == Y.depth
        super().__init__(X.depth, f"plus({X.label};{Y.label})")
        self.parts = (X, Y)
        self.discrete = X.discrete and Y.discrete

    def _eval(self, x, p):
        return [(i, e) for i, X in enumerate(self.parts) for e in X.eval(x, p)]

    def act(self, psi, p, e):
        return (e[0], self.parts[e[0]].act(psi, p, e[1]))

    def dact(self, alpha, x, e):
        return (e[0], self.parts[e[0]].dact(alpha, x, e[1]))


class ConstantSimplex(Presheaf):
    """Delta[p] viewed as a presheaf constant in the Theta direction."""

    discrete = False

    def __init__(self, p, depth):
        super().__init__(depth, f"Delta({p})")
        self.p = p

    def _eval(self, x, q):
        return enumerate_ordinal_maps(q, self.p)

    def act(self, psi, q, e):
        return e

    def dact(self, alpha, x, e):
        return e.compose(alpha)


class Intertwine(Presheaf):
    """V[m](X_1, ..., X_m) on Theta_depth, for X_j on Theta_{depth-1}.

    Elements are (delta values, factors) with factors listed by (i, j),
    i over the probe's top arity and j in (delta(i-1), delta(i)]."""

    def __init__(self, parts, depth):
        assert depth >= 1 and all(X.depth == depth - 1 for X in parts)
        super().__init__(depth, f"V{len(parts)}(" + ";".join(X.label for X in parts) + ")")
        self.parts = tuple(parts)
        self.discrete = all(X.discrete for X in parts)

    def _eval(self, x, p):
        out = []
        for d in enumerate_ordinal_maps(x.arity, len(self.parts)):
            keys = _block_keys(d)
            choices = [self.parts[j - 1].eval(x.children[i - 1], p) for i, j in keys]
            for picks in itertools.product(*choices):
                out.append((d.values, picks))
        return out

    def act(self, psi, p, e):
        values, picks = e
        d = OrdinalMap(psi.target.arity, len(self.parts), values)
        old = dict(zip(_block_keys(d), picks))
        phi = psi.delta
        nd = d.compose(phi)
        new = []
        for i2, j in _block_keys(nd):
            # the unique i in (phi(i2-1), phi(i2)] whose delta-range covers j
            i = next(i for i in range(phi(i2 - 1) + 1, phi(i2) + 1) if d(i - 1) < j <= d(i))
            new.append(self.parts[j - 1].act(psi.block(i2, i), p, old[(i, j)]))
        return (nd.values, tuple(new))

    def dact(self, alpha, x, e):
        values, picks = e
        keys = _block_keys(OrdinalMap(x.arity, len(self.parts), values))
        return (values, tuple(self.parts[j - 1].dact(alpha, x.children[i - 1], a) for (i, j), a in zip(keys, picks)))


def _block_keys(d):
    return [(i, j) for i in range(1, d.source + 1) for j in range(d(i - 1) + 1, d(i) + 1)]


def intertwine(parts, depth=None):
    if depth is None:
        depth = parts[0].depth + 1
    return Intertwine(parts, depth)


def degenerate(W, e, p):
    """The constant p-simplex on an element of W([0], 0)."""
    if p == 0:
        return e
    return W.dact(OrdinalMap(p, 0, (0,) * (p + 1)), point_at(W.depth), e)


class MappingObject(Presheaf):
    """map_W(x, y) on Theta_{n-1}: the fiber of W([1](c)) over (x, y)."""

    def __init__(self, W, x, y):
        assert W.depth >= 1
        if x not in W.eval(point_at(W.depth), 0) or y not in W.eval(point_at(W.depth), 0):
            raise ValueError("mapping object endpoints must be elements of W([0], 0)")
        super().__init__(W.depth - 1, f"map({W.label})")
        self.W, self.x, self.y = W, x, y
        self.discrete = W.discrete

    def _eval(self, c, p):
        W = self.W
        s = suspend_object(c)
        v0, v1 = vertex_map(s, 0), vertex_map(s, 1)
        dx, dy = degenerate(W, self.x, p), degenerate(W, self.y, p)
        return [w for w in W.eval(s, p) if W.act(v0, p, w) == dx and W.act(v1, p, w) == dy]

    def act(self, psi, p, e):
        return self.W.act(suspend_morphism(psi), p, e)

    def dact(self, alpha, c, e):
        return self.W.dact(alpha, suspend_object(c), e)


class TauPullback(Presheaf):
    """Restriction of X on Theta_n along Theta_k -> Theta_n."""

    def __init__(self, X, k):
        super().__init__(k, f"tau*({X.label})")
        self.X = X
        self.discrete = X.discrete

    def _eval(self, x, p):
        return self.X.eval(tau_object(x, self.X.depth), p)

    def act(self, psi, p, e):
        return self.X.act(tau_morphism(psi, self.X.depth), p, e)

    def dact(self, alpha, x, e):
        return self.X.dact(alpha, tau_object(x, self.X.depth), e)


class PiPullback(Presheaf):
    """Restriction of X on Theta_k along Theta_n -> Theta_k."""

    def __init__(self, X, n):
        super().__init__(n, f"pi*({X.label})")
        self.X = X
        self.discrete = X.discrete

    def _eval(self, x, p):
        return self.X.eval(pi_object(x, self.X.depth), p)

    def act(self, psi, p, e):
        return self.X.act(pi_morphism(psi, self.X.depth), p, e)

    def dact(self, alpha, x, e):
        return self.X.dact(alpha, pi_object(x, self.X.depth), e)


class LevelPresheaf(Presheaf):
    """The discrete presheaf x -> X(x, p) at a fixed simplicial degree."""

    def __init__(self, X, p):
        super().__init__(X.depth, f"{X.label}[p={p}]")
        self.X, self.p = X, p

    def _eval(self, x, q):
        return self.X.eval(x, self.p)

    def act(self, psi, q, e):
        return self.X.act(psi, self.p, e)


class Diagonal(Presheaf):
    """diag(X)_{x,p} = (X_p)_{x,p}.

    family(p) returns a presheaf; reindex(alpha, x, e) sends an element of
    family(p)(x, q) to family(q)(x, q) for alpha: [q] -> [p]."""

    discrete = False

    def __init__(self, family, reindex, depth, label="diag"):
        super().__init__(depth, label)
        self.family = family
        self.reindex = reindex
        self._members = {}

    def member(self, p):
        if p not in self._members:
            self._members[p] = self.family(p)
        return self._members[p]

    def _eval(self, x, p):
        return self.member(p).eval(x, p)

    def act(self, psi, p, e):
        return self.member(p).act(psi, p, e)

    def dact(self, alpha, x, e):
        inner = self.member(alpha.target).dact(alpha, x, e)
        return self.reindex(alpha, x, inner)

    def audit(self, objects, degrees, seed=0, samples=50):
        """Check the simplicial action is functorial on sampled pairs; raise on incoherence."""
        rng = random.Random(seed)
        for x in objects:
            for p in degrees:
                for q in degrees:
                    for r in degrees:
                        pairs = [(a, b) for a in enumerate_ordinal_maps(q, p) for b in enumerate_ordinal_maps(r, q)]
                        for a, b in rng.sample(pairs, min(samples, len(pairs))):
                            for e in self.eval(x, p)[:samples]:
                                lhs = self.dact(a.compose(b), x, e)
                                rhs = self.dact(b, x, self.dact(a, x, e))
                                if lhs != rhs:
                                    raise ValueError(f"incoherent family actions at {x}, {a}, {b}")
        return True


class GraphPresheaf(Presheaf):
    """The 1-skeletal simplicial set freely generated by a directed graph."""

    def __init__(self, vertices, edges, label="graph"):
        super().__init__(1, label)
        self.vertices = tuple(vertices)
        self.edges = dict(edges)  # name -> (src, tgt)

    def _eval(self, x, p):
        m = x.arity
        out = [("v", v) for v in self.vertices]
        for e in self.edges:
            for cut in range(1, m + 1):
                out.append(("e", e, (0,) * cut + (1,) * (m + 1 - cut)))
        return out

    def act(self, psi, p, e):
        if e[0] == "v":
            return e
        vals = tuple(e[2][v] for v in psi.delta.values)
        if len(set(vals)) == 1:
            s, t = self.edges[e[1]]
            return ("v", s if vals[0] == 0 else t)
        return ("e", e[1], vals)


# -- maps of presheaves ------------------------------------------------------


@dataclass
class PresheafMap:
    source: Presheaf
    target: Presheaf
    component: object  # (x, p, e) -> element of target(x, p)
    label: str = "f"

    def __call__(self, x, p, e):
        return self.component(x, p, e)

    def then(self, other):
        return PresheafMap(self.source, other.target, lambda x, p, e: other(x, p, self(x, p, e)),
                           f"{other.label}.{self.label}")


def identity_map(X):
    return PresheafMap(X, X, lambda x, p, e: e, "id")


def nerve_map(A, B, F):
    """N(F) for an n-functor F: A -> B, acting on chain elements."""
    from .strict_ncat import chain_cellmap, extract
    NA, NB = Nerve(A), Nerve(B)

    def comp(x, p, e):
        G = chain_cellmap(A, x, e)
        return extract(x, lambda k, c: F(k, G(k, c)))

    return PresheafMap(NA, NB, comp, "N(F)")


def audit_naturality(f, objects, degrees=(0,), seed=0, samples=200):
    """Sampled check that f commutes with the Theta and simplicial operators."""
    rng = random.Random(seed)
    X, Y = f.source, f.target
    cases = []
    for x in objects:
        for x2 in objects:
            for psi in hom_theta(x2, x):
                for p in degrees:
                    for e in X.eval(x, p):
                        cases.append(("t", psi, p, e))
    for case in rng.sample(cases, min(samples, len(cases))):
        _, psi, p, e = case
        if f(psi.source, p, X.act(psi, p, e)) != Y.act(psi, p, f(psi.target, p, e)):
            return case
    for x in objects:
        for p in degrees:
            for q in degrees:
                for a in enumerate_ordinal_maps(q, p):
                    for e in X.eval(x, p):
                        if f(x, q, X.dact(a, x, e)) != Y.dact(a, x, f(x, p, e)):
                            return ("d", a, x, e)
    return None


def audit_functoriality(X, objects, degrees=(0,), seed=0, samples=200):
    """act(g o f) = act(f) after act(g) on sampled composable pairs; returns a failing case or None."""
    rng = random.Random(seed)
    triples = []
    for a in objects:
        for b in objects:
            for c in objects:
                for f in hom_theta(a, b):
                    for g in hom_theta(b, c):
                        triples.append((f, g))
    for f, g in rng.sample(triples, min(samples, len(triples))):
        for p in degrees:
            elems = X.eval(g.target, p)
            for e in rng.sample(list(elems), min(3, len(elems))):
                if X.act(compose(g, f), p, e) != X.act(f, p, X.act(g, p, e)):
                    return (f, g, p, e)
    return None


# -- truncations and the oracle ----------------------------------------------


def slot_operators(slots, generating=True):
    """Theta operators between same-degree slots and simplicial operators between same-object slots.

    With generating=True only Theta operators that do not factor through a smaller slot object are
    kept, provided their composites recover every operator; naturality then follows for the rest."""
    objects = tuple(dict.fromkeys(x for x, _ in slots))
    keep = _generating_operators(objects) if generating else None
    ops = []
    for x, p in slots:
        for y, q in slots:
            if p == q:
                for psi in hom_theta(x, y):
                    if not (x == y and psi == identity(x)) and (keep is None or psi in keep):
                        ops.append(("theta", (y, p), (x, p), psi))
            elif x == y:
                for a in enumerate_ordinal_maps(p, q):
                    ops.append(("delta", (y, q), (x, p), a))
    return ops


@lru_cache(maxsize=None)
def _generating_operators(objects):
    arrows = {(x, y): [f for f in hom_theta(x, y) if not (x == y and f == identity(x))]
              for x in objects for y in objects}
    composites = set()
    for x in objects:
        for z in objects:
            for y in objects:
                if z.total_arity() >= max(x.total_arity(), y.total_arity()):
                    continue  # only factor through smaller shapes, so the factoring terminates
                for g in arrows[(z, y)]:
                    for f in arrows[(x, z)]:
                        composites.add(compose(g, f))
    gens = {f for fs in arrows.values() for f in fs if f not in composites}
    # closure check: composites of generators must reach every operator
    reached = set(gens)
    frontier = set(gens)
    while frontier:
        new = set()
        for f in frontier:
            for g in gens:
                if g.source == f.target:
                    h = compose(g, f)
                    if not (h.source == h.target and h == identity(h.source)) and h not in reached:
                        new.add(h)
        reached |= new
        frontier = new
    if reached != {f for fs in arrows.values() for f in fs}:
        return None
    return frozenset(gens)


def _apply(X, op, e):
    kind, (y, q), (x, p), g = op
    if kind == "theta":
        return X.act(g, p, e)
    return X.dact(g, y, e)


@dataclass
class TruncatedHom:
    families: list | None
    slots: list
    caveats: list = field(default_factory=list)
    total: int = 0

    @property
    def count(self):
        return self.total


def truncated_hom(X, W, slots, limit=None, keep=True):
    """All families X(s) -> W(s), s in slots, natural for every operator among the slots.

    Each operator is a functional constraint between an element and its restriction; domains
    are kept arc consistent while branching on the smallest open domain."""
    slots = list(dict.fromkeys(slots))
    ops = slot_operators(slots)
    Xe = {s: X.eval(*s) for s in slots}
    We = {s: W.eval(*s) for s in slots}
    # elements are interned as indices; a variable is (slot position, X-element index)
    pos = {s: i for i, s in enumerate(slots)}
    xi = {s: {e: i for i, e in enumerate(Xe[s])} for s in slots}
    wi = {s: {w: i for i, w in enumerate(We[s])} for s in slots}
    down = [[] for _ in slots]  # per source slot: (target slot, x-table, w-table)
    for op in ops:
        src, tgt = op[1], op[2]
        xt = [xi[tgt][_apply(X, op, e)] for e in Xe[src]]
        wt = [wi[tgt][_apply(W, op, w)] for w in We[src]]
        down[pos[src]].append((pos[tgt], xt, wt))
    up = {}  # (target slot, x index) -> [(source slot, source x index, w-table)]
    for si, outs in enumerate(down):
        for ti, xt, wt in outs:
            for e, e2 in enumerate(xt):
                up.setdefault((ti, e2), []).append((si, e, wt))

    domain = [[set(range(len(We[s]))) for _ in Xe[s]] for s in slots]

    def propagate(queue, trail):
        queued = set(queue)
        while queue:
            si, e = queue.pop()
            queued.discard((si, e))
            D = domain[si][e]
            # restrictions of this element may only take values hit from D
            for ti, xt, wt in down[si]:
                T = domain[ti][xt[e]]
                gone = T - {wt[w] for w in D}
                if gone:
                    T -= gone
                    trail.extend((ti, xt[e], v) for v in gone)
                    if not T:
                        return False
                    if (ti, xt[e]) not in queued:
                        queued.add((ti, xt[e]))
                        queue.append((ti, xt[e]))
            # values of larger elements must restrict into D
            for sj, e_src, wt in up.get((si, e), ()):
                S = domain[sj][e_src]
                gone = {w for w in S if wt[w] not in D}
                if gone:
                    S -= gone
                    trail.extend((sj, e_src, w) for w in gone)
                    if not S:
                        return False
                    if (sj, e_src) not in queued:
                        queued.add((sj, e_src))
                        queue.append((sj, e_src))
        return True

    variables = [(i, e) for i, s in enumerate(slots) for e in range(len(Xe[s]))]
    families = [] if keep else None
    total = 0
    if any(not domain[i][e] for i, e in variables) or not propagate(list(variables), []):
        return TruncatedHom(families, slots, [], 0)

    def dfs():
        nonlocal total
        if limit is not None and total >= limit:
            return
        best, size = None, None
        for i, e in variables:
            n = len(domain[i][e])
            if n > 1 and (size is None or n < size):
                best, size = (i, e), n
                if n == 2:
                    break
        if best is None:
            total += 1
            if keep:
                families.append({(slots[i], Xe[slots[i]][e]): We[slots[i]][next(iter(domain[i][e]))]
                                 for i, e in variables})
            return
        si, e = best
        for val in sorted(domain[si][e]):
            D = domain[si][e]
            trail = [(si, e, w) for w in D if w != val]
            D.intersection_update((val,))
            if propagate([(si, e)], trail):
                dfs()
            for i, ej, w in trail:
                domain[i][ej].add(w)

    dfs()
    return TruncatedHom(families, slots, ["counts families on the listed slots only; stabilization is not proven"],
                        total)


def window_slots(depth, max_arity, degrees=(0,)):
    from .theta_cell import theta_objects
    return [(x, p) for x in theta_objects(depth, max_arity) for p in degrees]


def truncation_json(X, slots):
    ops = slot_operators(slots)
    data = {
        "schema": 1,
        "presheaf": X.label,
        "slots": [{"theta": str(x), "p": p, "elements": [term(e) for e in X.eval(x, p)]} for x, p in slots],
        "actions": [],
    }
    for op in ops:
        kind, (y, q), (x, p), g = op
        data["actions"].append({
            "kind": kind, "from": [str(y), q], "to": [str(x), p], "operator": str(g),
            "table": [[term(e), term(_apply(X, op, e))] for e in X.eval(y, q)],
        })
    return json.dumps(data, indent=1)


# -- expressions -------------------------------------------------------------


class PresheafSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at column {pos + 1}: {text!r}")
        self.pos = pos


def parse_presheaf(text):
    """Parse a depth-polymorphic expression; returns a function depth -> Presheaf.

    Grammar: empty | term | F(<theta>) | E(<p>) | N(<ncat>) | Delta(<p>)
             | V<m>(X1;...;Xm) | times(X;Y) | plus(X;Y)"""
    s = text
    pos = 0

    def ws():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def expect(ch):
        nonlocal pos
        ws()
        if pos >= len(s) or s[pos] != ch:
            raise PresheafSyntaxError(f"expected {ch!r}", text, pos)
        pos += 1

    def balanced():
        nonlocal pos
        depth, st = 0, pos
        while pos < len(s) and not (depth == 0 and s[pos] in ");"):
            depth += {"(": 1, ")": -1}.get(s[pos], 0)
            pos += 1
        return s[st:pos]

    def number():
        nonlocal pos
        ws()
        st = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if st == pos:
            raise PresheafSyntaxError("expected a number", text, pos)
        return int(s[st:pos])

    def expr():
        nonlocal pos
        ws()
        start = pos
        while pos < len(s) and s[pos].isalpha():
            pos += 1
        w = s[start:pos]
        if w == "empty":
            return Empty
        if w == "term":
            return Terminal
        if w == "F":
            expect("(")
            at = pos
            raw = balanced()
            expect(")")
            try:
                th = parse_theta(raw)
            except ValueError as exc:
                raise PresheafSyntaxError(str(exc), text, at) from exc
            return lambda d: Representable(tau_object(th, d))
        if w == "E":
            expect("(")
            p = number()
            expect(")")
            return lambda d: WalkingEquivalence(p, d)
        if w == "Delta":
            expect("(")
            p = number()
            expect(")")
            return lambda d: ConstantSimplex(p, d)
        if w == "N":
            expect("(")
            at = pos
            raw = balanced()
            expect(")")
            try:
                A = parse_ncat(raw)
            except ValueError as exc:
                raise PresheafSyntaxError(str(exc), text, at) from exc

            def mk(d):
                if d != A.n:
                    raise PresheafSyntaxError(f"nerve of a {A.n}-category used at depth {d}", text, start)
                return Nerve(A)
            return mk
        if w in ("times", "plus"):
            expect("(")
            a = expr()
            expect(";")
            b = expr()
            expect(")")
            ctor = Product if w == "times" else Coproduct
            return lambda d: ctor(a(d), b(d))
        if w == "V":
            m = number()
            expect("(")
            parts = []
            ws()
            if m > 0:
                parts.append(expr())
                ws()
                while pos < len(s) and s[pos] == ";":
                    pos += 1
                    parts.append(expr())
            expect(")")
            if len(parts) != m:
                raise PresheafSyntaxError(f"V{m} needs {m} arguments, got {len(parts)}", text, start)

            def mk(d):
                if d < 1:
                    raise PresheafSyntaxError("V needs depth at least 1", text, start)
                return Intertwine([f(d - 1) for f in parts], d)
            return mk
        raise PresheafSyntaxError(f"unknown presheaf constructor {w!r}", text, start)

    out = expr()
    ws()
    if pos != len(s):
        raise PresheafSyntaxError("trailing input", text, pos)
    return out
