"""The simplex category, finite categories and groupoids, functors between them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

from ._order import UnionFind, ckey, csorted
from .reports import CheckReport


@dataclass(frozen=True)
class OrdinalMap:
    """A weakly monotone map [source] -> [target]."""

    source: int
    target: int
    values: tuple

    def __post_init__(self):
        assert len(self.values) == self.source + 1, "wrong number of values"
        assert all(0 <= v <= self.target for v in self.values), "value out of range"
        assert all(a <= b for a, b in zip(self.values, self.values[1:])), "not monotone"

    def __call__(self, i):
        return self.values[i]

    def compose(self, other):
        """self after other."""
        assert other.target == self.source
        return OrdinalMap(other.source, self.target, tuple(self.values[v] for v in other.values))

    @staticmethod
    def identity(m):
        return OrdinalMap(m, m, tuple(range(m + 1)))

    def sort_key(self):
        return (self.source, self.target, self.values)

    def __str__(self):
        return "".join(map(str, self.values)) if self.target < 10 else str(list(self.values))


@lru_cache(maxsize=None)
def enumerate_ordinal_maps(m, n):
    out = [OrdinalMap(m, n, vs) for vs in itertools.combinations_with_replacement(range(n + 1), m + 1)]
    return tuple(out)


def coface(n, i):
    """The face map [n-1] -> [n] skipping i."""
    return OrdinalMap(n - 1, n, tuple(j if j < i else j + 1 for j in range(n)))


def codegeneracy(n, i):
    """The degeneracy [n+1] -> [n] hitting i twice."""
    return OrdinalMap(n + 1, n, tuple(j if j <= i else j - 1 for j in range(n + 2)))


def vertex(n, i):
    return OrdinalMap(0, n, (i,))


class FiniteCategory:
    """A finite category given by total tables, validated on construction."""

    def __init__(self, objects, morphisms, identities, composition, validate=True):
        self.objects = tuple(csorted(objects))
        self.source = {f: st[0] for f, st in morphisms.items()}
        self.target = {f: st[1] for f, st in morphisms.items()}
        self.morphisms = tuple(csorted(morphisms))
        self.identities = dict(identities)
        self.composition = dict(composition)
        self._hom = {}
        self._out = {}
        for f in self.morphisms:
            self._hom.setdefault((self.source[f], self.target[f]), []).append(f)
            self._out.setdefault(self.source[f], []).append(f)
        if validate:
            self.validate()

    def hom(self, x, y):
        return tuple(self._hom.get((x, y), ()))

    def src(self, f):
        return self.source[f]

    def tgt(self, f):
        return self.target[f]

    def identity(self, x):
        return self.identities[x]

    def compose(self, g, f):
        """g after f."""
        return self.composition[(g, f)]

    def composable(self):
        for f in self.morphisms:
            for g in self.hom_from(self.target[f]):
                yield g, f

    def hom_from(self, x):
        return self._out.get(x, [])

    def validate(self):
        objs = set(self.objects)
        for f in self.morphisms:
            if self.source[f] not in objs or self.target[f] not in objs:
                raise ValueError(f"morphism {f!r} has an unknown endpoint")
        for x in self.objects:
            i = self.identities.get(x)
            if i is None or self.source.get(i) != x or self.target.get(i) != x:
                raise ValueError(f"bad identity at {x!r}")
        pairs = list(self.composable())
        if len(pairs) != len(self.composition):
            raise ValueError("composition table is not exactly the composable pairs")
        for g, f in pairs:
            h = self.composition.get((g, f))
            if h is None:
                raise ValueError(f"missing composite {g!r} o {f!r}")
            if self.source[h] != self.source[f] or self.target[h] != self.target[g]:
                raise ValueError(f"composite {g!r} o {f!r} has wrong boundary")
        for f in self.morphisms:
            if self.compose(self.identities[self.target[f]], f) != f:
                raise ValueError(f"left unit fails at {f!r}")
            if self.compose(f, self.identities[self.source[f]]) != f:
                raise ValueError(f"right unit fails at {f!r}")
        for g, f in pairs:
            gf = self.composition[(g, f)]
            for h in self.hom_from(self.target[g]):
                if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                    raise ValueError(f"associativity fails at {h!r}, {g!r}, {f!r}")

    def inverse_of(self, f):
        for g in self.hom(self.target[f], self.source[f]):
            if (self.compose(g, f) == self.identities[self.source[f]]
                    and self.compose(f, g) == self.identities[self.target[f]]):
                return g
        return None

    def is_iso(self, f):
        return self.inverse_of(f) is not None

    def isomorphic(self, x, y):
        return next((f for f in self.hom(x, y) if self.is_iso(f)), None)

    def __eq__(self, other):
        return (isinstance(other, FiniteCategory) and self.objects == other.objects
                and self.morphisms == other.morphisms and self.source == other.source
                and self.target == other.target and self.identities == other.identities
                and self.composition == other.composition)

    __hash__ = None

    def __repr__(self):
        return f"FiniteCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"


class FiniteGroupoid(FiniteCategory):
    def __init__(self, objects, morphisms, identities, composition, inverse=None, validate=True):
        super().__init__(objects, morphisms, identities, composition, validate=validate)
        if inverse is None:
            inverse = {}
            for f in self.morphisms:
                g = self.inverse_of(f)
                if g is None:
                    raise ValueError(f"{f!r} is not invertible")
                inverse[f] = g
        self.inverse = dict(inverse)
        if validate:
            for f in self.morphisms:
                g = self.inverse[f]
                if (self.compose(g, f) != self.identities[self.source[f]]
                        or self.compose(f, g) != self.identities[self.target[f]]):
                    raise ValueError(f"inverse table wrong at {f!r}")

    @classmethod
    def of(cls, C, validate=False):
        return cls(C.objects, {f: (C.source[f], C.target[f]) for f in C.morphisms},
                   C.identities, C.composition, validate=validate)

    def components(self):
        uf = UnionFind(self.objects)
        for f in self.morphisms:
            uf.union(self.source[f], self.target[f])
        return csorted(tuple(csorted(c)) for c in uf.classes().values())

    def automorphism_group(self, x):
        return self.hom(x, x)


# -- standard categories ----------------------------------------------------


def ordinal(m):
    """The poset [m] = {0 < ... < m}; the morphism i<=j is named (i, j)."""
    mors = {(i, j): (i, j) for i in range(m + 1) for j in range(i, m + 1)}
    comp = {((j, k), (i, j)): (i, k) for i in range(m + 1) for j in range(i, m + 1) for k in range(j, m + 1)}
    return FiniteCategory(range(m + 1), mors, {i: (i, i) for i in range(m + 1)}, comp)


@lru_cache(maxsize=None)
def iso_chain(p):
    """The contractible groupoid I(p) on objects 0..p."""
    obs = range(p + 1)
    mors = {(i, j): (i, j) for i in obs for j in obs}
    comp = {((j, k), (i, j)): (i, k) for i in obs for j in obs for k in obs}
    inv = {(i, j): (j, i) for i in obs for j in obs}
    return FiniteGroupoid(obs, mors, {i: (i, i) for i in obs}, comp, inv)


def terminal():
    return ordinal(0)


def discrete(objects):
    if isinstance(objects, int):
        objects = range(objects)
    objects = list(objects)
    return FiniteGroupoid(objects, {("id", x): (x, x) for x in objects}, {x: ("id", x) for x in objects},
                          {(("id", x), ("id", x)): ("id", x) for x in objects})


def product(C, D):
    obs = [(x, y) for x in C.objects for y in D.objects]
    mors = {(f, g): ((C.source[f], D.source[g]), (C.target[f], D.target[g]))
            for f in C.morphisms for g in D.morphisms}
    ids = {(x, y): (C.identities[x], D.identities[y]) for x, y in obs}
    comp = {}
    for f2, f1 in C.composable():
        for g2, g1 in D.composable():
            comp[((f2, g2), (f1, g1))] = (C.compose(f2, f1), D.compose(g2, g1))
    return FiniteCategory(obs, mors, ids, comp)


def commutative_square():
    return product(ordinal(1), ordinal(1))


# -- functors ---------------------------------------------------------------


@dataclass(frozen=True)
class Functor:
    """Object and morphism images listed in the source's canonical order."""

    source: FiniteCategory
    target: FiniteCategory
    ob: tuple
    mor: tuple

    @cached_property
    def _hash(self):
        return hash((self.ob, self.mor))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Functor) and self._hash == other._hash
                                 and self.ob == other.ob and self.mor == other.mor)

    def on_object(self, x):
        return self.ob[self.source.objects.index(x)]

    def on_morphism(self, f):
        return self.mor[self.source.morphisms.index(f)]

    def compose(self, other):
        """self after other."""
        return Functor(other.source, self.target,
                       tuple(self.on_object(x) for x in other.ob),
                       tuple(self.on_morphism(f) for f in other.mor))

    @cached_property
    def _key(self):
        return (ckey(self.ob), ckey(self.mor))

    def sort_key(self):
        return self._key

    def __repr__(self):
        return f"Functor(ob={self.ob}, mor={self.mor})"


def identity_functor(C):
    return Functor(C, C, C.objects, C.morphisms)


def _functor_search(C, D, fixed_ob=None):
    ob_index = {x: i for i, x in enumerate(C.objects)}
    ids = set(C.identities.values())
    # non-identity morphisms, those that are not composites of others first
    decomposable = {h for (g, f), h in C.composition.items() if g not in ids and f not in ids and h not in (g, f)}
    free = [f for f in C.morphisms if f not in ids and f not in decomposable]
    rest = [f for f in C.morphisms if f not in ids and f in decomposable]
    order = free + rest
    by_mor = {}
    for (g, f), h in C.composition.items():
        for x in (g, f, h):
            by_mor.setdefault(x, []).append((g, f, h))

    ob_choices = [D.objects] * len(C.objects)
    if fixed_ob is not None:
        ob_choices = [(fixed_ob[x],) if x in fixed_ob else D.objects for x in C.objects]

    for obs in itertools.product(*ob_choices):
        F = {x: obs[ob_index[x]] for x in C.objects}
        M = {C.identities[x]: D.identities[F[x]] for x in C.objects}

        def consistent(f):
            for g1, f1, h1 in by_mor.get(f, ()):
                if g1 in M and f1 in M and h1 in M and D.compose(M[g1], M[f1]) != M[h1]:
                    return False
            return True

        def rec(i):
            if i == len(order):
                yield Functor(C, D, obs, tuple(M[f] for f in C.morphisms))
                return
            f = order[i]
            for v in D.hom(F[C.source[f]], F[C.target[f]]):
                M[f] = v
                if consistent(f):
                    yield from rec(i + 1)
                del M[f]

        if all(consistent(i) for i in list(M)):
            yield from rec(0)


def enumerate_functors(C, D, fixed_ob=None):
    return tuple(sorted(_functor_search(C, D, fixed_ob), key=lambda F: F.sort_key()))


def check_category_equivalence(F):
    C, D = F.source, F.target
    for x in C.objects:
        for y in C.objects:
            images = [F.on_morphism(f) for f in C.hom(x, y)]
            if len(set(images)) != len(images):
                return CheckReport("category_equivalence", False, counterexample=("not faithful", x, y))
            if len(images) != len(D.hom(F.on_object(x), F.on_object(y))):
                return CheckReport("category_equivalence", False, counterexample=("not full", x, y))
    isos = []
    for d in D.objects:
        hit = None
        for c in C.objects:
            f = D.isomorphic(F.on_object(c), d)
            if f is not None:
                hit = (c, f)
                break
        if hit is None:
            return CheckReport("category_equivalence", False, counterexample=("not essentially surjective", d))
        isos.append((d, hit))
    return CheckReport("category_equivalence", True, witnesses=isos)


def groupoid_core(C):
    mors = {f: (C.source[f], C.target[f]) for f in C.morphisms if C.is_iso(f)}
    comp = {(g, f): h for (g, f), h in C.composition.items() if g in mors and f in mors}
    return FiniteGroupoid(C.objects, mors, C.identities, comp)


def full_subgroupoid(G, objects):
    objects = set(objects)
    mors = {f: (G.source[f], G.target[f]) for f in G.morphisms
            if G.source[f] in objects and G.target[f] in objects}
    comp = {(g, f): h for (g, f), h in G.composition.items() if g in mors and f in mors}
    return FiniteGroupoid(objects, mors, {x: G.identities[x] for x in objects}, comp,
                          {f: G.inverse[f] for f in mors}, validate=False)


def _group(G, x):
    elems = list(G.hom(x, x))
    return elems, {(a, b): G.compose(a, b) for a in elems for b in elems}


def find_group_isomorphism(G1, G2):
    """Brute-force isomorphism between small groups given as (elements, table)."""
    e1, t1 = G1
    e2, t2 = G2
    if len(e1) != len(e2):
        return None

    def order_profile(elems, table):
        return {a: order_of(a, elems, table) for a in elems}

    o1 = order_profile(e1, t1)
    o2 = order_profile(e2, t2)
    if sorted(o1.values()) != sorted(o2.values()):
        return None
    # generate G1 greedily, then map generators and extend
    gens = []
    unit1 = next(a for a in e1 if t1[(a, a)] == a)
    unit2 = next(a for a in e2 if t2[(a, a)] == a)
    span = {unit1}
    for a in sorted(e1, key=lambda a: -o1[a]):
        if a not in span:
            gens.append(a)
            span = _closure(span | {a}, t1)

    def extend(assign):
        phi = {unit1: unit2}
        phi.update(assign)
        frontier = list(phi)
        while frontier:
            new = []
            for a in list(phi):
                for g in assign:
                    c = t1[(a, g)]
                    v = t2[(phi[a], assign[g])]
                    if c in phi:
                        if phi[c] != v:
                            return None
                    else:
                        phi[c] = v
                        new.append(c)
            frontier = new
        if len(set(phi.values())) != len(phi) or len(phi) != len(e1):
            return None
        for a in e1:
            for b in e1:
                if phi[t1[(a, b)]] != t2[(phi[a], phi[b])]:
                    return None
        return phi

    def rec(i, assign):
        if i == len(gens):
            return extend(assign)
        g = gens[i]
        for c in e2:
            if o2[c] == o1[g]:
                assign[g] = c
                r = rec(i + 1, assign)
                if r is not None:
                    return r
                del assign[g]
        return None

    return rec(0, {})


def order_of(a, elems, table):
    k, b = 1, table[(a, a)]
    while b != a:
        b = table[(b, a)]
        k += 1
    return k


def _closure(s, table):
    s = set(s)
    while True:
        new = {table[(a, b)] for a in s for b in s} - s
        if not new:
            return s
        s |= new


def check_groupoid_equivalence(G, H):
    cg, ch = G.components(), H.components()
    if len(cg) != len(ch):
        return CheckReport("groupoid_equivalence", False,
                           counterexample=("orbit counts differ", len(cg), len(ch)))
    groups_h = [(comp, _group(H, comp[0])) for comp in ch]
    used = set()
    pairing = []
    for comp in cg:
        grp = _group(G, comp[0])
        match = None
        for idx, (comp_h, grp_h) in enumerate(groups_h):
            if idx in used:
                continue
            phi = find_group_isomorphism(grp, grp_h)
            if phi is not None:
                match = (idx, comp_h, phi)
                break
        if match is None:
            return CheckReport("groupoid_equivalence", False,
                               counterexample=("no orbit with isomorphic automorphism group", comp[0]))
        used.add(match[0])
        pairing.append((comp[0], match[1][0], match[2]))
    return CheckReport("groupoid_equivalence", True, witnesses=pairing)


# -- functor categories -----------------------------------------------------


@dataclass(frozen=True)
class NatTrans:
    source: Functor
    target: Functor
    components: tuple  # indexed by the domain category's objects

    @cached_property
    def _hash(self):
        return hash((self.source, self.target, self.components))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, NatTrans) and self._hash == other._hash
                                 and self.components == other.components
                                 and self.source == other.source and self.target == other.target)

    @cached_property
    def _key(self):
        return (self.source.sort_key(), self.target.sort_key(), ckey(self.components))

    def sort_key(self):
        return self._key


def functor_category(C, D):
    """Fun(C, D) with natural transformations, vertical composition."""
    obs = enumerate_functors(C, D)
    mors = {}
    for F in obs:
        for G in obs:
            choices = [D.hom(F.on_object(x), G.on_object(x)) for x in C.objects]
            for comps in itertools.product(*choices):
                a = dict(zip(C.objects, comps))
                if all(D.compose(G.on_morphism(f), a[C.source[f]]) == D.compose(a[C.target[f]], F.on_morphism(f))
                       for f in C.morphisms):
                    mors[NatTrans(F, G, comps)] = (F, G)
    ids = {F: NatTrans(F, F, tuple(D.identities[F.on_object(x)] for x in C.objects)) for F in obs}
    comp = {}
    for b in mors:
        for a in mors:
            if a.target == b.source:
                comp[(b, a)] = NatTrans(a.source, b.target,
                                        tuple(D.compose(q, p) for q, p in zip(b.components, a.components)))
    return FiniteCategory(obs, mors, ids, comp, validate=False)
