"""Objects and morphisms of the cell categories Theta_n."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .delta_core import OrdinalMap, enumerate_ordinal_maps


class Theta:
    """[m](c_1, ..., c_m) as a tree of uniform depth; depth 0 is the point."""

    __slots__ = ("depth", "children", "_hash")

    def __init__(self, depth, children=()):
        children = tuple(children)
        if depth == 0 and children:
            raise ValueError("the point has no children")
        for c in children:
            if c.depth != depth - 1:
                raise ValueError(f"child {c} has depth {c.depth}, expected {depth - 1}")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_hash", hash((depth, children)))

    def __setattr__(self, *a):
        raise AttributeError("Theta is immutable")

    @property
    def arity(self):
        return len(self.children)

    def __eq__(self, other):
        return (isinstance(other, Theta) and self._hash == other._hash
                and self.depth == other.depth and self.children == other.children)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Theta, (self.depth, self.children))

    def sort_key(self):
        return (self.depth, self.total_arity(), self.arity, tuple(c.sort_key() for c in self.children))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def total_arity(self):
        return self.arity + sum(c.total_arity() for c in self.children)

    def __str__(self):
        if self.depth == 0:
            return "*"
        head = f"[{self.arity}]"
        if self.depth >= 2 and self.children:
            head += "(" + ",".join(str(c) for c in self.children) + ")"
        return head

    def __repr__(self):
        return f"Theta<{self}@{self.depth}>"


POINT = Theta(0)


def point_at(depth):
    """The terminal object [0] of Theta_depth (the point when depth is 0)."""
    return POINT if depth == 0 else Theta(depth, ())


def node(*children, depth=None):
    """[m](children); with no children the depth must be given."""
    if not children:
        return Theta(depth if depth is not None else 1, ())
    return Theta(children[0].depth + 1, children)


def ordinal_object(m, depth=1):
    return Theta(depth, tuple(point_at(depth - 1) for _ in range(m)))


def suspend_object(c):
    return Theta(c.depth + 1, (c,))


def dimension(x):
    return x.depth


@dataclass(frozen=True)
class TruncationPair:
    n: int
    k: int

    def __post_init__(self):
        assert 0 <= self.k <= self.n


def tau_object(x, n):
    """Pad x to depth n with terminal towers."""
    if x.depth == n:
        return x
    if x.depth == 0:
        return point_at(n)
    return Theta(n, tuple(tau_object(c, n - 1) for c in x.children))


def pi_object(y, k):
    """Forget the levels of y below depth k."""
    if k == 0:
        return POINT
    return Theta(k, tuple(pi_object(c, k - 1) for c in y.children))


class ThetaMorphism:
    """(phi, f_ij): phi on the top ordinals, blocks keyed by (i, j)."""

    __slots__ = ("source", "target", "delta", "blocks", "_blocks", "_hash")

    def __init__(self, source, target, delta, blocks=()):
        blocks = tuple(sorted(blocks.items() if isinstance(blocks, dict) else blocks, key=lambda kv: kv[0]))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_blocks", dict(blocks))
        object.__setattr__(self, "_hash", hash((source, target, delta, blocks)))

    def __setattr__(self, *a):
        raise AttributeError("ThetaMorphism is immutable")

    def check(self):
        s, t = self.source, self.target
        if s.depth != t.depth:
            raise ValueError("depth mismatch")
        if s.depth == 0:
            assert self.delta is None and not self.blocks
            return self
        d = self.delta
        assert d.source == s.arity and d.target == t.arity, "delta endpoints"
        keys = [(i, j) for i in range(1, s.arity + 1) for j in range(d(i - 1) + 1, d(i) + 1)]
        assert [k for k, _ in self.blocks] == keys, "block index ranges"
        for (i, j), f in self.blocks:
            assert f.source == s.children[i - 1] and f.target == t.children[j - 1]
            f.check()
        return self

    def block(self, i, j):
        return self._blocks[(i, j)]

    def __eq__(self, other):
        return (isinstance(other, ThetaMorphism) and self._hash == other._hash
                and self.source == other.source and self.target == other.target
                and self.delta == other.delta and self.blocks == other.blocks)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        if self.delta is None:
            return ()
        return (self.source.sort_key(), self.target.sort_key(), self.delta.values,
                tuple((k, f.sort_key()) for k, f in self.blocks))

    def __str__(self):
        if self.delta is None:
            return "id*"
        inner = ",".join(f"{i}{j}:{f}" for (i, j), f in self.blocks if f.delta is not None)
        return f"<{self.delta}" + (f"|{inner}" if inner else "") + ">"

    __repr__ = __str__


def identity(x):
    if x.depth == 0:
        return ThetaMorphism(x, x, None)
    return ThetaMorphism(x, x, OrdinalMap.identity(x.arity),
                         {(i, i): identity(c) for i, c in enumerate(x.children, 1)})


def compose(g, f):
    """g after f."""
    if f.target != g.source:
        raise ValueError(f"cannot compose: {f.target} != {g.source}")
    if f.source.depth == 0:
        return ThetaMorphism(f.source, g.target, None)
    df, dg = f.delta, g.delta
    blocks = {}
    for i in range(1, f.source.arity + 1):
        for j in range(df(i - 1) + 1, df(i) + 1):
            fij = f.block(i, j)
            for jj in range(dg(j - 1) + 1, dg(j) + 1):
                blocks[(i, jj)] = compose(g.block(j, jj), fij)
    return ThetaMorphism(f.source, g.target, dg.compose(df), blocks)


@lru_cache(maxsize=None)
def hom_theta(a, b):
    if a.depth != b.depth:
        raise ValueError(f"depth mismatch: {a} has depth {a.depth}, {b} has depth {b.depth}")
    if a.depth == 0:
        return (ThetaMorphism(a, b, None),)
    out = []
    for phi in enumerate_ordinal_maps(a.arity, b.arity):
        keys = [(i, j) for i in range(1, a.arity + 1) for j in range(phi(i - 1) + 1, phi(i) + 1)]
        choices = [hom_theta(a.children[i - 1], b.children[j - 1]) for i, j in keys]
        for picks in itertools.product(*choices):
            out.append(ThetaMorphism(a, b, phi, zip(keys, picks)))
    return tuple(out)


def tau_morphism(f, n):
    if f.source.depth == n:
        return f
    if f.source.depth == 0:
        return identity(point_at(n))
    return ThetaMorphism(tau_object(f.source, n), tau_object(f.target, n), f.delta,
                         {k: tau_morphism(g, n - 1) for k, g in f.blocks})


def pi_morphism(f, k):
    if k == 0:
        return identity(POINT)
    return ThetaMorphism(pi_object(f.source, k), pi_object(f.target, k), f.delta,
                         {key: pi_morphism(g, k - 1) for key, g in f.blocks})


# -- structural maps --------------------------------------------------------


def vertex_map(x, i):
    """[0] -> x picking the i-th object of the top spine."""
    return ThetaMorphism(point_at(x.depth), x, OrdinalMap(0, x.arity, (i,)))


def collapse(x):
    """The unique map x -> [0]."""
    return ThetaMorphism(x, point_at(x.depth), OrdinalMap(x.arity, 0, (0,) * (x.arity + 1)))


def spine_inclusion(x, i):
    """[1](c_i) -> [m](c_1..c_m)."""
    c = x.children[i - 1]
    return ThetaMorphism(suspend_object(c), x, OrdinalMap(1, x.arity, (i - 1, i)), {(1, i): identity(c)})


def interval_inclusion(x, i, j):
    """The sub-chain [j-i](c_{i+1},...,c_j) -> x."""
    sub = Theta(x.depth, x.children[i:j])
    return ThetaMorphism(sub, x, OrdinalMap(j - i, x.arity, tuple(range(i, j + 1))),
                         {(a, i + a): identity(x.children[i + a - 1]) for a in range(1, j - i + 1)})


def suspend_morphism(f):
    return ThetaMorphism(suspend_object(f.source), suspend_object(f.target), OrdinalMap.identity(1), {(1, 1): f})


def substitute(x, path, new_child_map):
    """Map into x that is the identity away from the node at `path` and `new_child_map` there.

    `path` lists child indices (1-based) from the root; the node reached is replaced by the
    source of new_child_map, whose target must be that node."""
    if not path:
        return new_child_map
    head, rest = path[0], path[1:]
    inner = substitute(x.children[head - 1], rest, new_child_map)
    children = list(x.children)
    children[head - 1] = inner.source
    src = Theta(x.depth, children)
    blocks = {(i, i): (inner if i == head else identity(c)) for i, c in enumerate(x.children, 1)}
    return ThetaMorphism(src, x, OrdinalMap.identity(x.arity), blocks)


def node_at(x, path):
    for i in path:
        x = x.children[i - 1]
    return x


def inner_paths(x, prefix=()):
    """Paths to every node of positive depth."""
    if x.depth == 0:
        return []
    out = [prefix]
    for i, c in enumerate(x.children, 1):
        out.extend(inner_paths(c, prefix + (i,)))
    return out


# -- enumeration ------------------------------------------------------------


@lru_cache(maxsize=None)
def theta_objects(depth, max_arity):
    """All objects of Theta_depth with total arity at most max_arity."""
    if depth == 0:
        return (POINT,)
    out = []
    for m in range(max_arity + 1):
        budget = max_arity - m

        def rec(i, left, acc):
            if i == m:
                out.append(Theta(depth, acc))
                return
            for c in theta_objects(depth - 1, left):
                rec(i + 1, left - c.total_arity(), acc + (c,))

        rec(0, budget, ())
    return tuple(sorted(set(out), key=Theta.sort_key))


def window(depth, max_arity):
    return theta_objects(depth, max_arity)


# -- text syntax ------------------------------------------------------------


class ThetaSyntaxError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at column {pos + 1}: {text!r}")
        self.pos = pos


def parse_theta(text, depth=None):
    """Parse `[3]([2],[0],[1])` or `*`; pads to `depth` when given."""
    pos = 0
    s = text.replace(" ", "")

    def expect(ch):
        nonlocal pos
        if pos >= len(s) or s[pos] != ch:
            raise ThetaSyntaxError(f"expected {ch!r}", text, pos)
        pos += 1

    def parse():
        nonlocal pos
        if pos < len(s) and s[pos] == "*":
            pos += 1
            return POINT
        expect("[")
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if start == pos:
            raise ThetaSyntaxError("expected an arity", text, pos)
        m = int(s[start:pos])
        expect("]")
        kids = []
        if pos < len(s) and s[pos] == "(":
            pos += 1
            if pos < len(s) and s[pos] != ")":
                kids.append(parse())
                while pos < len(s) and s[pos] == ",":
                    pos += 1
                    kids.append(parse())
            expect(")")
            if len(kids) != m:
                raise ThetaSyntaxError(f"[{m}] needs {m} children, got {len(kids)}", text, pos)
        else:
            kids = [POINT] * m
        d = max((k.depth for k in kids), default=0)
        return Theta(d + 1, tuple(tau_object(k, d) for k in kids))

    x = parse()
    if pos != len(s):
        raise ThetaSyntaxError("trailing input", text, pos)
    if depth is not None:
        if x.depth > depth:
            raise ThetaSyntaxError(f"object has depth {x.depth} > {depth}", text, 0)
        x = tau_object(x, depth)
    return x
