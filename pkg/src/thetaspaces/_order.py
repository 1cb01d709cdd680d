"""Canonical ordering for heterogeneous identifiers."""


def ckey(x):
    # ints numerically, strings lexically, tuples recursively, others by repr
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(ckey(e) for e in x))
    key = getattr(x, "sort_key", None)
    if key is not None:
        return (3, key())
    return (4, repr(x))


def csorted(xs):
    return sorted(xs, key=ckey)


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        # keep the canonically smaller root so class labels are deterministic
        if ckey(ry) < ckey(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out
