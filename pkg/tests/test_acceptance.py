"""Acceptance suite: one PASS/FAIL line per criterion, exact counts, wall-clock limits."""
from _support import brute_grid_count, criterion, random_function_category

from thetaspaces.completion import (classifying_diagram_level, eta, precompletion, precompletion_map, q_presheaf,
                                    underlying_levels)
from thetaspaces.delta_core import (Functor, OrdinalMap, check_category_equivalence, check_groupoid_equivalence,
                                    commutative_square, groupoid_core, iso_chain, ordinal, terminal)
from thetaspaces.presheaf_engine import (Coproduct, Empty, Intertwine, Nerve, PresheafMap, Product, Representable,
                                         WalkingEquivalence, audit_naturality, nerve_map, truncated_hom, window_slots)
from thetaspaces.segal_complete import check_completeness, check_dk, check_levelwise_bijection, check_segal, \
    presented_groupoid
from thetaspaces.strict_ncat import (functor_from_cellmap, from_category, iso_chain_flat, ordinal_ncat, suspension,
                                     theta_ncat)
from thetaspaces.theta_cell import parse_theta, point_at, theta_objects

I_FLAT = iso_chain_flat(1, 1)
SIGMA_I = suspension(I_FLAT)
SIGMA2_I = suspension(SIGMA_I)
SIGMA_ORD1 = suspension(ordinal_ncat(1, 1))
GAUNT = [ordinal_ncat(1), ordinal_ncat(2)] + [
    theta_ncat(parse_theta(s)) for s in ("[1]([0])", "[1]([1])", "[2]([1],[0])")]
RANDOM = [random_function_category(seed) for seed in range(20)]
SIGMA_I_GOLDEN = {0: 4, 1: 6, 2: 10, 3: 18}


def test_c01_classifying_diagram_table():
    cats = {"terminal": terminal(), "ordinal(1)": ordinal(1), "ordinal(2)": ordinal(2), "I": iso_chain(1),
            "I(2)": iso_chain(2), "square": commutative_square()}
    with criterion(1, "classifying-diagram table vs brute-force grids", 10) as st:
        st["failures"] = [(name, m, p, got, want)
                          for name, C in cats.items() for m in range(4) for p in range(4)
                          for got, want in [(classifying_diagram_level(C, m, p).count, brute_grid_count(C, m, p))]
                          if got != want]
    assert st["failures"] == [] and st["elapsed"] < 10


def test_c02_gaunt_fixed_points():
    with criterion(2, "gaunt fixed points: eta levelwise bijective", 30) as st:
        failures = []
        for A in GAUNT:
            objects = list(theta_objects(A.n, 3))
            for k in range(1, A.n + 1):
                rep = check_levelwise_bijection(eta(A, k), objects, (0, 1, 2, 3))
                if not rep:
                    failures.append((A.name, k, rep.counterexample))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 30


def test_c03_incompleteness_detection():
    with criterion(3, "incompleteness of N(I) and N(Sigma^2 I)", 5) as st:
        failures = []
        rep = check_completeness(Nerve(I_FLAT), 1)
        if rep.verdict or rep.witnesses != [("walking-equivalence maps", 4), ("cells", 2)]:
            failures.append(("N(I)", rep.verdict, rep.witnesses))
        verdicts = tuple(check_completeness(Nerve(SIGMA2_I), k).verdict for k in (1, 2, 3))
        if verdicts != (True, True, False):
            failures.append(("N(Sigma^2 I)", verdicts))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 5


def test_c04_completion_is_complete():
    with criterion(4, "T1 of 20 random categories: Segal, complete, [0]-level ~ core(C)", 120) as st:
        failures = []
        objects = list(theta_objects(1, 2))
        for seed, C in enumerate(RANDOM):
            T = precompletion(from_category(C, 1), 1)
            if not check_segal(T, objects, (0, 1)):
                failures.append((seed, "segal"))
                continue
            if not check_completeness(T, 1, objects, (0, 1)):
                failures.append((seed, "complete"))
            if not check_groupoid_equivalence(presented_groupoid(T, point_at(1)), groupoid_core(C)):
                failures.append((seed, "core"))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 120


def test_c05_eta_is_dk():
    fixtures = [(A, k) for A in GAUNT for k in range(1, A.n + 1)]
    fixtures += [(I_FLAT, 1)] + [(SIGMA2_I, k) for k in (1, 2, 3)]
    fixtures += [(from_category(C, 1), 1) for C in RANDOM] + [(SIGMA_I, 2)]
    with criterion(5, "eta is a DK-equivalence on every fixture", 120) as st:
        st["failures"] = [(A.name, k, rep.first_failure()) for A, k in fixtures
                          for rep in [check_dk(eta(A, k))] if not rep.verdict]
    assert st["failures"] == [] and st["elapsed"] < 120


def test_c06_underlying_invariance():
    fixtures = [SIGMA_I, SIGMA_ORD1, theta_ncat(parse_theta("[1]([1])")), SIGMA2_I]
    with criterion(6, "eta bijective at [0] and on tau*_{n-2} levels", 60) as st:
        failures = []
        for A in fixtures:
            levels = underlying_levels(A.n, A.n, 3)
            if point_at(A.n) not in levels:
                failures.append((A.name, "[0] missing"))
            rep = check_levelwise_bijection(eta(A, A.n), levels, (0, 1, 2))
            if not rep:
                failures.append((A.name, rep.counterexample))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 60


def test_c07_oracle_equivalence():
    # nerves of strict n-categories are (n+1)-coskeletal, so maps into them are determined on the
    # shapes of total arity <= n+1: that window is exact
    with criterion(7, "recursive precompletion = truncated hom out of Q^k", 300) as st:
        failures = []
        for A in (SIGMA_I, SIGMA_ORD1, I_FLAT):
            slots = window_slots(A.n, A.n + 1)
            for k in range(1, A.n + 1):
                for x in theta_objects(A.n, 3):
                    for p in range(3):
                        got = precompletion(A, k).count(x, p)
                        want = truncated_hom(q_presheaf(k, x, p), Nerve(A), slots, keep=False).count
                        if got != want:
                            failures.append((A.name, k, str(x), p, got, want))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 300


def test_c08_dk_inverted_by_completion():
    point = ordinal_ncat(0)
    F = functor_from_cellmap(point, I_FLAT, lambda k, c: c if k == 0 else (0, 0))
    with criterion(8, "N{0} -> NI: DK, T1-levelwise groupoid equivalence, not bijective", 30) as st:
        failures = []
        f = nerve_map(point, I_FLAT, F)
        if not check_dk(f):
            failures.append("dk")
        objects = list(theta_objects(1, 3))
        if check_levelwise_bijection(f, objects, (0,)):
            failures.append("original map is levelwise bijective")
        g = precompletion_map(F, 1)
        # arity 3 at degree 3 is 65536 functors into I alone; the groupoid window stops at arity 2
        for x in theta_objects(1, 2):
            G, H = presented_groupoid(g.source, x), presented_groupoid(g.target, x)
            Fx = Functor(G, H, tuple(g(x, 0, o) for o in G.objects), tuple(g(x, 1, m) for m in G.morphisms))
            rep = check_category_equivalence(Fx)
            if not rep:
                failures.append((str(x), rep.counterexample))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 30


def _pushout_failures(A, B, C, D, f, g, h, k, x):
    """Elementwise pushout test of the square A -f-> B -h-> D, A -g-> C -k-> D at level x."""
    out = []
    As, Bs, Cs, Ds = A.eval(x), B.eval(x), C.eval(x), D.eval(x)
    if any(h(b) not in Ds for b in Bs) or any(k(c) not in Ds for c in Cs):
        out.append(("maps leave D", str(x)))
    if any(h(f(a)) != k(g(a)) for a in As):
        out.append(("square does not commute", str(x)))
    parent = {("B", b): ("B", b) for b in Bs}
    parent.update({("C", c): ("C", c) for c in Cs})

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a in As:
        parent[find(("B", f(a)))] = find(("C", g(a)))
    classes = {}
    for u in parent:
        classes.setdefault(find(u), set()).add(h(u[1]) if u[0] == "B" else k(u[1]))
    if any(len(v) != 1 for v in classes.values()) or len(classes) != len(Ds):
        out.append(("induced map B +_A C -> D is not bijective", str(x), len(classes), len(Ds)))
    return out


def test_c09_intertwining_formulas():
    depth2 = list(theta_objects(2, 3))
    with criterion(9, "V[1](0) = F[0]+F[0], V[m](F(c)) = F([m](c)), V[1](XxY) pushout", 10) as st:
        failures = []
        # V[1](empty) -> F[0] + F[0]: the constant delta picks the summand
        V1 = Intertwine([Empty(1)], 2)
        F0 = Representable(point_at(2))
        for x in depth2:
            image = {(e[0][0], F0.eval(x)[0]) for e in V1.eval(x)}
            if len(image) != V1.count(x) or len(image) != Coproduct(F0, F0).count(x):
                failures.append(("V1(empty)", str(x)))
        # F([m](c)) -> V[m](F(c_1), ..., F(c_m)): a morphism becomes its delta and blocks
        for target in (parse_theta("[2]([1],[0])"), parse_theta("[1]([2])"), parse_theta("[2]([0],[0])")):
            V = Intertwine([Representable(c) for c in target.children], 2)
            Fm = Representable(target)

            def to_v(x, p, psi):
                return (psi.delta.values, tuple(f for _, f in psi.blocks))

            phi = PresheafMap(Fm, V, to_v, "blocks")
            rep = check_levelwise_bijection(phi, depth2, (0,))
            if not rep:
                failures.append(("V[m](F(c))", str(target), rep.counterexample))
            bad = audit_naturality(phi, depth2, (0,))
            if bad is not None:
                failures.append(("V[m](F(c)) naturality", str(target), bad))
        # the pushout square for V[1](X x Y), X = F([1]), Y = E(1) on Theta_1
        X, Y = Representable(parse_theta("[1]")), WalkingEquivalence(1, 1)
        V1xy, V2xy, V2yx = Intertwine([Product(X, Y)], 2), Intertwine([X, Y], 2), Intertwine([Y, X], 2)
        D = Product(Intertwine([X], 2), Intertwine([Y], 2))
        face = OrdinalMap(1, 2, (0, 2))
        sigma1, sigma0 = OrdinalMap(2, 1, (0, 1, 1)), OrdinalMap(2, 1, (0, 0, 1))

        def along_face(first):
            def f(e):
                values, picks = e
                d = OrdinalMap(len(values) - 1, 1, values)
                nd = face.compose(d)
                blocks = [(i, j) for i in range(1, len(values)) for j in range(nd(i - 1) + 1, nd(i) + 1)]
                by_i = dict(zip([(i, j) for i in range(1, len(values)) for j in range(d(i - 1) + 1, d(i) + 1)],
                                picks))
                # block (i, 1) takes the first factor, block (i, 2) the second
                new = []
                for i, j in blocks:
                    pair = by_i[(i, 1)]
                    new.append(pair[0] if (j == 1) == first else pair[1])
                return (nd.values, tuple(new))
            return f

        def collapse_to(sigma, keep):
            def f(e):
                values, picks = e
                d = OrdinalMap(len(values) - 1, 2, values)
                keys = [(i, j) for i in range(1, len(values)) for j in range(d(i - 1) + 1, d(i) + 1)]
                nd = sigma.compose(d)
                return (nd.values, tuple(a for (i, j), a in zip(keys, picks) if j == keep))
            return f

        def pair(left, right):
            return lambda e: (left(e), right(e))

        h = pair(collapse_to(sigma1, 1), collapse_to(sigma0, 2))
        k = pair(collapse_to(sigma0, 2), collapse_to(sigma1, 1))
        for x in list(theta_objects(2, 2)):
            failures += _pushout_failures(V1xy, V2xy, V2yx, D, along_face(True), along_face(False), h, k, x)
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 10


def test_c10_sigma_i_golden_values():
    x = parse_theta("[1]([0])")
    with criterion(10, "T2(N Sigma I) at [1]([0]) has 2 + 2^(p+1) elements", 30) as st:
        failures = []
        T = precompletion(SIGMA_I, 2)
        for p, golden in SIGMA_I_GOLDEN.items():
            got = T.count(x, p)
            if got != golden or golden != 2 + 2 ** (p + 1):
                failures.append((p, got, golden))
            if p <= 2:
                oracle = truncated_hom(q_presheaf(2, x, p), Nerve(SIGMA_I), window_slots(2, 3), keep=False).count
                if oracle != golden:
                    failures.append(("oracle", p, oracle, golden))
        st["failures"] = failures
    assert st["failures"] == [] and st["elapsed"] < 30

