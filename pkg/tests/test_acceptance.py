"""End-to-end checks, one test per numbered criterion.

Every check is exact (bit-identical equality); each test also enforces
its runtime budget and prints one PASS line with the elapsed time.
"""

import random
import time

from qvarieties import extension_field, rational_function_field
from qvarieties.amodules import AModuleStructure
from qvarieties.fields import (APoly, FieldElement, base_field, extension_of,
                               from_int, perfect_closure, s_element,
                               t_element, zero as field_zero)
from qvarieties.linalg import OreMatrix, TauSubmodule, diagonalize
from qvarieties.ore import OrePoly
from qvarieties.varieties import (Morphism, full_space, origin,
                                  product_variety, sum_varieties,
                                  variety_from_points, zeros)

F3 = base_field(3)
F9 = extension_field(3, 2)
R3 = rational_function_field(3)
P3 = perfect_closure(3)

A = APoly(3, (0, 1))  # the variable T over F_3


def t(desc, k=1, scale=None):
    return OrePoly.tau(desc, k, scale)


def o(desc):
    return OrePoly.one(desc)


def z(desc):
    return OrePoly.zero(desc)


def s(desc, c):
    if isinstance(c, int):
        c = from_int(desc, c)
    return OrePoly.scalar(c)


def _report(k, label, t0, budget):
    elapsed = time.perf_counter() - t0
    assert elapsed < budget, \
        f"criterion {k} exceeded its {budget}s budget: {elapsed:.2f}s"
    print(f"criterion {k}: PASS ({label}; {elapsed:.2f}s < {budget:g}s)")


# -- 1: the worked two-dimensional twist


def test_criterion_1_worked_example():
    t0 = time.perf_counter()
    T = t_element(R3)
    mat = OreMatrix(R3, [[s(R3, T) + t(R3, 2), t(R3)],
                         [t(R3, 1, T), s(R3, T)]])
    D = AModuleStructure(full_space(R3, 2), mat, T)

    tor_T = D.torsion(A)
    assert tor_T.is_finite and tor_T.dim_fq == 0
    tor_T1 = D.torsion(A - 1)
    assert tor_T1.is_finite and tor_T1.dim_fq == 2

    for pi in (A, A - 1):
        assert D.tate_check(pi, 3).ok

    rr = D.rank()
    assert rr.rank == 2
    assert rr.bad_primes == [A]
    _report(1, "Tor dims 0/2, tate growth, rank 2 with T bad", t0, 1.0)


# -- 2: the two closed-form pairs


def test_criterion_2_twisted_pair():
    t0 = time.perf_counter()
    T = t_element(R3)
    d = s(R3, T)
    pair = AModuleStructure(
        full_space(R3, 2),
        OreMatrix(R3, [[d, t(R3)], [t(R3), d]]), T)
    for a in (A, A - 1, A + 1, A * A + 1):
        rep = pair.torsion(a)
        assert rep.is_finite and rep.dim_fq == 2 * a.degree
    assert pair.rank().rank == 2
    _report(2, "full pair: Tor dims 2*deg a, rank 2", t0, 1.0)


def test_criterion_2_upper_triangular_pair():
    t0 = time.perf_counter()
    T = t_element(R3)
    d = s(R3, T)
    tri = AModuleStructure(
        full_space(R3, 2),
        OreMatrix(R3, [[d, t(R3)], [z(R3), d]]), T)
    for a in (A, A - 1, A + 1, A * A + 1):
        rep = tri.torsion(a)
        assert rep.is_finite and rep.dim_fq == 0
    assert tri.rank().rank == 0
    _report(2, "triangular pair: Tor trivial, rank 0", t0, 1.0)


# -- 3: the rank-one module


def test_criterion_3_carlitz():
    t0 = time.perf_counter()
    T = t_element(R3)
    C = AModuleStructure(full_space(R3, 1),
                         OreMatrix(R3, [[s(R3, T) + t(R3)]]), T)
    assert C.rank().rank == 1

    got = C.phi(A * A).matrix.rows[0][0]
    want = OrePoly(R3, [T * T, T + T ** 3, from_int(R3, 1)])
    assert got == want

    # finite characteristic: delta(T) = 1 in F_3, so ker delta = (T-1)
    Cf = AModuleStructure(full_space(F3, 1),
                          OreMatrix(F3, [[o(F3) + t(F3)]]), from_int(F3, 1))
    assert Cf.characteristic == (A - 1).monic()
    for a in (A, A + 1, A * A + 1, A * A + A + 2, A * A + 2 * A + 2):
        assert not Cf.in_ker_delta(a)
        pts, factors = Cf.torsion_points(a)
        assert len(pts) == 3 ** a.degree
        assert factors == [a]
    _report(3, "rank 1, phi(T^2) exact, 5 cyclic torsion kernels", t0, 5.0)


# -- 4: vanishing modules against brute-force points
#
# Additive maps are F_3-linear, so the common zero set inside a finite
# extension is the nullspace of an F_3-matrix built on basis points.
# That enumeration is independent of the module machinery under test.


def _f3_nullspace(rows, width):
    work = [list(r) for r in rows]
    piv = []
    rank = 0
    for c in range(width):
        hit = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if hit is None:
            continue
        work[rank], work[hit] = work[hit], work[rank]
        if work[rank][c] == 2:
            work[rank] = [(2 * x) % 3 for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][c]:
                f = work[i][c]
                work[i] = [(a - f * b) % 3
                           for a, b in zip(work[i], work[rank])]
        piv.append(c)
        rank += 1
        if rank == len(work):
            break
    basis = []
    for fc in range(width):
        if fc in piv:
            continue
        v = [0] * width
        v[fc] = 1
        for ri, pc in enumerate(piv):
            v[pc] = (-work[ri][fc]) % 3
        basis.append(v)
    return basis


def _digits(x, m):
    code = x.pay
    out = []
    for _ in range(m):
        out.append(code % 3)
        code //= 3
    return out


def _point_from_vec(target, vec, n, m):
    return tuple(
        FieldElement(target,
                     sum(d * 3 ** j
                         for j, d in enumerate(vec[i * m:(i + 1) * m])))
        for i in range(n))


def _eval_row(row, pt):
    acc = None
    for e, x in zip(row, pt):
        v = e.evaluate(x)
        acc = v if acc is None else acc + v
    return acc


def _zero_basis(gens, n, target, m):
    """F_3-basis of the common kernel of the forms inside target^n."""
    cols = []
    for i in range(n):
        for j in range(m):
            pt = [field_zero(target)] * n
            pt[i] = FieldElement(target, 3 ** j)
            col = []
            for g in gens:
                col.extend(_digits(_eval_row(g, pt), m))
            cols.append(col)
    height = len(cols[0])
    mat = [[cols[c][r] for c in range(n * m)] for r in range(height)]
    null = _f3_nullspace(mat, n * m)
    return [_point_from_vec(target, v, n, m) for v in null]


def _span_codes(bas, target, n):
    """Payload tuples of every F_3-combination of the basis points."""
    out = set()
    for idx in range(3 ** len(bas)):
        rem = idx
        pt = [field_zero(target)] * n
        for b in bas:
            c = rem % 3
            rem //= 3
            for _ in range(c):
                pt = [x + y for x, y in zip(pt, b)]
        out.add(tuple(x.pay for x in pt))
    return out


def _rand_orepoly(rng, desc, max_deg, card):
    coeffs = [FieldElement(desc, rng.randrange(card))
              for _ in range(rng.randint(0, max_deg) + 1)]
    return OrePoly(desc, coeffs)


def test_criterion_4_radical_matches_points():
    t0 = time.perf_counter()
    rng = random.Random(40409)
    faithful_count = 0
    for trial in range(200):
        n = rng.randint(1, 3)
        k = rng.randint(1, 3)
        rows = [[_rand_orepoly(rng, F9, 3, 9) for _ in range(n)]
                for _ in range(k)]
        if all(e.is_zero for r in rows for e in r):
            rows[0][0] = t(F9)
        mat = OreMatrix(F9, rows, ncols=n)

        S = TauSubmodule(mat)
        rad = S.saturate()
        V = zeros(mat)
        assert V.module == rad

        basis4 = None
        for m in (2, 4):
            target = extension_of(F9, m)
            bas = _zero_basis(mat.rows, n, target, m)
            if m == 4:
                basis4 = bas
                target4 = target
            # saturating must leave the rational points unchanged; the
            # reverse containment Z(rad) <= Z(S) holds term by term, so
            # matching dimensions give equal point sets
            bas_rad = _zero_basis(rad.basis().rows, n, target, m)
            assert len(bas_rad) == len(bas)
            for b in bas:
                assert V.contains_point(b)
            if 3 ** len(bas) <= 2187:
                pts = V.points_in_extension(m)
                assert len(pts) == 3 ** len(bas)
                seen = {tuple(x.pay for x in p) for p in pts}
                assert _span_codes(bas, target, n) == seen

        # every member of the radical vanishes on every enumerated
        # point (linearity: the basis points cover the whole span)
        for row in rad.basis().rows:
            assert all(_eval_row(row, b).is_zero for b in basis4)

        # the converse needs the enumerated points to be dense in V:
        # a high-degree component can hold all its points outside F_81
        faithful = variety_from_points(target4, basis4, n) == V
        faithful_count += faithful
        for _ in range(4):
            vec = [_rand_orepoly(rng, F9, 2, 9) for _ in range(n)]
            member = rad.contains(vec)
            vanish = all(_eval_row(vec, b).is_zero for b in basis4)
            if member:
                assert vanish, (trial, [str(e) for e in vec])
            elif faithful:
                assert not vanish, (trial, [str(e) for e in vec])
    # the equivalence direction must actually get exercised
    assert faithful_count >= 90, faithful_count
    _report(4, "200 modules: radical == point annihilator on F_81 grids",
            t0, 60.0)


# -- 5: diagonal normal forms with certified transforms


def _rand_perfect_scalar(rng):
    r = rng.random()
    c0 = from_int(P3, rng.randrange(3))
    if r < 0.55:
        return c0
    x = s_element(P3, 1) if r < 0.7 else t_element(P3)
    return from_int(P3, rng.randrange(1, 3)) * x + c0


def _rand_perfect_matrix(rng, nr, nc):
    # entry degrees stay <= 3 but the matrix total is capped: the exact
    # transforms carry coefficients of degree growing like q**(total
    # tau-degree), so an uncapped 4x4 answer would be exponentially big
    cells = [(i, j) for i in range(nr) for j in range(nc)]
    rng.shuffle(cells)
    left = 3
    degs = {}
    for cell in cells:
        d = min(rng.randint(0, 3), left)
        left -= d
        degs[cell] = d
    rows = [[OrePoly(P3, [_rand_perfect_scalar(rng)
                          for _ in range(degs[(i, j)] + 1)])
             for j in range(nc)] for i in range(nr)]
    return OreMatrix(P3, rows, ncols=nc)


def test_criterion_5_normal_forms():
    t0 = time.perf_counter()
    rng = random.Random(51423)
    for trial in range(500):
        nr, nc = rng.randint(1, 4), rng.randint(1, 4)
        if trial % 2 == 0:
            rows = [[_rand_orepoly(rng, F9, 3, 9) for _ in range(nc)]
                    for _ in range(nr)]
            mat = OreMatrix(F9, rows, ncols=nc)
        else:
            mat = _rand_perfect_matrix(rng, nr, nc)
        dd = diagonalize(mat)
        work = dd.desc
        assert dd.U * mat.embed(work) * dd.V == dd.D
        assert dd.U * dd.U_inv == OreMatrix.identity(work, nr)
        assert dd.V * dd.V_inv == OreMatrix.identity(work, nc)
        for i in range(nr):
            for j in range(nc):
                if i == j and i < dd.rank:
                    assert not dd.D.rows[i][j].is_zero
                else:
                    assert dd.D.rows[i][j].is_zero
    _report(5, "500 matrices: U*L*V = D with exact inverses", t0, 60.0)


# -- 6: dimension laws of the geometry


def _rand_variety(rng, n, max_deg=2):
    k = rng.randint(0, 2)
    rows = [[_rand_orepoly(rng, F9, max_deg, 9) for _ in range(n)]
            for _ in range(k)]
    rows = [r for r in rows if any(not e.is_zero for e in r)]
    if not rows:
        return full_space(F9, n)
    return zeros(OreMatrix(F9, rows, ncols=n))


def test_criterion_6_geometry_suite():
    t0 = time.perf_counter()
    rng = random.Random(61507)
    for trial in range(200):
        n = rng.randint(1, 2)
        F = _rand_variety(rng, n)

        # the tangent space at 0 has the dimension of the variety
        assert F.tangent_dimension() == F.dimension

        # rank-nullity through an arbitrary map of the ambient space
        L = OreMatrix(F9, [[_rand_orepoly(rng, F9, 2, 9) for _ in range(n)]
                           for _ in range(n)], ncols=n)
        psi = Morphism(F, full_space(F9, n), L)
        assert F.dimension == psi.kernel().dimension \
            + psi.image().dimension

        # the differential of a composition is the product of the
        # differentials
        amb = full_space(F9, n)
        L2 = OreMatrix(F9, [[_rand_orepoly(rng, F9, 2, 9) for _ in range(n)]
                            for _ in range(n)], ncols=n)
        phi = Morphism(amb, amb, L2)
        outer = Morphism(amb, amb, L)
        d_comp = outer.compose(phi).differential()
        d_o, d_p = outer.differential(), phi.differential()
        prod = [[sum((d_o[i][x] * d_p[x][j] for x in range(n)),
                     field_zero(F9)) for j in range(n)]
                for i in range(n)]
        assert d_comp == prod

        # the sum of two subvarieties is the image of addition
        G = _rand_variety(rng, n)
        P = product_variety(F, G)
        idn = OreMatrix.identity(F9, n)
        add = Morphism(P, full_space(F9, n), idn.hstack(idn))
        assert add.image() == sum_varieties(F, G)
    _report(6, "200 draws: tangent, rank-nullity, chain rule, sums",
            t0, 120.0)


# -- 7: separability of the Frobenius


def test_criterion_7_separability():
    t0 = time.perf_counter()
    assert not t(F3).is_separable
    assert (t(F3) - o(F3)).is_separable

    line = full_space(F3, 1)
    frob = Morphism(line, line, OreMatrix(F3, [[t(F3)]]))
    assert not frob.is_separable()
    artin = Morphism(line, line, OreMatrix(F3, [[t(F3) - o(F3)]]))
    assert artin.is_separable()
    _report(7, "tau inseparable, tau - 1 separable", t0, 1.0)


# -- 8: stable closures in the split pair


def _split_pair():
    T = t_element(R3)
    mat = OreMatrix(R3, [[s(R3, T), t(R3)], [t(R3), s(R3, T)]])
    return AModuleStructure(full_space(R3, 2), mat, T)


def test_criterion_8_stable_closures():
    t0 = time.perf_counter()
    D = _split_pair()
    diag = zeros(OreMatrix(R3, [[o(R3), -o(R3)]], ncols=2))
    axis = zeros(OreMatrix(R3, [[z(R3), o(R3)]], ncols=2))

    assert D.jacobian(diag) == diag
    assert D.jacobian(axis) == full_space(R3, 2)
    assert D.g_max(axis) == origin(R3, 2)
    assert D.is_sufficiently_generic(axis)
    assert D.g_max(diag) == diag
    assert not D.is_sufficiently_generic(diag)
    _report(8, "jacobian and g_max fixtures on the split pair", t0, 5.0)


# -- 9: additivity and exactness across submodules


def test_criterion_9_additivity_and_exactness():
    t0 = time.perf_counter()
    D = _split_pair()
    diag = zeros(OreMatrix(R3, [[o(R3), -o(R3)]], ncols=2))

    ar = D.rank_additivity_check(diag)
    assert ar.ok
    assert (ar.total.rank, ar.sub.rank, ar.quot.rank) == (2, 1, 1)
    for a in (A, A - 1):
        er = D.torsion_exactness_check(diag, a)
        assert er.ok
        assert er.total.dim_fq == er.sub.dim_fq + er.quot.dim_fq

    rng = random.Random(90210)
    axis = zeros(OreMatrix(F9, [[z(F9), o(F9)]], ncols=2))
    small_primes = [A, A + 1, A + 2, A * A + 1, A * A + A + 2]
    for _ in range(20):
        delta = from_int(F9, rng.randrange(3))
        dA, dC = rng.randint(1, 2), rng.randint(1, 2)
        top = s(F9, delta) + t(F9, dA, FieldElement(F9, rng.randrange(1, 9)))
        bot = s(F9, delta) + t(F9, dC, FieldElement(F9, rng.randrange(1, 9)))
        mid = _rand_orepoly(rng, F9, 2, 9)
        M = AModuleStructure(
            full_space(F9, 2),
            OreMatrix(F9, [[top, mid], [z(F9), bot]], ncols=2), delta)

        ar = M.rank_additivity_check(axis)
        assert ar.ok
        assert (ar.total.rank, ar.sub.rank, ar.quot.rank) == (dA + dC, dA,
                                                              dC)
        a = next(p for p in small_primes if not M.in_ker_delta(p))
        er = M.torsion_exactness_check(axis, a)
        assert er.ok
    _report(9, "split pair 2 = 1 + 1 and 20 triangular structures",
            t0, 30.0)
