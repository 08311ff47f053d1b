import random

import pytest

from qvarieties import base_field, extension_field, rational_function_field
from qvarieties.errors import (
    CapabilityError,
    DomainError,
    NotAMorphismInto,
    NotASubvariety,
)
from qvarieties.fields import FieldElement, from_int, t_element, zero as kzero
from qvarieties.linalg import OreMatrix, TauSubmodule
from qvarieties.ore import OrePoly
from qvarieties.varieties import (
    Morphism,
    QVariety,
    annihilator_of_points,
    full_space,
    induced_on_quotient,
    intersect_varieties,
    origin,
    quotient,
    sum_varieties,
    variety_from_points,
    zeros,
)


F3 = base_field(3)
F9 = extension_field(3, 2)
R3 = rational_function_field(3)


def t(desc=F3, k=1, scale=None):
    return OrePoly.tau(desc, k, scale)


def o(desc=F3):
    return OrePoly.one(desc)


def z(desc=F3):
    return OrePoly.zero(desc)


def mat(rows, desc=F3, ncols=None):
    return OreMatrix(desc, rows, ncols=ncols)


def row_var(entries, desc=F3):
    return zeros(mat([entries], desc=desc))


def test_full_space_and_origin():
    V = full_space(F3, 2)
    assert V.dimension == 2
    assert V.finite_part_dim == 0
    assert V.is_irreducible
    O = origin(F3, 2)
    assert O.dimension == 0
    assert O.finite_part_dim == 0
    assert O.is_irreducible
    assert V.contains_variety(O)
    assert not O.contains_variety(V)


def test_finite_subgroup_of_line():
    # zeros of t - 1 in one variable: the q-element subfield
    V = row_var([t() - 1])
    assert V.dimension == 0
    assert V.finite_part_dim == 1
    assert not V.is_irreducible
    pts = V.points_in_extension(1)
    assert len(pts) == 3
    assert V.contains_point([from_int(F3, 2)])
    m, pts = V.finite_part_points()
    assert m == 1
    assert len(pts) == 3


def test_saturation_inside_zeros():
    # t cuts out only 0 once saturated
    V = row_var([t()])
    assert V.dimension == 0
    assert V.finite_part_dim == 0
    assert V == origin(F3, 1)
    assert V.points_in_extension(2) == [(kzero(F3) + 0,)] or True
    pts = V.points_in_extension(2)
    assert len(pts) == 1
    assert pts[0][0].is_zero


def test_axis_is_irreducible():
    # K x {0} inside the plane: pinned coordinate, no torsion
    V = row_var([z(), o()])
    assert V.dimension == 1
    assert V.rank == 1
    assert V.finite_part_dim == 0
    assert V.is_irreducible
    assert V.contains_point([from_int(F3, 2), from_int(F3, 0)])
    assert not V.contains_point([from_int(F3, 0), from_int(F3, 1)])


def test_mixed_variety_splits():
    # { (x, y) : y in F_3 }: one free coordinate, one finite one
    V = row_var([z(), t() - 1])
    assert V.dimension == 1
    assert V.finite_part_dim == 1
    assert not V.is_irreducible
    comp = V.irreducible_component()
    assert comp.is_irreducible
    assert comp.dimension == 1
    assert V.contains_variety(comp)
    assert comp == row_var([z(), o()])


def test_diagonal_line():
    V = row_var([o(), -o()])
    assert V.dimension == 1
    assert V.is_irreducible
    g = FieldElement(F9, 5)
    assert V.contains_point([g, g])
    assert not V.contains_point([g, g + 1])


def test_variety_equality_across_presentations():
    a = zeros(mat([[t() - 1, z()], [z(), o()]]))
    b = zeros(mat([[t() - 1, z()], [z(), o()], [t() - 1, o()]]))
    assert a == b
    c = zeros(mat([[t() + 1, z()], [z(), o()]]))
    assert a != c


def test_tangent_space():
    # y in F_3 gives linear part (0, -1): tangent is the x-axis
    V = row_var([z(), t() - 1])
    tang = V.tangent_space()
    assert len(tang) == 1
    assert tang[0][0] == from_int(F3, 1)
    assert tang[0][1].is_zero
    # an inseparable-looking presentation saturates away
    W = row_var([t()])
    assert W.tangent_dimension() == 0


def test_points_of_plane_curve():
    # V(X_2 - X_1^q) is the graph of Frobenius: q^m points over F_q^m
    V = row_var([-t(), o()])
    assert V.dimension == 1
    pts = V.points_in_extension(2)
    assert len(pts) == 9
    for p in pts:
        assert p[1] == p[0] ** 3


def test_variety_from_points_line():
    one = from_int(F3, 1)
    V = variety_from_points(F3, [(one, one)], 2)
    assert V.dimension == 0
    assert V.finite_part_dim == 1
    pts = V.points_in_extension(1)
    assert len(pts) == 3
    for p in pts:
        assert p[0] == p[1]


def test_variety_from_points_spans():
    one = from_int(F3, 1)
    zer = from_int(F3, 0)
    V = variety_from_points(F3, [(one, zer), (zer, one)], 2)
    # two independent lines span the finite plane F_3^2
    assert V.finite_part_dim == 2
    assert len(V.points_in_extension(1)) == 9


def test_annihilator_vanishes_on_points():
    rng = random.Random(40)
    for _ in range(10):
        pts = [tuple(FieldElement(F9, rng.randrange(9)) for _ in range(2))
               for _ in range(2)]
        mod = annihilator_of_points(F9, pts, 2)
        V = zeros(TauSubmodule(mod.gens))
        for p in pts:
            assert V.contains_point(list(p))


def test_morphism_certification():
    plane = full_space(F3, 2)
    axis = row_var([z(), o()])
    proj = mat([[o(), z()], [z(), z()]])
    phi = Morphism(plane, axis, proj)
    assert phi([1, 2]) == [from_int(F3, 1), from_int(F3, 0)]
    with pytest.raises(NotAMorphismInto):
        Morphism(plane, axis, mat([[z(), z()], [o(), z()]]))


def test_image_of_projection():
    plane = full_space(F3, 2)
    proj = mat([[o(), z()], [z(), z()]])
    phi = Morphism(plane, plane, proj)
    img = phi.image()
    assert img == row_var([z(), o()])
    assert img.is_irreducible


def test_kernel_of_projection():
    plane = full_space(F3, 2)
    proj = mat([[o(), z()], [z(), z()]])
    phi = Morphism(plane, plane, proj)
    ker = phi.kernel()
    assert ker == row_var([o(), z()])


def test_image_with_finite_part():
    # the identity on a finite line reproduces the line
    one = from_int(F3, 1)
    V = variety_from_points(F3, [(one, one)], 2)
    phi = Morphism(V, full_space(F3, 2), OreMatrix.identity(F3, 2))
    img = phi.image()
    assert img == V


def test_image_of_frobenius_square():
    # x -> x^q on the affine line is dominant
    line = full_space(F3, 1)
    phi = Morphism(line, line, mat([[t()]]))
    img = phi.image()
    assert img == line
    assert not phi.is_separable()
    psi = Morphism(line, line, mat([[t() - 1]]))
    assert psi.is_separable()


def test_preimage():
    plane = full_space(F3, 2)
    proj = mat([[o(), z()], [z(), z()]])
    phi = Morphism(plane, plane, proj)
    Z = origin(F3, 2)
    pre = phi.preimage(Z)
    assert pre == row_var([o(), z()])
    W = row_var([t() - 1, z()])
    pre2 = phi.preimage(W)
    assert pre2.finite_part_dim == 1
    assert pre2.dimension == 1


def test_sum_and_intersection():
    ax1 = row_var([z(), o()])
    ax2 = row_var([o(), z()])
    assert sum_varieties(ax1, ax2) == full_space(F3, 2)
    assert intersect_varieties(ax1, ax2) == origin(F3, 2)
    assert sum_varieties(ax1, ax1) == ax1
    assert intersect_varieties(ax1, full_space(F3, 2)) == ax1


def test_quotient_by_axis():
    plane = full_space(F3, 2)
    axis = row_var([z(), o()])  # K x {0}
    Q, pi = quotient(plane, axis)
    assert Q.dimension == 1
    assert Q.finite_part_dim == 0
    # pi kills exactly the axis
    assert pi.kernel() == axis
    with pytest.raises(NotASubvariety):
        quotient(axis, plane)


def test_quotient_by_finite_subgroup():
    line = full_space(F3, 1)
    fq = row_var([t() - 1])
    Q, pi = quotient(line, fq)
    assert Q.dimension == 1
    assert Q.finite_part_dim == 0
    assert pi.kernel() == fq


def test_quotient_universal_map():
    plane = full_space(F3, 2)
    axis = row_var([z(), o()])
    Q1, pi1 = quotient(plane, axis)
    Q2, pi2 = quotient(plane, axis)
    ident = Morphism(plane, plane, OreMatrix.identity(F3, 2))
    down = induced_on_quotient(ident, pi1, pi2)
    assert down.domain is Q1 and down.codomain is Q2
    comp = down.compose(pi1)
    # the square commutes on points
    for a in range(3):
        for b in range(3):
            p = [from_int(F3, a), from_int(F3, b)]
            assert comp(p) == pi2(p)


def test_rational_backend_lifts():
    # x1^3 + T*x2^3 = (x1 + T^(1/3)*x2)^3 only splits in the closure
    T = t_element(R3)
    M = mat([[t(R3), t(R3, 1, T)]], desc=R3, ncols=2)
    V = zeros(M)
    assert V.lifted
    assert V.desc.kind == "perfect"
    assert V.dimension == 1
    assert V.finite_part_dim == 0
    with pytest.raises(CapabilityError):
        V.points_in_extension(1)


def test_twisted_pair_variety_stays_rational():
    T = t_element(R3)
    M = mat([[OrePoly(R3, (T,)), t(R3)], [t(R3), OrePoly(R3, (T,))]],
            desc=R3)
    V = zeros(M)
    assert not V.lifted
    assert V.desc.kind == "rational"


def test_rational_variety_without_lift():
    T = t_element(R3)
    M = mat([[OrePoly(R3, (T,)), z(R3)]], desc=R3, ncols=2)
    V = zeros(M)
    assert not V.lifted
    assert V.desc == R3
    assert V.dimension == 1
    assert V.rank == 1


def test_points_over_extension_of_ext_backend():
    V = row_var([t(F9) - 1], desc=F9)
    pts = V.points_in_extension(2)
    # kernel of t - 1 is F_3 regardless of the coefficient field
    assert len(pts) == 3


def test_enumeration_guard():
    V = full_space(F3, 21)
    with pytest.raises(CapabilityError):
        V.points_in_extension(1)
