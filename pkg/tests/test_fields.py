import random

import pytest

from qvarieties import (
    APoly,
    CapabilityError,
    DivisionByZero,
    MixedBackends,
    apoly_primes,
    base_field,
    extension_field,
    perfect_closure,
    rational_function_field,
)
from qvarieties.fields import (
    FieldElement,
    base_generator,
    embed,
    extension_of,
    fq_express,
    fq_minpoly,
    fq_nullspace,
    fq_rref,
    from_fq_code,
    from_int,
    generator,
    lift_to_perfect,
    lower_to_rational,
    one,
    s_element,
    t_element,
    zero,
    _fq_ctx,
)


F3 = base_field(3)
F4 = base_field(4)
F9 = extension_field(3, 2)
F81 = extension_field(3, 4)
R3 = rational_function_field(3)
P3 = perfect_closure(3)


def all_elements(desc):
    size = desc.q ** (desc.m if desc.kind == "ext" else 1)
    return [FieldElement(desc, c) for c in range(size)]


# --- descriptors


def test_descriptor_strings():
    assert str(F3) == "F3"
    assert str(F4) == "F4"
    assert str(F9) == "F3^2"
    assert str(F81) == "F3^4"
    assert str(R3) == "F3(T)"
    assert str(P3) == "F3(T)perf"


def test_prime_power_base_field():
    assert F4.p == 2 and F4.l == 2 and F4.q == 4
    u = base_generator(F4)
    # u satisfies the first monic irreducible of degree 2 over F_2
    assert u * u + u + 1 == zero(F4)


def test_base_field_rejects_nonprime_power():
    with pytest.raises(ValueError):
        base_field(6)
    with pytest.raises(ValueError):
        base_field(1)


def test_extension_collapses_at_degree_one():
    assert extension_field(3, 1) == F3
    assert extension_of(F9, 2) == F9


def test_extension_requires_divisibility():
    with pytest.raises(ValueError):
        extension_of(F9, 3)


# --- arithmetic over each backend


def field_axioms(desc, elems, rng):
    z, o = zero(desc), one(desc)
    for _ in range(40):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert a + b == b + a
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + z == a
        assert a * o == a
        assert a - a == z
        if not a.is_zero:
            assert a * a.inverse() == o
            assert (a / a) == o
    with pytest.raises(DivisionByZero):
        o / z


def test_axioms_prime():
    field_axioms(F3, all_elements(F3), random.Random(1))


def test_axioms_prime_power():
    field_axioms(F4, all_elements(F4), random.Random(2))


def test_axioms_ext():
    field_axioms(F9, all_elements(F9), random.Random(3))


def test_axioms_rational():
    rng = random.Random(4)
    T = t_element(R3)
    elems = [zero(R3), one(R3), T, T + 1, T * T + 2,
             one(R3) / (T + 1), (T * T - 1) / (T + 2)]
    field_axioms(R3, elems, rng)


def test_axioms_perfect():
    rng = random.Random(5)
    T = t_element(P3)
    S1 = s_element(P3, 1)
    elems = [zero(P3), one(P3), T, S1, S1 + 1, T * S1,
             one(P3) / (S1 + 2)]
    field_axioms(P3, elems, rng)


def test_mixed_backends_rejected():
    with pytest.raises(MixedBackends):
        one(F3) + one(F9)
    with pytest.raises(MixedBackends):
        t_element(R3) * t_element(P3)


def test_int_coercion():
    a = from_int(F3, 5)
    assert a == 2
    assert one(F3) + 1 == 2
    assert 2 * t_element(R3) == t_element(R3) + t_element(R3)


def test_pow_negative():
    T = t_element(R3)
    assert T ** -1 == one(R3) / T
    assert (T ** -2) * (T ** 2) == one(R3)


# --- Frobenius


def test_frobenius_prime_is_identity():
    for a in all_elements(F3):
        assert a.frobenius() == a
        assert a.inverse_frobenius() == a
    # q = 4 is p^2: x -> x^4 still fixes every element of F_4
    for a in all_elements(F4):
        assert a.frobenius() == a * a * a * a
        assert a.frobenius() == a


def test_frobenius_ext_is_qth_power():
    for a in all_elements(F9):
        assert a.frobenius() == a ** 3
        assert a.frobenius(2) == a
        assert a.inverse_frobenius().frobenius() == a
    g = generator(F9)
    assert g.frobenius() == -g  # g^2 = -1 so g^3 = -g


def test_frobenius_rational_stretches():
    T = t_element(R3)
    f = (T + 1) / (T * T + 2)
    assert f.frobenius() == (T ** 3 + 1) / (T ** 6 + 2)
    with pytest.raises(CapabilityError):
        T.inverse_frobenius()


def test_frobenius_perfect_inverse():
    T = t_element(P3)
    r = T.inverse_frobenius()
    assert r ** 3 == T
    assert str(r) == "S{1}"
    assert r.frobenius() == T
    S2 = s_element(P3, 2)
    assert (S2 + 1).frobenius(2) == T + 1


def test_perfect_level_is_minimal():
    T = t_element(P3)
    # (T^(1/3))^3 renders back at level 0
    x = T.inverse_frobenius()
    assert str(x * x * x) == "T"
    assert lower_to_rational(x) is None
    assert lower_to_rational(x ** 3) == t_element(R3)


def test_frobenius_is_additive_and_multiplicative():
    rng = random.Random(6)
    for _ in range(40):
        a = FieldElement(F81, rng.randrange(81))
        b = FieldElement(F81, rng.randrange(81))
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        assert (a * b).frobenius() == a.frobenius() * b.frobenius()


# --- embeddings


def test_embed_prime_into_ext():
    for a in all_elements(F3):
        img = embed(a, F9)
        assert img.desc == F9
        assert img == from_fq_code(F9, a.pay)
    # constants keep their arithmetic
    two = embed(from_int(F3, 2), F9)
    assert two + 1 == zero(F9)


def test_embed_ext_into_bigger_ext():
    g = generator(F9)
    img = embed(g, F81)
    # the image satisfies the F_9 modulus and generates a copy of F_9
    assert img * img + 1 == zero(F81)
    for a in all_elements(F9):
        for b in all_elements(F9):
            assert embed(a * b, F81) == embed(a, F81) * embed(b, F81)
            assert embed(a + b, F81) == embed(a, F81) + embed(b, F81)


def test_embed_rational_into_perfect():
    T = t_element(R3)
    x = (T + 2) / (T ** 2 + 1)
    y = lift_to_perfect(x)
    assert y.desc == P3
    assert y == (t_element(P3) + 2) / (t_element(P3) ** 2 + 1)
    assert lower_to_rational(y) == x


def test_embed_refuses_unrelated():
    with pytest.raises(MixedBackends):
        embed(t_element(R3), F9)


# --- F_q linear algebra on codes


def test_rref_and_nullspace():
    fq = _fq_ctx(3, 1)
    rows = [[1, 2, 0], [2, 1, 0], [0, 0, 0]]
    red, pivots = fq_rref(fq, rows)
    assert pivots == [0]
    assert len(red) == 1
    null = fq_nullspace(fq, rows, 3)
    assert len(null) == 2
    # every nullspace vector kills every row
    for v in null:
        for r in rows:
            s = 0
            for a, b in zip(r, v):
                s = fq.add(s, fq.mul(a, b))
            assert s == 0


def test_express_in_basis():
    fq = _fq_ctx(3, 1)
    basis = [[1, 0, 1], [0, 1, 2]]
    assert fq_express(fq, basis, [1, 1, 0]) == [1, 1]
    assert fq_express(fq, basis, [0, 0, 1]) is None


# --- A = F_q[T]


def test_apoly_arithmetic():
    f = APoly.of(3, 2, 2, 1)  # T^2 + 2T + 2
    g = APoly.of(3, 1, 1)  # T + 1
    assert str(f) == "T^2+2*T+2"
    q, r = divmod(f, g)
    assert q * g + r == f
    assert r.degree < g.degree
    assert (f * g) % f == APoly.of(3)
    assert f.gcd(g).is_one


def test_apoly_irreducibility():
    assert APoly.of(3, 1, 0, 1).is_prime  # T^2+1 over F_3
    assert not APoly.of(3, 2, 0, 1).is_prime  # T^2+2 = (T+1)(T+2)
    assert APoly.of(3, 1, 2, 0, 1).is_prime  # T^3+2T+1
    assert APoly.of(3, 0, 1).is_prime  # T itself
    assert not APoly.of(3, 1).is_prime  # constants are units


def test_apoly_primes_order():
    ps = list(apoly_primes(3, max_degree=1))
    assert [str(f) for f in ps] == ["T", "T+1", "T+2"]
    ps2 = list(apoly_primes(3, max_degree=2))
    assert [str(f) for f in ps2] == [
        "T", "T+1", "T+2", "T^2+1", "T^2+T+2", "T^2+2*T+2"]
    first = next(iter(apoly_primes(2)))
    assert str(first) == "T"


def test_apoly_primes_skip_and_count():
    skip = (APoly.of(3, 0, 1),)
    ps = list(apoly_primes(3, count=3, skip=skip))
    assert [str(f) for f in ps] == ["T+1", "T+2", "T^2+1"]


def test_apoly_evaluate():
    f = APoly.of(3, 1, 0, 1)  # T^2 + 1
    g = generator(F9)
    assert f.evaluate(g).is_zero
    T = t_element(R3)
    assert f.evaluate(T) == T * T + 1


def test_minpoly():
    g = generator(F9)
    assert str(fq_minpoly(g)) == "T^2+1"
    assert str(fq_minpoly(one(F9))) == "T+2"
    assert str(fq_minpoly(zero(F3))) == "T"
    a = from_int(F3, 2)
    assert str(fq_minpoly(a)) == "T+1"
    # minpoly of an F_81 generator has degree 4 and kills it
    h = generator(F81)
    mp = fq_minpoly(h)
    assert mp.degree == 4
    assert mp.evaluate(h).is_zero
    assert mp.is_prime


def test_str_round_trip_samples():
    assert str(from_int(F3, 2)) == "2"
    assert str(generator(F9)) == "g"
    assert str(generator(F9) + 1) == "g+1"
    assert str(2 * generator(F81) ** 2) == "2*g^2"
    T = t_element(R3)
    assert str((T ** 2 + 1) / (T + 2)) == "(T^2+1)/(T+2)"
    assert str(zero(P3)) == "0"


def test_sort_keys_are_total():
    elems = all_elements(F9)
    keys = sorted(e.sort_key() for e in elems)
    assert len(set(keys)) == len(elems)
