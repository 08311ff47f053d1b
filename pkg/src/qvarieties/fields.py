"""Exact arithmetic for the coefficient fields.

Four backends share one element interface:

* ``F_q`` with ``q = p^l`` (kind ``"prime"``): elements are integer codes
  whose base-``p`` digits are the coefficients of the residue polynomial
  in the generator ``u``; for ``l == 1`` the code is the residue itself.
* ``F_{q^m}`` (kind ``"ext"``): integer codes whose base-``q`` digits are
  the coefficients in the generator ``g`` of a monic irreducible modulus
  of degree ``m`` over ``F_q``, found by deterministic search.
* ``F_q(T)`` (kind ``"rational"``): reduced fractions of polynomials in
  ``T`` with monic denominator.
* the perfect closure of ``F_q(T)`` (kind ``"perfect"``): fractions in
  ``S = T^(1/q^k)`` together with the minimal level ``k``.

Elements are immutable, hashable values; all operations are pure and
exact, so sharing them across threads is safe.  The q-power Frobenius is
an automorphism everywhere except on plain ``F_q(T)``, whose missing
``inverse_frobenius`` surfaces as :class:`CapabilityError`.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .errors import CapabilityError, DivisionByZero, DomainError, MixedBackends

# Fields no larger than this get full multiplication tables; beyond it,
# arithmetic decodes to coefficient vectors on the fly.
_TABLE_LIMIT = 512

# Deterministic subfield embeddings search for a root of the source
# modulus; fields larger than this are not searched.
_EMBED_LIMIT = 1 << 20


# ---------------------------------------------------------------------------
# prime powers


def _factor_prime_power(q):
    """Return (p, l) with q = p^l, or raise DomainError."""
    if q < 2:
        raise DomainError(f"q must be a prime power >= 2, got {q}")
    p = None
    n = q
    for d in itertools.chain([2], range(3, q + 1, 2)):
        if d * d > n:
            break
        if n % d == 0:
            p = d
            break
    if p is None:
        p = n
    l = 0
    while n > 1:
        if n % p:
            raise DomainError(f"q must be a prime power, got {q}")
        n //= p
        l += 1
    return p, l


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over a small scalar field
#
# Coefficients are integer codes; the scalar field is passed in as an
# object with add/sub/neg/mul/inv on codes.  Zero is always code 0 and
# one is always code 1.  Polynomials are tuples with no trailing zeros.


class _PrimeScalars:
    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, self.p - 2, self.p)


def _ptrim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(S, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = S.add(out[i], x)
    return _ptrim(out)


def _pneg(S, a):
    return tuple(S.neg(x) for x in a)


def _psub(S, a, b):
    return _padd(S, a, _pneg(S, b))


def _pscale(S, a, c):
    if c == 0:
        return ()
    return _ptrim(S.mul(x, c) for x in a)


def _prime_p(S):
    """The characteristic when S is a prime field, else 0."""
    p = getattr(S, "p", 0)
    return p if p and getattr(S, "l", 1) == 1 else 0


def _pmul(S, a, b):
    if not a or not b:
        return ()
    if len(a) + len(b) > 96:
        p = _prime_p(S)
        if 0 < p < 256:
            return _pmul_packed(p, a, b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = S.add(out[i + j], S.mul(x, y))
    return _ptrim(out)


def _pmul_packed(p, a, b):
    """Multiply F_p coefficient vectors through one big-integer product.

    Coefficients are packed into byte-aligned slots wide enough that no
    convolution sum overflows into its neighbour, so Python's subquadratic
    integer multiply does the work.
    """
    # largest possible slot value: (p-1)^2 times the shorter length
    wb = (((min(len(a), len(b)) * (p - 1) * (p - 1)).bit_length() + 7) // 8) or 1
    abuf = bytearray(len(a) * wb)
    for i, c in enumerate(a):
        if c:
            abuf[i * wb] = c
    bbuf = bytearray(len(b) * wb)
    for i, c in enumerate(b):
        if c:
            bbuf[i * wb] = c
    prod = int.from_bytes(bytes(abuf), "little") * int.from_bytes(bytes(bbuf), "little")
    raw = prod.to_bytes((len(a) + len(b)) * wb, "little")
    n = len(a) + len(b) - 1
    out = [
        int.from_bytes(raw[k * wb : (k + 1) * wb], "little") % p for k in range(n)
    ]
    return _ptrim(out)


def _pdivmod_packed(p, a, b):
    """Divide F_p coefficient vectors through big-integer row updates.

    The remainder lives in 16-bit slots; each elimination step adds a
    multiple of the divisor small enough that slots never overflow, so
    reduction mod p can wait until the end.
    """
    n, m = len(a), len(b)
    inv_lc = pow(b[-1], p - 2, p)
    buf = bytearray(2 * n)
    buf[0::2] = bytes(a)
    R = int.from_bytes(buf, "little")
    buf = bytearray(2 * m)
    buf[0::2] = bytes(b)
    B = int.from_bytes(buf, "little")
    quo = [0] * (n - m + 1)
    for i in range(n - m, -1, -1):
        c = ((R >> (16 * (i + m - 1))) & 0xFFFF) % p
        if c:
            c = (c * inv_lc) % p
            quo[i] = c
            R += ((p - c) * B) << (16 * i)
    raw = R.to_bytes(2 * n + 2, "little")
    rem = [(raw[2 * j] | (raw[2 * j + 1] << 8)) % p for j in range(m - 1)]
    return _ptrim(quo), _ptrim(rem)


def _pdivmod(S, a, b):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    if len(a) > 48 and len(b) > 1:
        p = _prime_p(S)
        # slot bound: worst slot sees min(steps, m) additions of (p-1)^2
        if p and min(len(a) - len(b) + 1, len(b)) * (p - 1) * (p - 1) + p < 65536:
            return _pdivmod_packed(p, a, b)
    inv_lc = S.inv(b[-1])
    rem = list(a)
    quo = [0] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = S.mul(rem[i + len(b) - 1], inv_lc)
        if c:
            quo[i] = c
            for j, bj in enumerate(b):
                if bj:
                    rem[i + j] = S.sub(rem[i + j], S.mul(c, bj))
    return _ptrim(quo), _ptrim(rem)


def _pmod(S, a, b):
    return _pdivmod(S, a, b)[1]


def _pmonic(S, a):
    if not a or a[-1] == 1:
        return a
    return _pscale(S, a, S.inv(a[-1]))


def _pval(a):
    for i, c in enumerate(a):
        if c:
            return i
    return len(a)


_MOD_TABLES = {}


def _mod_tables(p):
    tabs = _MOD_TABLES.get(p)
    if tabs is None:
        tabs = (bytes(v % p for v in range(256)),
                bytes((v << 8) % p for v in range(256)))
        _MOD_TABLES[p] = tabs
    return tabs


def _canon_slots(R, nbytes, p):
    """Reduce every 16-bit slot of a packed vector mod p."""
    t0, t1 = _mod_tables(p)
    raw = R.to_bytes(nbytes, "little")
    buf = bytearray(nbytes)
    buf[0::2] = raw[0::2].translate(t0)
    lo = int.from_bytes(buf, "little")
    buf = bytearray(nbytes)
    buf[0::2] = raw[1::2].translate(t1)
    R = lo + int.from_bytes(buf, "little")
    # slots are now at most 2(p-1); one more low-byte pass lands in 0..p-1
    raw = R.to_bytes(nbytes, "little")
    buf = bytearray(nbytes)
    buf[0::2] = raw[0::2].translate(t0)
    return int.from_bytes(buf, "little")


def _pgcd_packed(p, a, b):
    """Euclid's loop on F_p vectors packed into 16-bit big-integer slots.

    Remainders never leave packed form; slots are reduced mod p once per
    round by byte-table translation, so each round costs O(n) C-level work.
    """
    nbytes = 2 * max(len(a), len(b)) + 2
    buf = bytearray(nbytes)
    buf[0 : 2 * len(a) : 2] = bytes(a)
    A = int.from_bytes(buf, "little")
    buf = bytearray(nbytes)
    buf[0 : 2 * len(b) : 2] = bytes(b)
    B = int.from_bytes(buf, "little")
    da = len(a) - 1
    db = len(b) - 1
    if da < db:
        A, B, da, db = B, A, db, da
    bound = 65535 - p
    while B:
        lc = (B >> (16 * db)) & 0xFFFF
        inv_lc = pow(lc, p - 2, p)
        if min(da - db + 1, db + 1) * (p - 1) * (p - 1) > bound:
            break  # would overflow a slot; finish on the generic path
        for i in range(da - db, -1, -1):
            c = ((A >> (16 * (i + db))) & 0xFFFF) % p
            if c:
                A += (p - (c * inv_lc) % p) * B << (16 * i)
        A = _canon_slots(A, nbytes, p)
        A, B = B, A
        da = db
        db = (B.bit_length() - 1) // 16 if B else 0
    raw = A.to_bytes(nbytes, "little")
    g = _ptrim([raw[2 * j] for j in range(da + 1)])
    if B:  # overflow bail-out: hand the current pair back as tuples
        raw = B.to_bytes(nbytes, "little")
        h = _ptrim([raw[2 * j] for j in range(db + 1)])
        return g, h
    return g, ()


def _pgcd(S, a, b):
    if not a:
        return _pmonic(S, b)
    if not b:
        return _pmonic(S, a)
    if len(a) == 1 or len(b) == 1:
        return (1,)
    # a monomial on either side pins the gcd to a power of T
    if a.count(0) == len(a) - 1:
        return (0,) * min(len(a) - 1, _pval(b)) + (1,)
    if b.count(0) == len(b) - 1:
        return (0,) * min(len(b) - 1, _pval(a)) + (1,)
    if len(a) + len(b) > 128:
        p = _prime_p(S)
        if p and p <= 13:
            a, b = _pgcd_packed(p, a, b)
    while b:
        a, b = b, _pmod(S, a, b)
    return _pmonic(S, a)


def _pxgcd(S, a, b):
    """Return (g, u, v) with u*a + v*b = g, g monic (or zero)."""
    r0, r1 = a, b
    u0, u1 = (1,), ()
    v0, v1 = (), (1,)
    while r1:
        q, r = _pdivmod(S, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, _psub(S, u0, _pmul(S, q, u1))
        v0, v1 = v1, _psub(S, v0, _pmul(S, q, v1))
    if r0 and r0[-1] != 1:
        c = S.inv(r0[-1])
        r0, u0, v0 = _pscale(S, r0, c), _pscale(S, u0, c), _pscale(S, v0, c)
    return r0, u0, v0


def _peval(S, a, x):
    acc = 0
    for c in reversed(a):
        acc = S.add(S.mul(acc, x), c)
    return acc


def _ppow_mod(S, a, e, mod):
    result = (1,)
    base = _pmod(S, a, mod)
    while e:
        if e & 1:
            result = _pmod(S, _pmul(S, result, base), mod)
        base = _pmod(S, _pmul(S, base, base), mod)
        e >>= 1
    return result


def _pirreducible(S, f, qsize):
    """Rabin's test: is the monic f irreducible over the q-element field?"""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = (0, 1)
    # x^(q^k) mod f by iterated q-th powers in the quotient ring
    xq = _ppow_mod(S, x, qsize, f)
    powers = {1: xq}
    cur = xq
    for k in range(2, d + 1):
        cur = _ppow_mod(S, cur, qsize, f)
        powers[k] = cur
    if _psub(S, powers[d], x):
        return False
    for r in _prime_factors(d):
        h = _psub(S, powers[d // r], x)
        if len(_pgcd(S, h, f)) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def _first_irreducible(p, l, d):
    """Lexicographically first monic irreducible of degree d over F_q, q = p^l.

    Candidates are ordered by the integer whose base-q digits are the
    non-leading coefficients (constant digit fastest).
    """
    if l == 1:
        S = _PrimeScalars(p)
    else:
        S = _fq_ctx(p, l).scalars
    q = p**l
    for code in range(q**d):
        digits = []
        c = code
        for _ in range(d):
            digits.append(c % q)
            c //= q
        f = _ptrim(digits + [1])
        if _pirreducible(S, f, q):
            return f
    raise DomainError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# F_q context


class _FqScalars:
    """Scalar view of an F_q context, for the generic polynomial helpers."""

    __slots__ = ("add", "sub", "neg", "mul", "inv", "p", "l")

    def __init__(self, ctx):
        self.add = ctx.add
        self.sub = ctx.sub
        self.neg = ctx.neg
        self.mul = ctx.mul
        self.inv = ctx.inv
        self.p = ctx.p
        self.l = ctx.l


class _FqCtx:
    """Arithmetic on F_q element codes, q = p^l."""

    def __init__(self, p, l):
        self.p = p
        self.l = l
        self.q = p**l
        if l == 1:
            self.umod = None
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.neg = lambda a: (-a) % p
            self.mul = lambda a, b: (a * b) % p
            self.inv = self._inv_prime
        else:
            base = _PrimeScalars(p)
            self.umod = _first_irreducible(p, 1, l)
            self._base = base
            if self.q <= _TABLE_LIMIT:
                self._build_tables()
            else:
                self.add = self._add_slow
                self.sub = self._sub_slow
                self.neg = self._neg_slow
                self.mul = self._mul_slow
                self.inv = self._inv_slow
        self.scalars = _FqScalars(self)

    def _inv_prime(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, self.p - 2, self.p)

    # --- l > 1 support

    def decode(self, code):
        p, l = self.p, self.l
        digits = []
        for _ in range(l):
            digits.append(code % p)
            code //= p
        return _ptrim(digits)

    def encode(self, digits):
        code = 0
        for d in reversed(digits):
            code = code * self.p + d
        return code

    def _add_slow(self, a, b):
        return self.encode(_padd(self._base, self.decode(a), self.decode(b)))

    def _sub_slow(self, a, b):
        return self.encode(_psub(self._base, self.decode(a), self.decode(b)))

    def _neg_slow(self, a):
        return self.encode(_pneg(self._base, self.decode(a)))

    def _mul_slow(self, a, b):
        prod = _pmul(self._base, self.decode(a), self.decode(b))
        return self.encode(_pmod(self._base, prod, self.umod))

    def _inv_slow(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        g, u, _ = _pxgcd(self._base, self.decode(a), self.umod)
        if len(g) != 1:
            raise DivisionByZero("not invertible")  # pragma: no cover
        return self.encode(_pscale(self._base, u, self._base.inv(g[0])))

    def _build_tables(self):
        q = self.q
        adds = [[self._add_slow(a, b) for b in range(q)] for a in range(q)]
        muls = [[self._mul_slow(a, b) for b in range(q)] for a in range(q)]
        negs = [self._neg_slow(a) for a in range(q)]
        invs = [0] + [self._inv_slow(a) for a in range(1, q)]
        self.add = lambda a, b: adds[a][b]
        self.sub = lambda a, b: adds[a][negs[b]]
        self.neg = lambda a: negs[a]
        self.mul = lambda a, b: muls[a][b]
        self.inv = lambda a: invs[a] if a else self._raise_zero()

    @staticmethod
    def _raise_zero():
        raise DivisionByZero("inverse of 0")

    def str_code(self, code):
        if self.l == 1:
            return str(code)
        return _poly_str(self.decode(code), "u", str, prime_coeffs=True)


@functools.lru_cache(maxsize=None)
def _fq_ctx(p, l):
    return _FqCtx(p, l)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class FieldDescriptor:
    """Identity of a coefficient field backend.

    ``kind`` is one of ``"prime"`` (K = F_q itself), ``"ext"``
    (K = F_{q^m} with the stored modulus over F_q), ``"rational"``
    (K = F_q(T)) and ``"perfect"`` (perfect closure of F_q(T)).
    """

    p: int
    l: int
    kind: str
    m: int = 1
    modulus: tuple = None

    @property
    def q(self):
        return self.p**self.l

    @property
    def is_finite(self):
        return self.kind in ("prime", "ext")

    @property
    def has_inverse_frobenius(self):
        return self.kind != "rational"

    @property
    def degree_over_fq(self):
        """Degree of K over F_q for finite backends, else None."""
        if self.kind == "prime":
            return 1
        if self.kind == "ext":
            return self.m
        return None

    def __str__(self):
        q = self.q
        if self.kind == "prime":
            return f"F{q}"
        if self.kind == "ext":
            return f"F{q}^{self.m}"
        if self.kind == "rational":
            return f"F{q}(T)"
        return f"F{q}(T)perf"


def base_field(q):
    """The field F_q itself (q any prime power)."""
    p, l = _factor_prime_power(q)
    return FieldDescriptor(p, l, "prime")


def extension_field(q, m, modulus=None):
    """F_{q^m} presented as F_q[g]/(modulus); default modulus is the
    lexicographically first monic irreducible of degree m over F_q."""
    p, l = _factor_prime_power(q)
    if m < 1:
        raise DomainError(f"extension degree must be >= 1, got {m}")
    if m == 1 and modulus is None:
        return FieldDescriptor(p, l, "prime")
    if modulus is None:
        modulus = _first_irreducible(p, l, m)
    else:
        modulus = _ptrim(modulus)
        S = _fq_ctx(p, l).scalars
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise DomainError("modulus must be monic of degree m")
        if not _pirreducible(S, modulus, p**l):
            raise DomainError("modulus must be irreducible over F_q")
    return FieldDescriptor(p, l, "ext", m, tuple(modulus))


def rational_function_field(q):
    """The rational function field F_q(T)."""
    p, l = _factor_prime_power(q)
    return FieldDescriptor(p, l, "rational")


def perfect_closure(q):
    """The perfect closure of F_q(T): the union of all F_q(T^(1/q^k))."""
    p, l = _factor_prime_power(q)
    return FieldDescriptor(p, l, "perfect")


def extension_of(desc, m):
    """The degree-m extension of F_q compatible with desc's coefficients.

    desc must be a finite backend whose degree divides m.
    """
    if not desc.is_finite:
        raise CapabilityError("extensions are only built over finite backends")
    m0 = desc.degree_over_fq
    if m % m0:
        raise DomainError(f"degree {m0} does not divide {m}")
    if m == m0:
        return desc
    return extension_field(desc.q, m)


# ---------------------------------------------------------------------------
# backend contexts


class _ExtCtx:
    """Arithmetic on F_{q^m} element codes (base-q digit vectors in g)."""

    def __init__(self, desc):
        self.desc = desc
        self.fq = _fq_ctx(desc.p, desc.l)
        self.q = desc.q
        self.m = desc.m
        self.size = self.q**self.m
        self.mod = desc.modulus
        self.S = self.fq.scalars
        self._frob_matrix = None
        if self.size <= _TABLE_LIMIT:
            self._build_tables()
        else:
            self.add = self._add_slow
            self.sub = self._sub_slow
            self.neg = self._neg_slow
            self.mul = self._mul_slow
            self.inv = self._inv_slow
            self.frob = self._frob_slow

    def decode(self, code):
        q = self.q
        digits = []
        for _ in range(self.m):
            digits.append(code % q)
            code //= q
        return _ptrim(digits)

    def encode(self, digits):
        code = 0
        for d in reversed(digits):
            code = code * self.q + d
        return code

    def _add_slow(self, a, b):
        return self.encode(_padd(self.S, self.decode(a), self.decode(b)))

    def _sub_slow(self, a, b):
        return self.encode(_psub(self.S, self.decode(a), self.decode(b)))

    def _neg_slow(self, a):
        return self.encode(_pneg(self.S, self.decode(a)))

    def _mul_slow(self, a, b):
        prod = _pmul(self.S, self.decode(a), self.decode(b))
        return self.encode(_pmod(self.S, prod, self.mod))

    def _inv_slow(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        g, u, _ = _pxgcd(self.S, self.decode(a), self.mod)
        return self.encode(_pscale(self.S, u, self.S.inv(g[0])))

    def pow_int(self, a, e):
        if e < 0:
            return self.pow_int(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _frob_slow(self, a):
        # x -> x^q as an F_q-linear map; build its matrix once
        if self._frob_matrix is None:
            cols = []
            g = self.encode((0, 1)) if self.m > 1 else 1
            for i in range(self.m):
                gi = self.pow_int(g, i)
                giq = self.pow_int(gi, self.q)
                d = self.decode(giq)
                cols.append(tuple(d) + (0,) * (self.m - len(d)))
            self._frob_matrix = cols
        digits = self.decode(a)
        out = [0] * self.m
        add, mul = self.fq.add, self.fq.mul
        for i, c in enumerate(digits):
            if c:
                col = self._frob_matrix[i]
                for j in range(self.m):
                    if col[j]:
                        out[j] = add(out[j], mul(c, col[j]))
        return self.encode(out)

    def _build_tables(self):
        # the slow ops are needed to fill the tables themselves
        self.add, self.sub, self.neg = self._add_slow, self._sub_slow, self._neg_slow
        self.mul, self.inv, self.frob = self._mul_slow, self._inv_slow, self._frob_slow
        n = self.size
        adds = [[self._add_slow(a, b) for b in range(n)] for a in range(n)]
        muls = [[self._mul_slow(a, b) for b in range(n)] for a in range(n)]
        negs = [self._neg_slow(a) for a in range(n)]
        invs = [0] + [self._inv_slow(a) for a in range(1, n)]
        frobs = [self._frob_slow(a) for a in range(n)]
        self.add = lambda a, b: adds[a][b]
        self.sub = lambda a, b: adds[a][negs[b]]
        self.neg = lambda a: negs[a]
        self.mul = lambda a, b: muls[a][b]
        self.inv = lambda a: invs[a] if a else _FqCtx._raise_zero()
        self.frob = lambda a: frobs[a]

    def frobenius(self, a, n):
        n %= self.m
        for _ in range(n):
            a = self.frob(a)
        return a

    def str_code(self, code):
        coeffs = self.decode(code)
        return _poly_str(coeffs, "g", self.fq.str_code,
                         prime_coeffs=(self.fq.l == 1))


class _FiniteElemOps:
    """Uniform payload operations for the two finite backends."""

    def __init__(self, desc):
        self.desc = desc
        if desc.kind == "prime":
            ctx = _fq_ctx(desc.p, desc.l)
            self.add, self.sub, self.neg = ctx.add, ctx.sub, ctx.neg
            self.mul, self.inv = ctx.mul, ctx.inv
            self.frobenius = lambda a, n: a  # x^q = x on F_q
            self.inv_frobenius = lambda a, n: a
            self.str_pay = ctx.str_code
            self.fq = ctx
            self.degree = 1
            self.size = desc.q
            self._pow = lambda a, e: pow(a, e, desc.p) if desc.l == 1 else None
            if desc.l > 1:
                self._pow = self._pow_generic
        else:
            ctx = _ext_ctx(desc)
            self.add, self.sub, self.neg = ctx.add, ctx.sub, ctx.neg
            self.mul, self.inv = ctx.mul, ctx.inv
            self.frobenius = ctx.frobenius
            self.inv_frobenius = lambda a, n: ctx.frobenius(a, (-n) % ctx.m)
            self.str_pay = ctx.str_code
            self.ext = ctx
            self.fq = ctx.fq
            self.degree = ctx.m
            self.size = ctx.size
            self._pow = ctx.pow_int

    def _pow_generic(self, a, e):
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def pow_int(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        return self._pow(a, e)

    def is_zero(self, a):
        return a == 0

    zero = 0
    one = 1

    def from_int(self, n):
        return n % self.desc.p

    def sort_key(self, a):
        return (a,)


class _RationalOps:
    """Payload operations for F_q(T): (num, den) in lowest terms."""

    def __init__(self, desc):
        self.desc = desc
        self.fq = _fq_ctx(desc.p, desc.l)
        self.S = self.fq.scalars
        self.zero = ((), (1,))
        self.one = ((1,), (1,))

    def make(self, num, den):
        S = self.S
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            return self.zero
        if len(den) > 1:
            g = _pgcd(S, num, den)
            if len(g) > 1:
                num = _pdivmod(S, num, g)[0]
                den = _pdivmod(S, den, g)[0]
        if den[-1] != 1:
            c = S.inv(den[-1])
            num = _pscale(S, num, c)
            den = _pscale(S, den, c)
        return (num, den)

    def add(self, a, b):
        S = self.S
        n = _padd(S, _pmul(S, a[0], b[1]), _pmul(S, b[0], a[1]))
        return self.make(n, _pmul(S, a[1], b[1]))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return (_pneg(self.S, a[0]), a[1])

    def mul(self, a, b):
        S = self.S
        return self.make(_pmul(S, a[0], b[0]), _pmul(S, a[1], b[1]))

    def inv(self, a):
        if not a[0]:
            raise DivisionByZero("inverse of 0")
        return self.make(a[1], a[0])

    def pow_int(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a):
        return not a[0]

    def from_int(self, n):
        c = n % self.desc.p
        return ((c,), (1,)) if c else self.zero

    @staticmethod
    def _stretch(poly, factor):
        if not poly:
            return ()
        out = [0] * ((len(poly) - 1) * factor + 1)
        for i, c in enumerate(poly):
            out[i * factor] = c
        return tuple(out)

    def content(self, pays):
        """Shared content g/h of nonzero fraction payloads, g dividing every
        numerator and h every denominator.  None if trivial.  Dividing each
        element by it can only shrink both parts."""
        S = self.S
        g = None
        h = None
        for num, den in pays:
            g = num if g is None else _pgcd(S, g, num)
            h = den if h is None else _pgcd(S, h, den)
        if g is None or (len(g) <= 1 and len(h) <= 1):
            return None
        return self.make(g, h)

    def frobenius(self, a, n):
        # coefficients are fixed by x -> x^q; only T -> T^(q^n) acts
        if n == 0 or not a[0]:
            return a
        f = self.q_power(n)
        return (self._stretch(a[0], f), self._stretch(a[1], f))

    def q_power(self, n):
        return self.desc.q**n

    def inv_frobenius(self, a, n):
        # coefficients are fixed; T^(1/q^n) exists only for stretched
        # polynomials, everything else needs the perfect closure
        if n == 0 or not a[0]:
            return a
        f = self.q_power(n)
        num, den = a
        if any(c and (i % f) for i, c in enumerate(num)) or \
                any(c and (i % f) for i, c in enumerate(den)):
            raise CapabilityError(
                "this element has no q-th root in F_q(T); "
                "use the perfect closure backend")
        return (tuple(num[i] for i in range(0, len(num), f)),
                tuple(den[i] for i in range(0, len(den), f)))

    def str_pay(self, a):
        num, den = a
        ns = _poly_str(num, "T", self.fq.str_code,
                       prime_coeffs=(self.fq.l == 1))
        if den == (1,):
            return ns
        ds = _poly_str(den, "T", self.fq.str_code,
                       prime_coeffs=(self.fq.l == 1))
        if _needs_parens(ns):
            ns = f"({ns})"
        if _needs_parens(ds) or "*" in ds or "^" in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def sort_key(self, a):
        return (len(a[0]), a[0], len(a[1]), a[1])


class _PerfectOps(_RationalOps):
    """Payload operations for the perfect closure: (num, den, level)."""

    def __init__(self, desc):
        super().__init__(desc)
        self.zero = ((), (1,), 0)
        self.one = ((1,), (1,), 0)

    def _normalize(self, num, den, k):
        q = self.desc.q
        while k > 0:
            if any(c and (i % q) for i, c in enumerate(num)):
                break
            if any(c and (i % q) for i, c in enumerate(den)):
                break
            num = tuple(num[i] for i in range(0, len(num), q))
            den = tuple(den[i] for i in range(0, len(den), q))
            k -= 1
        return (num, den, k)

    def make3(self, num, den, k):
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            return self.zero
        num, den = _RationalOps.make(self, num, den)
        return self._normalize(num, den, k)

    def _align(self, a, b):
        k = max(a[2], b[2])
        fa = self.q_power(k - a[2])
        fb = self.q_power(k - b[2])
        return ((self._stretch(a[0], fa), self._stretch(a[1], fa)),
                (self._stretch(b[0], fb), self._stretch(b[1], fb)), k)

    def add(self, a, b):
        ra, rb, k = self._align(a, b)
        S = self.S
        n = _padd(S, _pmul(S, ra[0], rb[1]), _pmul(S, rb[0], ra[1]))
        return self.make3(n, _pmul(S, ra[1], rb[1]), k)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return (_pneg(self.S, a[0]), a[1], a[2])

    def mul(self, a, b):
        ra, rb, k = self._align(a, b)
        S = self.S
        return self.make3(_pmul(S, ra[0], rb[0]), _pmul(S, ra[1], rb[1]), k)

    def inv(self, a):
        if not a[0]:
            raise DivisionByZero("inverse of 0")
        return self.make3(a[1], a[0], a[2])

    def is_zero(self, a):
        return not a[0]

    def from_int(self, n):
        c = n % self.desc.p
        return ((c,), (1,), 0) if c else self.zero

    def content(self, pays):
        S = self.S
        lev = max(a[2] for a in pays)
        g = None
        h = None
        for num, den, k in pays:
            f = self.q_power(lev - k)
            if f > 1:
                num, den = self._stretch(num, f), self._stretch(den, f)
            g = num if g is None else _pgcd(S, g, num)
            h = den if h is None else _pgcd(S, h, den)
        if g is None or (len(g) <= 1 and len(h) <= 1):
            return None
        return self.make3(g, h, lev)

    def frobenius(self, a, n):
        if n == 0 or not a[0]:
            return a
        num, den, k = a
        drop = min(k, n)
        k -= drop
        n -= drop
        if n:
            f = self.q_power(n)
            num, den = self._stretch(num, f), self._stretch(den, f)
        return self._normalize(num, den, k)

    def inv_frobenius(self, a, n):
        if n == 0 or not a[0]:
            return a
        return self._normalize(a[0], a[1], a[2] + n)

    def str_pay(self, a):
        num, den, k = a
        var = "T" if k == 0 else "S{%d}" % k
        ns = _poly_str(num, var, self.fq.str_code,
                       prime_coeffs=(self.fq.l == 1))
        if den == (1,):
            return ns
        ds = _poly_str(den, var, self.fq.str_code,
                       prime_coeffs=(self.fq.l == 1))
        if _needs_parens(ns):
            ns = f"({ns})"
        if _needs_parens(ds) or "*" in ds or "^" in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def sort_key(self, a):
        return (a[2], len(a[0]), a[0], len(a[1]), a[1])


@functools.lru_cache(maxsize=None)
def _ext_ctx(desc):
    return _ExtCtx(desc)


@functools.lru_cache(maxsize=None)
def _ops(desc):
    if desc.kind in ("prime", "ext"):
        return _FiniteElemOps(desc)
    if desc.kind == "rational":
        return _RationalOps(desc)
    if desc.kind == "perfect":
        return _PerfectOps(desc)
    raise DomainError(f"unknown backend kind {desc.kind!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# rendering helpers


def _needs_parens(s):
    return "+" in s or ("-" in s and not s.startswith("-")) or "/" in s


def _poly_str(coeffs, var, coeff_str, prime_coeffs):
    """Render a coefficient tuple as a polynomial in var, descending powers."""
    if not coeffs:
        return "0"
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        if e == 0:
            terms.append(coeff_str(c))
            continue
        v = var if e == 1 else f"{var}^{e}"
        if c == 1:
            terms.append(v)
        else:
            cs = coeff_str(c)
            if not prime_coeffs and _needs_parens(cs):
                cs = f"({cs})"
            terms.append(f"{cs}*{v}")
    return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# elements


class FieldElement:
    """An element of one of the coefficient field backends.

    Carries its :class:`FieldDescriptor`; mixing descriptors in one
    operation raises :class:`MixedBackends`.  Integers coerce to the
    prime subfield.
    """

    __slots__ = ("desc", "pay")

    def __init__(self, desc, pay):
        self.desc = desc
        self.pay = pay

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.desc != self.desc:
                raise MixedBackends(
                    f"cannot combine {self.desc} and {other.desc} elements")
            return other
        if isinstance(other, int):
            return from_int(self.desc, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.desc, _ops(self.desc).add(self.pay, o.pay))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.desc, _ops(self.desc).sub(self.pay, o.pay))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.desc, _ops(self.desc).sub(o.pay, self.pay))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.desc, _ops(self.desc).mul(self.pay, o.pay))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ops = _ops(self.desc)
        return FieldElement(self.desc, ops.mul(self.pay, ops.inv(o.pay)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ops = _ops(self.desc)
        return FieldElement(self.desc, ops.mul(o.pay, ops.inv(self.pay)))

    def __neg__(self):
        return FieldElement(self.desc, _ops(self.desc).neg(self.pay))

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        return FieldElement(self.desc, _ops(self.desc).pow_int(self.pay, e))

    def inverse(self):
        return FieldElement(self.desc, _ops(self.desc).inv(self.pay))

    def frobenius(self, n=1):
        """x -> x^(q^n)."""
        if n < 0:
            return self.inverse_frobenius(-n)
        return FieldElement(self.desc, _ops(self.desc).frobenius(self.pay, n))

    def inverse_frobenius(self, n=1):
        """The unique y with y^(q^n) = x, where the backend has one."""
        if n < 0:
            return self.frobenius(-n)
        if n == 0:
            return self
        return FieldElement(self.desc,
                            _ops(self.desc).inv_frobenius(self.pay, n))

    @property
    def is_zero(self):
        return _ops(self.desc).is_zero(self.pay)

    def __bool__(self):
        return not self.is_zero

    def __eq__(self, other):
        if isinstance(other, int):
            other = from_int(self.desc, other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.desc == other.desc and self.pay == other.pay

    def __hash__(self):
        return hash((self.desc, self.pay))

    def sort_key(self):
        return _ops(self.desc).sort_key(self.pay)

    def __str__(self):
        return _ops(self.desc).str_pay(self.pay)

    def __repr__(self):
        return f"<{self} : {self.desc}>"


def zero(desc):
    return FieldElement(desc, _ops(desc).zero)


def one(desc):
    return FieldElement(desc, _ops(desc).one)


def from_int(desc, n):
    return FieldElement(desc, _ops(desc).from_int(n))


def from_fq_code(desc, code):
    """Embed an F_q element (given by its code) into the backend K."""
    if not 0 <= code < desc.q:
        raise DomainError(f"F_q code out of range: {code}")
    if desc.kind in ("prime", "ext"):
        return FieldElement(desc, code)
    if desc.kind == "rational":
        return FieldElement(desc, ((code,), (1,)) if code else ((), (1,)))
    return FieldElement(desc, ((code,), (1,), 0) if code else ((), (1,), 0))


def coefficient_content(desc, elements):
    """Shared content of some field elements, as an element, or None.

    Over a function-field backend this is g/L with g the gcd of the
    numerators and L the least common denominator; dividing every
    element by it clears denominators and common factors.  Finite
    backends have no content notion.
    """
    ops = _ops(desc)
    fn = getattr(ops, "content", None)
    if fn is None:
        return None
    pays = [e.pay for e in elements if not ops.is_zero(e.pay)]
    if not pays:
        return None
    pay = fn(pays)
    return None if pay is None else FieldElement(desc, pay)


def generator(desc):
    """The extension generator g of an "ext" backend."""
    if desc.kind != "ext":
        raise DomainError(f"{desc} has no extension generator")
    return FieldElement(desc, desc.q)


def base_generator(desc):
    """The generator u of F_q over F_p (only when l > 1)."""
    if desc.l == 1:
        raise DomainError("F_p has no base generator")
    return from_fq_code(desc, desc.p)


def t_element(desc):
    """The transcendental T of a function-field backend."""
    if desc.kind == "rational":
        return FieldElement(desc, ((0, 1), (1,)))
    if desc.kind == "perfect":
        return FieldElement(desc, ((0, 1), (1,), 0))
    raise DomainError(f"{desc} has no element T")


def s_element(desc, k):
    """S{k} = T^(1/q^k) in the perfect closure."""
    if desc.kind != "perfect":
        raise DomainError("S{k} only exists in the perfect closure")
    if k < 0:
        raise DomainError("level must be >= 0")
    return FieldElement(desc, ((0, 1), (1,), k))


# ---------------------------------------------------------------------------
# conversions between backends


@functools.lru_cache(maxsize=None)
def _embed_root(src, dst):
    """Code of the first root of src's modulus inside dst (both ext)."""
    ctx = _ext_ctx(dst)
    if ctx.size > _EMBED_LIMIT:
        raise CapabilityError(
            f"target field of size {ctx.size} is too large for a "
            "deterministic embedding search")
    mod = src.modulus
    mul, add = ctx.mul, ctx.add
    for r in range(ctx.size):
        acc = 0
        for c in reversed(mod):
            acc = add(mul(acc, r), c)
        if acc == 0:
            return r
    raise CapabilityError("modulus has no root in target field")  # pragma: no cover


def embed(x, dst):
    """Embed x into the backend dst, when a canonical embedding exists.

    Supported: identity; F_q into any backend over the same q;
    F_{q^m0} into F_{q^m} when m0 | m; F_q(T) into its perfect closure.
    """
    src = x.desc
    if src == dst:
        return x
    if (src.p, src.l) != (dst.p, dst.l):
        raise MixedBackends(f"no embedding of {src} into {dst}")
    if src.kind == "prime":
        if dst.kind == "ext":
            return FieldElement(dst, x.pay)
        if dst.kind in ("rational", "perfect"):
            return from_fq_code(dst, x.pay)
    if src.kind == "ext" and dst.kind == "ext":
        if dst.m % src.m:
            raise MixedBackends(f"no embedding of {src} into {dst}")
        root = _embed_root(src, dst)
        ctx = _ext_ctx(dst)
        digits = _ext_ctx(src).decode(x.pay)
        acc = 0
        for c in reversed(digits):
            acc = ctx.add(ctx.mul(acc, root), c)
        return FieldElement(dst, acc)
    if src.kind == "rational" and dst.kind == "perfect":
        return FieldElement(dst, (x.pay[0], x.pay[1], 0))
    raise MixedBackends(f"no embedding of {src} into {dst}")


def lift_to_perfect(x):
    """View an F_q(T) element inside the perfect closure."""
    if x.desc.kind == "perfect":
        return x
    if x.desc.kind != "rational":
        raise DomainError(f"cannot lift {x.desc} to a perfect closure")
    return embed(x, perfect_closure(x.desc.q))


def lower_to_rational(x):
    """The F_q(T) form of a level-0 perfect-closure element, else None."""
    if x.desc.kind == "rational":
        return x
    if x.desc.kind != "perfect":
        return None
    num, den, k = x.pay
    if k != 0:
        return None
    return FieldElement(rational_function_field(x.desc.q), (num, den))


# ---------------------------------------------------------------------------
# F_q linear algebra on code vectors


def fq_rref(fq, rows):
    """Reduced row echelon form over F_q. Returns (rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = fq.inv(rows[r][c])
        if inv != 1:
            rows[r] = [fq.mul(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [fq.sub(a, fq.mul(f, b))
                           for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def fq_nullspace(fq, rows, ncols):
    """Basis of {v : rows . v = 0} over F_q, echelon-normalized."""
    rref, pivots = fq_rref(fq, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = fq.neg(rref[r][fc])
        basis.append(tuple(v))
    return basis


def fq_express(fq, basis, target):
    """Coefficients writing target as a combination of basis vectors.

    basis is a list of equal-length code vectors; returns a list of
    codes, or None when target is outside the span.
    """
    if not basis:
        return None if any(target) else []
    n = len(basis[0])
    rows = [list(v) + [0] * len(basis) for v in basis]
    for i in range(len(basis)):
        rows[i][n + i] = 1
    rows.append(list(target) + [0] * len(basis))
    # eliminate on the first n columns only
    r = 0
    pivots = []
    for c in range(n):
        pr = next((i for i in range(r, len(basis)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = fq.inv(rows[r][c])
        if inv != 1:
            rows[r] = [fq.mul(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [fq.sub(a, fq.mul(f, b))
                           for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    last = rows[-1]
    if any(last[:n]):
        return None
    coeffs = [fq.neg(v) for v in last[n:]]
    return coeffs


# ---------------------------------------------------------------------------
# the operator ring A = F_q[T]


class APoly:
    """A polynomial in F_q[T], the ring acting on module structures.

    Coefficients are F_q codes.  Instances are immutable and hashable;
    arithmetic never mixes different q.
    """

    __slots__ = ("p", "l", "coeffs")

    def __init__(self, q, coeffs):
        p, l = _factor_prime_power(q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "coeffs", _ptrim(coeffs))

    def __setattr__(self, *a):
        raise AttributeError("APoly is immutable")

    @property
    def q(self):
        return self.p**self.l

    @property
    def fq(self):
        return _fq_ctx(self.p, self.l)

    @classmethod
    def of(cls, q, *int_coeffs):
        """Build from integer coefficients, constant term first."""
        p, _ = _factor_prime_power(q)
        return cls(q, [c % p for c in int_coeffs])

    @classmethod
    def tvar(cls, q):
        return cls.of(q, 0, 1)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def is_one(self):
        return self.coeffs == (1,)

    @property
    def lc(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _check(self, other):
        if not isinstance(other, APoly):
            if isinstance(other, int):
                return APoly.of(self.q, other)
            return None
        if (other.p, other.l) != (self.p, self.l):
            raise MixedBackends("APoly operands over different F_q")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return APoly(self.q, _padd(self.fq.scalars, self.coeffs, o.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return APoly(self.q, _psub(self.fq.scalars, self.coeffs, o.coeffs))

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return APoly(self.q, _psub(self.fq.scalars, o.coeffs, self.coeffs))

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return APoly(self.q, _pmul(self.fq.scalars, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        return APoly(self.q, _pneg(self.fq.scalars, self.coeffs))

    def __divmod__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        qq, r = _pdivmod(self.fq.scalars, self.coeffs, o.coeffs)
        return APoly(self.q, qq), APoly(self.q, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = APoly.of(self.q, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def gcd(self, other):
        o = self._check(other)
        return APoly(self.q, _pgcd(self.fq.scalars, self.coeffs, o.coeffs))

    def monic(self):
        return APoly(self.q, _pmonic(self.fq.scalars, self.coeffs))

    def divides(self, other):
        o = self._check(other)
        if self.is_zero:
            return o.is_zero
        return (o % self).is_zero

    @property
    def is_prime(self):
        if self.degree < 1:
            return False
        return _pirreducible(self.fq.scalars,
                             _pmonic(self.fq.scalars, self.coeffs), self.q)

    def evaluate(self, x):
        """The image of this polynomial under T -> x (x a FieldElement)."""
        desc = x.desc
        acc = zero(desc)
        for c in reversed(self.coeffs):
            acc = acc * x + from_fq_code(desc, c)
        return acc

    def sort_key(self):
        code = 0
        for c in reversed(self.coeffs):
            code = code * self.q + c
        return (self.degree, code)

    def __eq__(self, other):
        if isinstance(other, int):
            other = APoly.of(self.q, other)
        if not isinstance(other, APoly):
            return NotImplemented
        return (self.p, self.l, self.coeffs) == (other.p, other.l, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.l, self.coeffs))

    def __str__(self):
        return _poly_str(self.coeffs, "T", self.fq.str_code,
                         prime_coeffs=(self.l == 1))

    def __repr__(self):
        return f"APoly({self.q}, {self})"


def apoly_primes(q, *, max_degree=None, count=None, skip=()):
    """Monic irreducibles of F_q[T] in (degree, code) order.

    Stops after max_degree (if given) or count primes (if given).
    ``skip`` is a collection of APoly to leave out.
    """
    skip = set(skip)
    found = 0
    d = 1
    while True:
        if max_degree is not None and d > max_degree:
            return
        for code in range(q**d):
            digits = []
            c = code
            for _ in range(d):
                digits.append(c % q)
                c //= q
            f = APoly(q, digits + [1])
            if f in skip or not f.is_prime:
                continue
            yield f
            found += 1
            if count is not None and found >= count:
                return
        d += 1


def fq_minpoly(x):
    """Minimal polynomial over F_q of an element of a finite backend."""
    desc = x.desc
    if not desc.is_finite:
        raise DomainError("minimal polynomials require a finite backend")
    q = desc.q
    if desc.kind == "prime":
        # x is an F_q element: T - x
        return APoly(q, (_fq_ctx(desc.p, desc.l).neg(x.pay), 1))
    ctx = _ext_ctx(desc)
    m = ctx.m

    def digits(code):
        d = ctx.decode(code)
        return tuple(d) + (0,) * (m - len(d))

    powers = [1]
    vecs = [digits(1)]
    fq = ctx.fq
    cur = 1
    for k in range(1, m + 1):
        cur = ctx.mul(cur, x.pay)
        target = digits(cur)
        coeffs = fq_express(fq, vecs, target)
        if coeffs is not None:
            # x^k = sum coeffs[i] x^i, so minpoly = T^k - sum coeffs[i] T^i
            c = [fq.neg(v) for v in coeffs] + [1]
            return APoly(q, c)
        powers.append(cur)
        vecs.append(target)
    raise DomainError("no minimal polynomial found")  # pragma: no cover
