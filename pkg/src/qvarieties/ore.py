"""Twisted polynomials K{t}: F_q-linear maps sum a_i X^(q^i) under composition.

The generator t is the q-power Frobenius X^q, so multiplication is
composition and obeys the commutation rule t*a = a^q*t.  The ring is a
left and right Euclidean domain; right division (and everything built on
it) needs the inverse Frobenius and therefore raises CapabilityError
over plain F_q(T).
"""

from __future__ import annotations

from . import fields
from .errors import (
    CapabilityError,
    DivisionByZero,
    DomainError,
    MixedBackends,
    NoSplittingFound,
)


class OrePoly:
    """An element of K{t}, stored dense with the t^0 coefficient first."""

    __slots__ = ("desc", "coeffs")

    def __init__(self, desc, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        self.desc = desc
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, desc):
        return cls(desc, ())

    @classmethod
    def one(cls, desc):
        return cls(desc, (fields.one(desc),))

    @classmethod
    def tau(cls, desc, k=1, scale=None):
        """scale * t^k (scale defaults to 1)."""
        if k < 0:
            raise DomainError("t-degree must be >= 0")
        c = fields.one(desc) if scale is None else scale
        return cls(desc, (fields.zero(desc),) * k + (c,))

    @classmethod
    def scalar(cls, c):
        return cls(c.desc, (c,))

    @property
    def degree(self):
        """t-degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def lc(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return fields.zero(self.desc)

    @property
    def linear_part(self):
        """The t^0 coefficient: the differential of the map."""
        return self.coeff(0)

    @property
    def is_separable(self):
        """Nonzero with nonzero linear part (the map has trivial kernel
        of inseparability)."""
        return bool(self.coeffs) and not self.coeffs[0].is_zero

    def _coerce(self, other):
        if isinstance(other, OrePoly):
            if other.desc != self.desc:
                raise MixedBackends(
                    f"cannot combine {self.desc} and {other.desc} operators")
            return other
        if isinstance(other, fields.FieldElement):
            if other.desc != self.desc:
                raise MixedBackends(
                    f"cannot combine {self.desc} and {other.desc} operands")
            return OrePoly(self.desc, (other,))
        if isinstance(other, int):
            return OrePoly(self.desc, (fields.from_int(self.desc, other),))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return OrePoly(self.desc, out)

    __radd__ = __add__

    def __neg__(self):
        return OrePoly(self.desc, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        """Composition: (P*Q)(x) = P(Q(x)), so t*a = a^q*t."""
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return OrePoly.zero(self.desc)
        zero = fields.zero(self.desc)
        out = [zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(o.coeffs):
                if not b.is_zero:
                    out[i + j] = out[i + j] + a * b.frobenius(i)
        return OrePoly(self.desc, out)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = OrePoly.one(self.desc)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, fields.FieldElement)):
            other = self._coerce(other)
        if not isinstance(other, OrePoly):
            return NotImplemented
        return self.desc == other.desc and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.desc, self.coeffs))

    # --- division

    def left_divmod(self, g):
        """(quo, rem) with self = quo*g + rem and deg rem < deg g."""
        if not isinstance(g, OrePoly) or g.desc != self.desc:
            g = self._coerce(g)
        if g is None or g.is_zero:
            raise DivisionByZero("division by the zero operator")
        quo = OrePoly.zero(self.desc)
        rem = self
        glc = g.lc
        while rem.degree >= g.degree:
            k = rem.degree - g.degree
            c = rem.lc / glc.frobenius(k)
            term = OrePoly.tau(self.desc, k, c)
            quo = quo + term
            rem = rem - term * g
        return quo, rem

    def right_divmod(self, g):
        """(quo, rem) with self = g*quo + rem; needs inverse Frobenius."""
        if not isinstance(g, OrePoly) or g.desc != self.desc:
            g = self._coerce(g)
        if g is None or g.is_zero:
            raise DivisionByZero("division by the zero operator")
        quo = OrePoly.zero(self.desc)
        rem = self
        glc = g.lc
        while rem.degree >= g.degree:
            k = rem.degree - g.degree
            c = (rem.lc / glc).inverse_frobenius(g.degree)
            term = OrePoly.tau(self.desc, k, c)
            quo = quo + term
            rem = rem - g * term
        return quo, rem

    def monic(self):
        if self.is_zero:
            return self
        return OrePoly.scalar(self.lc.inverse()) * self

    # --- gcd / lcm

    def right_gcd(self, other):
        """Monic generator of the common right divisors (left divisions)."""
        a, b = self, self._coerce(other)
        if a.is_zero and b.is_zero:
            raise DomainError("gcd of two zero operators")
        while not b.is_zero:
            a, b = b, a.left_divmod(b)[1]
        return a.monic()

    def left_gcd(self, other):
        """Monic generator of the common left divisors (right divisions)."""
        a, b = self, self._coerce(other)
        if a.is_zero and b.is_zero:
            raise DomainError("gcd of two zero operators")
        while not b.is_zero:
            a, b = b, a.right_divmod(b)[1]
        return a.monic()

    def left_lcm(self, other):
        """Monic generator of K{t}self intersect K{t}other.

        Found from the syzygy of the left-division chain: running the
        Euclidean algorithm with multipliers, the final relation
        u*self + v*other = 0 gives the lcm u*self.
        """
        b = self._coerce(other)
        if self.is_zero or b.is_zero:
            raise DivisionByZero("lcm with the zero operator")
        r0, r1 = self, b
        u0, u1 = OrePoly.one(self.desc), OrePoly.zero(self.desc)
        while not r1.is_zero:
            q, r = r0.left_divmod(r1)
            r0, r1 = r1, r
            u0, u1 = u1, u0 - q * u1
        return (u1 * self).monic()

    # --- structure

    def twist(self, n):
        """The operator P' with t^n * P = P' * t^n (coefficients to q^n)."""
        if n >= 0:
            return OrePoly(self.desc, (c.frobenius(n) for c in self.coeffs))
        return OrePoly(self.desc,
                       (c.inverse_frobenius(-n) for c in self.coeffs))

    def separable_part(self):
        """(n, Q) with self = t^n * Q and Q separable."""
        if self.is_zero:
            return 0, self
        n = 0
        while self.coeffs[n].is_zero:
            n += 1
        if n == 0:
            return 0, self
        body = OrePoly(self.desc, self.coeffs[n:])
        return n, body.twist(-n)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Apply the F_q-linear map to a point.

        x may live in the operator's own backend or a finite extension
        of it; coefficients embed on the fly.
        """
        if not isinstance(x, fields.FieldElement):
            x = fields.from_int(self.desc, x)
        if x.desc == self.desc:
            coeffs = self.coeffs
        else:
            coeffs = [fields.embed(c, x.desc) for c in self.coeffs]
        if not coeffs:
            return fields.zero(x.desc)
        acc = coeffs[0] * x
        xq = x
        for c in coeffs[1:]:
            xq = xq.frobenius()
            if not c.is_zero:
                acc = acc + c * xq
        return acc

    def kernel_in_extension(self, m):
        """F_q-basis of the kernel inside F_{q^m}.

        The map x -> P(x) is F_q-linear on F_{q^m}; the kernel is the
        nullspace of its m-by-m matrix over F_q.  Only finite backends.
        """
        desc = self.desc
        if not desc.is_finite:
            raise CapabilityError("kernels are enumerated over finite backends")
        target = fields.extension_of(desc, m)
        if self.is_zero:
            raise DomainError("the zero operator has infinite kernel")
        coeffs = [fields.embed(c, target) for c in self.coeffs]
        fq = fields._fq_ctx(desc.p, desc.l)
        if target.kind == "prime":
            # 1-dimensional case: kernel is 0 unless P has a root in F_q
            basis = []
            for code in range(1, desc.q):
                x = fields.FieldElement(target, code)
                if self.evaluate(x).is_zero:
                    basis.append(x)
            rows = [[b.pay] for b in basis]
            reduced = fields.fq_rref(fq, rows)[0] if rows else []
            return [fields.FieldElement(target, r[0]) for r in reduced]
        ctx = fields._ext_ctx(target)
        mm = ctx.m

        def digits(code):
            d = ctx.decode(code)
            return list(d) + [0] * (mm - len(d))

        # columns of the matrix: images of the basis 1, g, ..., g^(m-1)
        cols = []
        g = fields.FieldElement(target, ctx.encode((0, 1)))
        x = fields.one(target)
        P = OrePoly(target, coeffs)
        for i in range(mm):
            cols.append(digits(P.evaluate(x).pay))
            x = x * g
        rows = [[cols[j][i] for j in range(mm)] for i in range(mm)]
        null = fields.fq_nullspace(fq, rows, mm)
        return [fields.FieldElement(target, ctx.encode(v)) for v in null]

    def split_kernel(self, max_ext=64):
        """(m, basis) for the smallest extension holding the full kernel.

        The separable part has a kernel of F_q-dimension equal to its
        t-degree; extensions of degree m0, 2*m0, 3*m0, ... are tried
        until that dimension is reached.  Raises NoSplittingFound past
        max_ext.
        """
        n, sep = self.separable_part()
        if sep.is_zero:
            raise DomainError("the zero operator has infinite kernel")
        want = sep.degree
        m0 = self.desc.degree_over_fq
        if m0 is None:
            raise CapabilityError("kernels are enumerated over finite backends")
        if want == 0:
            return m0, []
        m = m0
        while m <= max_ext:
            basis = sep.kernel_in_extension(m)
            if len(basis) == want:
                return m, basis
            m += m0
        raise NoSplittingFound(
            f"kernel of size q^{want} not found within extensions of degree "
            f"<= {max_ext}")

    def sort_key(self):
        return (self.degree, tuple(c.sort_key() for c in self.coeffs))

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero:
                continue
            cs = str(c)
            if cs == "1":
                terms.append(f"t^{i}")
            else:
                if fields._needs_parens(cs) or "*" in cs:
                    cs = f"({cs})"
                terms.append(f"{cs}*t^{i}")
        return "+".join(terms)

    def __repr__(self):
        return f"<{self} : {self.desc}>"
