"""Actions of the polynomial ring A = F_q[T] on varieties.

A structure is generated by a single matrix of additive forms (the
image of T) whose tangent map is multiplication by a scalar delta(T).
From that one matrix the action of every polynomial follows, and with
it torsion kernels, their point enumerations and invariant factors,
a voting procedure for the rank, and the two closure operators: the
smallest stable variety containing a given one, and the largest
irreducible stable variety inside it.
"""

from . import fields
from .errors import (CapabilityError, DomainError, InsufficientPrimes,
                     MixedBackends, NotASubmodule, NotASubvariety)
from .fields import APoly
from .linalg import OreMatrix, TauSubmodule, echelon_pivots
from .ore import OrePoly
from .varieties import (Morphism, _embed_el, _module_over, _working_desc,
                        induced_on_quotient, intersect_varieties, quotient,
                        sum_varieties, zeros)


class TorsionReport:
    """Everything known about the kernel of one polynomial's action."""

    __slots__ = ("a", "is_finite", "dim_fq", "expected", "a_in_ker_delta",
                 "bad_prime_suspected", "elementary_divisors",
                 "_module", "_variety")

    def __init__(self, a, is_finite, dim_fq, expected, a_in_ker_delta,
                 bad_prime_suspected, module):
        self.a = a
        self.is_finite = is_finite
        self.dim_fq = dim_fq
        self.expected = expected
        self.a_in_ker_delta = a_in_ker_delta
        self.bad_prime_suspected = bad_prime_suspected
        self.elementary_divisors = None
        self._module = module
        self._variety = None

    @property
    def variety(self):
        if self._variety is None:
            self._variety = zeros(self._module)
        return self._variety

    @property
    def lifted(self):
        return self.variety.lifted

    def __repr__(self):
        size = f"q^{self.dim_fq}" if self.is_finite else "infinite"
        return f"<TorsionReport a={self.a} size {size}>"


class RankReport:
    """Outcome of the torsion-majority vote."""

    __slots__ = ("rank", "estimates", "bad_primes", "method")

    def __init__(self, rank, estimates, bad_primes):
        self.rank = rank
        self.estimates = estimates
        self.bad_primes = bad_primes
        self.method = "torsion-majority"

    def __repr__(self):
        return f"<RankReport rank={self.rank} bad={self.bad_primes}>"


class TateReport:
    """Torsion growth along the powers of one prime."""

    __slots__ = ("prime", "n_max", "rank", "dims", "ok")

    def __init__(self, prime, n_max, rank, dims, ok):
        self.prime = prime
        self.n_max = n_max
        self.rank = rank
        self.dims = dims
        self.ok = ok

    def __repr__(self):
        return f"<TateReport pi={self.prime} rank={self.rank} ok={self.ok}>"


class AdditivityReport:
    """Ranks of a structure, a stable subvariety, and the quotient."""

    __slots__ = ("total", "sub", "quot", "ok")

    def __init__(self, total, sub, quot):
        self.total = total
        self.sub = sub
        self.quot = quot
        self.ok = total.rank == sub.rank + quot.rank


class ExactnessReport:
    """Torsion dimensions of a structure, a stable subvariety, and the
    quotient."""

    __slots__ = ("a", "total", "sub", "quot", "ok")

    def __init__(self, a, total, sub, quot):
        self.a = a
        self.total = total
        self.sub = sub
        self.quot = quot
        self.ok = (total.is_finite and sub.is_finite and quot.is_finite
                   and total.dim_fq == sub.dim_fq + quot.dim_fq)


def _scalar_diag(desc, n, c):
    z = OrePoly.zero(desc)
    s = OrePoly.scalar(c)
    return OreMatrix(desc, [[s if i == j else z for j in range(n)]
                            for i in range(n)], ncols=n)


def _fq_digits(x):
    """Coordinates of a finite-backend element over F_q."""
    d = x.desc
    if d.kind == "prime":
        return [x.pay]
    ctx = fields._ext_ctx(d)
    dig = list(ctx.decode(x.pay))
    return dig + [0] * (ctx.m - len(dig))


def _flatten_point(pt):
    out = []
    for x in pt:
        out.extend(_fq_digits(x))
    return out


def _smith_apoly(mat):
    """Nonunit invariant factors of a matrix over F_q[T], monic and in
    divisibility order."""
    m = [list(r) for r in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    k = 0
    while k < min(rows, cols):
        piv = None
        for i in range(k, rows):
            for j in range(k, cols):
                e = m[i][j]
                if not e.is_zero and (piv is None
                                      or e.degree < m[piv[0]][piv[1]].degree):
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        m[k], m[i0] = m[i0], m[k]
        for r in m:
            r[k], r[j0] = r[j0], r[k]
        while True:
            restart = False
            for i in range(k + 1, rows):
                if m[i][k].is_zero:
                    continue
                qq, rr = divmod(m[i][k], m[k][k])
                m[i] = [a - qq * b for a, b in zip(m[i], m[k])]
                if not rr.is_zero:
                    m[k], m[i] = m[i], m[k]
                    restart = True
                    break
            if restart:
                continue
            for j in range(k + 1, cols):
                if m[k][j].is_zero:
                    continue
                qq, rr = divmod(m[k][j], m[k][k])
                for r in m:
                    r[j] = r[j] - qq * r[k]
                if not rr.is_zero:
                    for r in m:
                        r[k], r[j] = r[j], r[k]
                    restart = True
                    break
            if restart:
                continue
            break
        diag.append(m[k][k].monic())
        k += 1
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if not diag[i].divides(diag[j]):
                    g = diag[i].gcd(diag[j]).monic()
                    diag[i], diag[j] = g, ((diag[i] * diag[j]) // g).monic()
                    changed = True
    return [d for d in diag if d.degree >= 1]


def _fq_constant_code(x):
    """The F_q code of a function-field constant, or None."""
    if x.desc.kind == "rational":
        num, den = x.pay
    elif x.desc.kind == "perfect":
        num, den, _k = x.pay
    else:
        return None
    if den != (1,) or len(num) > 1:
        return None
    return num[0] if num else 0


class AModuleStructure:
    """A variety together with a compatible action of A = F_q[T].

    The action of T is a self-map of the carrier whose tangent map is
    multiplication by delta(T); the action of any polynomial follows by
    substitution.
    """

    __slots__ = ("carrier", "phi_T", "delta", "characteristic")

    def __init__(self, carrier, phi_T, delta, check=True):
        if isinstance(phi_T, Morphism):
            phi_T = phi_T.matrix
        if isinstance(delta, int):
            delta = fields.from_int(carrier.desc, delta)
        self.carrier = carrier
        self.phi_T = Morphism(carrier, carrier, phi_T, check=check)
        self.delta = delta
        if check:
            self._check_tangent_scalar()
        self.characteristic = self._characteristic()

    @property
    def n(self):
        return self.carrier.n

    @property
    def desc(self):
        return self.carrier.desc

    def _check_tangent_scalar(self):
        work = _working_desc(self.carrier.desc, self.phi_T.matrix.desc,
                             self.delta.desc)
        d = [[_embed_el(e, work) for e in row]
             for row in self.phi_T.differential()]
        dt = _embed_el(self.delta, work)
        for v in self.carrier.tangent_space():
            v = [_embed_el(x, work) for x in v]
            for row, xi in zip(d, v):
                acc = fields.zero(work)
                for c, x in zip(row, v):
                    acc = acc + c * x
                if acc != dt * xi:
                    raise DomainError(
                        "the tangent map of T is not multiplication by "
                        "delta(T) on the carrier")

    def _characteristic(self):
        """Minimal polynomial of delta(T) over F_q, None when delta(T)
        is transcendental."""
        if self.delta.desc.is_finite:
            return fields.fq_minpoly(self.delta)
        c = _fq_constant_code(self.delta)
        if c is None:
            return None
        fq = fields._fq_ctx(self.delta.desc.p, self.delta.desc.l)
        return APoly(self.delta.desc.q, (fq.neg(c), 1))

    def _coerce_a(self, a):
        if isinstance(a, int):
            a = APoly.of(self.desc.q, a)
        if not isinstance(a, APoly):
            raise DomainError("expected a polynomial in F_q[T]")
        if a.q != self.desc.q:
            raise MixedBackends(
                f"polynomial over F_{a.q} cannot act on a {self.desc} variety")
        return a

    def _phi_matrix(self, a):
        desc = self.phi_T.matrix.desc
        n = self.n
        acc = OreMatrix.zero(desc, n, n)
        for c in reversed(a.coeffs):
            acc = acc * self.phi_T.matrix
            if c:
                acc = acc + _scalar_diag(desc, n, fields.from_fq_code(desc, c))
        return acc

    def phi(self, a):
        """The action of a polynomial, as a self-map of the carrier."""
        a = self._coerce_a(a)
        return Morphism(self.carrier, self.carrier, self._phi_matrix(a),
                        check=False)

    def in_ker_delta(self, a):
        a = self._coerce_a(a)
        return a.evaluate(self.delta).is_zero

    # -- torsion

    def _kernel_module(self, mat):
        work = _working_desc(self.carrier.desc, mat.desc)
        gens = _module_over(self.carrier.module, work).gens
        return TauSubmodule(gens.stack(mat.embed(work)))

    def _dims_of(self, mod):
        """(total degree, separable degree) of the pivots, or None when
        the torsion is infinite.

        Row echelon pivots carry the same degree data as the diagonal
        form: the degree sum is the K-dimension of the cokernel, and
        back substitution over the closure solves each pivot equation
        up to its separable part, so the valuation-trimmed degree sum
        counts the F_q-points of the kernel.
        """
        pivots = echelon_pivots(mod.gens)
        if len(pivots) < self.n:
            return None
        total = sep = 0
        for _, piv in pivots:
            total += piv.degree
            val = next(k for k, c in enumerate(piv.coeffs) if not c.is_zero)
            sep += piv.degree - val
        return total, sep

    def torsion(self, a, rank=None):
        """Report on the kernel of the action of a."""
        a = self._coerce_a(a)
        if a.is_zero:
            raise DomainError("every point is killed by 0")
        in_ker = a.evaluate(self.delta).is_zero
        mod = self._kernel_module(self._phi_matrix(a))
        dims = self._dims_of(mod)
        if dims is None:
            return TorsionReport(a, False, None, None, in_ker, False, mod)
        total, dim_fq = dims
        if self.carrier.is_irreducible and not in_ker and total != dim_fq:
            raise AssertionError(
                "internal invariant violated: the kernel of a polynomial "
                "outside ker(delta) must be separable")
        expected = None if rank is None else rank * a.degree
        bad = expected is not None and dim_fq != expected
        return TorsionReport(a, True, dim_fq, expected, in_ker, bad, mod)

    def torsion_points(self, a, max_ext=64):
        """(points, invariant factors) of a finite torsion kernel.

        Points are enumerated over the splitting extension; the factors
        describe the kernel as a module over F_q[T], in divisibility
        order.  Needs a finite backend.
        """
        a = self._coerce_a(a)
        if not self.desc.is_finite:
            raise CapabilityError(
                "torsion points are enumerated over finite backends")
        rep = self.torsion(a)
        if not rep.is_finite:
            raise DomainError("the torsion of this polynomial is infinite")
        V = rep.variety
        M, pts = V.finite_part_points(max_ext)
        dim = V.finite_part_dim
        if len(pts) != self.desc.q ** dim:
            raise AssertionError(
                "internal invariant violated: point count disagrees with "
                "the kernel dimension")
        if dim == 0:
            return pts, []
        fq = fields._fq_ctx(self.desc.p, self.desc.l)
        basis_pts, basis_vecs = [], []
        for p in pts:
            v = _flatten_point(p)
            if any(v) and fields.fq_express(fq, basis_vecs, v) is None:
                basis_pts.append(p)
                basis_vecs.append(v)
        if len(basis_pts) != dim:
            raise AssertionError(
                "internal invariant violated: enumerated points do not "
                "span the kernel")
        target = basis_pts[0][0].desc
        Lt = self.phi_T.matrix.embed(target)
        cols = []
        for b in basis_pts:
            img = Lt.apply(list(b))
            co = fields.fq_express(fq, basis_vecs, _flatten_point(img))
            if co is None:
                raise AssertionError(
                    "internal invariant violated: the kernel is not stable "
                    "under T")
            cols.append(co)
        q = self.desc.q
        tv = APoly.tvar(q)
        entries = [[(tv if i == j else APoly(q, ())) - APoly(q, (cols[j][i],))
                    for j in range(dim)] for i in range(dim)]
        factors = _smith_apoly(entries)
        if sum(f.degree for f in factors) != dim:
            raise AssertionError(
                "internal invariant violated: invariant factors do not "
                "fill the kernel")
        return pts, factors

    # -- rank

    def rank(self, prime_budget=None):
        """Vote on the generic torsion rank across small primes."""
        q = self.desc.q
        skip = set()
        if self.characteristic is not None:
            skip.add(self.characteristic.monic())
        if prime_budget is not None:
            if prime_budget < 1:
                raise DomainError("the vote needs at least one prime")
            primes = list(fields.apoly_primes(q, count=prime_budget,
                                              skip=skip))
        else:
            primes = list(fields.apoly_primes(q, max_degree=2, skip=skip))
            if len(primes) < 5:
                primes = list(fields.apoly_primes(q, count=5, skip=skip))
        estimates = []
        for pi in primes:
            rep = self.torsion(pi)
            if not rep.is_finite:
                estimates.append((pi, None))
                continue
            d, r = divmod(rep.dim_fq, pi.degree)
            estimates.append((pi, d if r == 0 else None))
        tally = {}
        for _, e in estimates:
            if e is not None:
                tally[e] = tally.get(e, 0) + 1
        if not tally:
            raise InsufficientPrimes("no prime produced a finite estimate")
        ntotal = len(primes)
        best_count = max(tally.values())
        top = [v for v, c in tally.items() if c == best_count]
        if best_count * 2 > ntotal:
            winner = top[0]
        elif len(top) > 1:
            winner = next(e for _, e in reversed(estimates) if e in top)
        else:
            raise InsufficientPrimes(
                f"no majority among {ntotal} primes; raise the budget")
        bad = [pi for pi, e in estimates if e != winner]
        return RankReport(winner, estimates, bad)

    def tate_check(self, pi, n_max):
        """Verify the torsion of pi^k grows as (A/pi^k)^r for k up to
        n_max."""
        pi = self._coerce_a(pi)
        if not pi.is_prime:
            raise DomainError("the growth check needs a prime")
        if n_max < 1:
            raise DomainError("n_max must be at least 1")
        if self.in_ker_delta(pi):
            raise DomainError("the prime lies in the kernel of delta")
        if not self.carrier.is_irreducible:
            raise DomainError("the growth check needs an irreducible carrier")
        L = self._phi_matrix(pi)
        acc = L
        dims = []
        for k in range(1, n_max + 1):
            if k > 1:
                acc = acc * L
            d = self._dims_of(self._kernel_module(acc))
            if d is None:
                raise AssertionError(
                    "internal invariant violated: finite torsion expected "
                    "for a prime outside ker(delta)")
            dims.append(d[1])
        r, rem = divmod(dims[0], pi.degree)
        ok = rem == 0 and all(dims[k - 1] == k * r * pi.degree
                              for k in range(1, n_max + 1))
        return TateReport(pi, n_max, r, dims, ok)

    # -- stable subvarieties and quotients

    def is_A_submodule(self, H):
        """Whether a subvariety of the carrier is stable under T."""
        if not self.carrier.contains_variety(H):
            raise NotASubvariety("the variety does not lie in the carrier")
        L = self.phi_T.matrix
        work = _working_desc(H.desc, L.desc)
        mod = _module_over(H.module, work)
        Lw = L.embed(work)
        return all(
            mod.contains((OreMatrix(work, [g], ncols=H.n) * Lw).rows[0])
            for g in mod.gens.rows)

    def submodule(self, H):
        """The induced structure on a stable subvariety."""
        if not self.is_A_submodule(H):
            raise NotASubmodule("the subvariety is not stable under T")
        return AModuleStructure(H, self.phi_T.matrix, self.delta)

    def quotient_structure(self, H):
        """(structure on carrier/H, projection) for a stable H."""
        if not self.is_A_submodule(H):
            raise NotASubmodule("the subvariety is not stable under T")
        Q, pi = quotient(self.carrier, H)
        ind = induced_on_quotient(self.phi_T, pi, pi)
        return AModuleStructure(Q, ind.matrix, self.delta), pi

    def rank_additivity_check(self, H, prime_budget=None):
        """Compare the rank with the ranks of a stable subvariety and
        its quotient."""
        sub = self.submodule(H)
        quo, _ = self.quotient_structure(H)
        return AdditivityReport(self.rank(prime_budget),
                                sub.rank(prime_budget),
                                quo.rank(prime_budget))

    def torsion_exactness_check(self, H, a):
        """Compare torsion dimensions along carrier, stable subvariety,
        and quotient."""
        a = self._coerce_a(a)
        sub = self.submodule(H)
        quo, _ = self.quotient_structure(H)
        return ExactnessReport(a, self.torsion(a), sub.torsion(a),
                               quo.torsion(a))

    # -- closure operators

    def jacobian(self, H, max_steps=None):
        """Smallest T-stable variety containing H inside the carrier."""
        if not self.carrier.contains_variety(H):
            raise NotASubvariety("the variety does not lie in the carrier")
        L = self.phi_T.matrix
        cur = H
        cap = max_steps if max_steps is not None else 2 * self.n + 8
        for _ in range(cap):
            img = Morphism(cur, self.carrier, L, check=False).image()
            nxt = sum_varieties(cur, img)
            if nxt == cur:
                return cur
            cur = nxt
        raise CapabilityError(
            "the closure iteration did not stabilize; the smallest stable "
            "variety may not be reachable by finitely many sums")

    def g_max(self, H):
        """Largest irreducible T-stable variety inside H."""
        if not self.carrier.contains_variety(H):
            raise NotASubvariety("the variety does not lie in the carrier")
        full_map = Morphism(self.carrier, self.carrier, self.phi_T.matrix,
                            check=False)
        cur = H.irreducible_component()
        for _ in range(self.n + 3):
            pre = full_map.preimage(cur)
            nxt = intersect_varieties(cur, pre).irreducible_component()
            if nxt == cur:
                return cur
            cur = nxt
        raise CapabilityError(
            "the descent to the largest stable subvariety did not stabilize")

    def is_sufficiently_generic(self, H):
        """Whether no positive-dimensional stable variety sits inside H."""
        g = self.g_max(H)
        return g.dimension == 0 and g.finite_part_dim == 0

    def __repr__(self):
        return (f"<AModuleStructure on Kbar^{self.n} over {self.desc}, "
                f"delta(T) = {self.delta}>")
