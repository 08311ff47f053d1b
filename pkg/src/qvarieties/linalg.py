"""Matrices over K{t}: Hermite form, diagonalization, row modules.

Rows span left submodules of K{t}^n.  Row reduction uses only left
division and works over every backend; diagonalization also needs
column operations, which divide on the right, so over F_q(T) the
computation transparently moves to the perfect closure (the `lifted`
flag records this).
"""

from __future__ import annotations

from . import fields
from .errors import CapabilityError, DivisionByZero, DomainError, MixedBackends
from .ore import OrePoly


class OreMatrix:
    """A rectangular matrix of twisted polynomials over one backend."""

    __slots__ = ("desc", "rows", "nrows", "ncols")

    def __init__(self, desc, rows, ncols=None):
        rows = [list(r) for r in rows]
        if rows:
            ncols = len(rows[0])
        elif ncols is None:
            ncols = 0
        for r in rows:
            if len(r) != ncols:
                raise DomainError("ragged matrix rows")
            for e in r:
                if not isinstance(e, OrePoly) or e.desc != desc:
                    raise MixedBackends("matrix entries must share one backend")
        self.desc = desc
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zero(cls, desc, nrows, ncols):
        z = OrePoly.zero(desc)
        return cls(desc, [[z] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def identity(cls, desc, n):
        z = OrePoly.zero(desc)
        o = OrePoly.one(desc)
        return cls(desc, [[o if i == j else z for j in range(n)]
                          for i in range(n)])

    @classmethod
    def from_scalars(cls, desc, entries):
        """Build from FieldElement (or int) entries: t^0 coefficients."""
        rows = []
        for r in entries:
            row = []
            for e in r:
                if isinstance(e, int):
                    e = fields.from_int(desc, e)
                row.append(OrePoly.scalar(e))
            rows.append(row)
        return cls(desc, rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return list(self.rows[i])

    def col(self, j):
        return [r[j] for r in self.rows]

    def copy(self):
        return OreMatrix(self.desc, self.rows)

    @property
    def is_zero(self):
        return all(e.is_zero for r in self.rows for e in r)

    def __eq__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        return (self.desc == other.desc and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __hash__(self):
        return hash((self.desc, tuple(tuple(r) for r in self.rows)))

    def __add__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DomainError("shape mismatch in matrix sum")
        return OreMatrix(self.desc,
                         [[a + b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return OreMatrix(self.desc, [[-e for e in r] for r in self.rows],
                         ncols=self.ncols)

    def __mul__(self, other):
        if not isinstance(other, OreMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DomainError("shape mismatch in matrix product")
        z = OrePoly.zero(self.desc)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = z
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if a.is_zero or b.is_zero:
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return OreMatrix(self.desc, out, ncols=other.ncols)

    def stack(self, other):
        """Rows of self followed by rows of other."""
        if other.ncols != self.ncols:
            raise DomainError("shape mismatch in vertical stack")
        if other.desc != self.desc:
            raise MixedBackends("cannot stack matrices over different backends")
        return OreMatrix(self.desc, self.rows + other.rows, ncols=self.ncols)

    def hstack(self, other):
        if other.nrows != self.nrows:
            raise DomainError("shape mismatch in horizontal stack")
        return OreMatrix(self.desc,
                         [r1 + r2 for r1, r2 in zip(self.rows, other.rows)],
                         ncols=self.ncols + other.ncols)

    def submatrix(self, row_range, col_range):
        col_range = list(col_range)
        return OreMatrix(self.desc,
                         [[self.rows[i][j] for j in col_range]
                          for i in row_range],
                         ncols=len(col_range))

    def map_entries(self, fn):
        return OreMatrix(self.desc, [[fn(e) for e in r] for r in self.rows],
                         ncols=self.ncols)

    def embed(self, dst):
        """Move every coefficient into the backend dst."""
        if dst == self.desc:
            return self
        def lift(P):
            return OrePoly(dst, (fields.embed(c, dst) for c in P.coeffs))
        return OreMatrix(dst, [[lift(e) for e in r] for r in self.rows],
                         ncols=self.ncols)

    def apply(self, xs):
        """Evaluate the matrix of F_q-linear maps at a point tuple."""
        if len(xs) != self.ncols:
            raise DomainError("point length does not match column count")
        out = []
        for r in self.rows:
            acc = None
            for e, x in zip(r, xs):
                v = e.evaluate(x)
                acc = v if acc is None else acc + v
            out.append(acc)
        return out

    def __str__(self):
        return "[" + "; ".join(
            ", ".join(str(e) for e in r) for r in self.rows) + "]"

    def __repr__(self):
        return f"<OreMatrix {self.nrows}x{self.ncols} : {self.desc}>"


def hermite(mat):
    """Row echelon form under left multiplication: returns (H, T).

    H = T*mat with T unimodular; pivots are monic, entries above a
    pivot have smaller degree, zero rows sit at the bottom.  Only left
    division is used, so this works over every backend.
    """
    desc = mat.desc
    rows = [list(r) for r in mat.rows]
    m, n = mat.nrows, mat.ncols
    t_rows = OreMatrix.identity(desc, m).rows
    rank = 0
    for j in range(n):
        if rank == m:
            break
        while True:
            live = [i for i in range(rank, m) if not rows[i][j].is_zero]
            if not live:
                break
            piv = min(live, key=lambda i: (rows[i][j].degree, i))
            others = [i for i in live if i != piv]
            if not others:
                if piv != rank:
                    rows[piv], rows[rank] = rows[rank], rows[piv]
                    t_rows[piv], t_rows[rank] = t_rows[rank], t_rows[piv]
                lc = rows[rank][j].lc
                if lc != fields.one(desc):
                    c = OrePoly.scalar(lc.inverse())
                    rows[rank] = [c * e for e in rows[rank]]
                    t_rows[rank] = [c * e for e in t_rows[rank]]
                for i in range(rank):
                    if rows[i][j].is_zero:
                        continue
                    q, _ = rows[i][j].left_divmod(rows[rank][j])
                    if q.is_zero:
                        continue
                    rows[i] = [a - q * b
                               for a, b in zip(rows[i], rows[rank])]
                    t_rows[i] = [a - q * b
                                 for a, b in zip(t_rows[i], t_rows[rank])]
                rank += 1
                break
            for i in others:
                q, _ = rows[i][j].left_divmod(rows[piv][j])
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[piv])]
                t_rows[i] = [a - q * b
                             for a, b in zip(t_rows[i], t_rows[piv])]
    return (OreMatrix(desc, rows, ncols=n),
            OreMatrix(desc, t_rows, ncols=m))


def echelon_pivots(mat):
    """Pivot entries of a row echelon form, reached without division.

    Eliminations are cross-multiplied: to cancel leading terms, one row
    is scaled by a nonzero constant and a multiple of the other is
    subtracted.  Scaling a row is unimodular, so the pivot positions,
    degrees and t-valuations agree with the Hermite form's, but no
    leading coefficient is ever inverted.  Over F_q(T) with polynomial
    entries everything stays polynomial, which avoids the fraction
    normalization that dominates the divide-and-reduce path.

    Returns a list of (column, pivot OrePoly) pairs, one per nonzero
    row of the echelon form.
    """
    desc = mat.desc
    rows = [list(r) for r in mat.rows]
    live = list(range(mat.nrows))
    out = []
    for j in range(mat.ncols):
        while True:
            holders = [i for i in live if not rows[i][j].is_zero]
            if len(holders) <= 1:
                break
            piv = min(holders, key=lambda i: (rows[i][j].degree, i))
            g = rows[piv]
            for i in holders:
                if i == piv:
                    continue
                f = rows[i]
                d = f[j].degree - g[j].degree
                cf = OrePoly.scalar(g[j].lc.frobenius(d))
                ct = OrePoly.tau(desc, d, scale=f[j].lc)
                rows[i] = [cf * a - ct * b for a, b in zip(f, g)]
        if holders:
            out.append((j, rows[holders[0]][j]))
            live.remove(holders[0])
    return out


def left_kernel(mat):
    """Basis rows for { v : v*mat = 0 }, via the Hermite transform."""
    H, T = hermite(mat)
    out = []
    for i in range(mat.nrows):
        if all(e.is_zero for e in H.rows[i]):
            out.append(T.rows[i])
    return OreMatrix(mat.desc, out, ncols=mat.nrows)


class DiagForm:
    """Result of diagonalize: D = U*A*V with all four transforms kept.

    D is diagonal with the nonzero entries d_0, ..., d_(r-1) leading;
    U, V are unimodular and U_inv, V_inv are their exact inverses.
    `lifted` records that a rational-backend input was moved to the
    perfect closure to carry out the column operations.
    """

    __slots__ = ("U", "D", "V", "U_inv", "V_inv", "rank", "lifted")

    def __init__(self, U, D, V, U_inv, V_inv, rank, lifted):
        self.U = U
        self.D = D
        self.V = V
        self.U_inv = U_inv
        self.V_inv = V_inv
        self.rank = rank
        self.lifted = lifted

    @property
    def desc(self):
        return self.D.desc

    def diagonal(self):
        return [self.D.rows[i][i] for i in range(self.rank)]


def _diag_core(mat):
    desc = mat.desc
    m, n = mat.nrows, mat.ncols
    rows = [list(r) for r in mat.rows]
    U = OreMatrix.identity(desc, m).rows
    U_inv = OreMatrix.identity(desc, m).rows
    V = OreMatrix.identity(desc, n).rows
    V_inv = OreMatrix.identity(desc, n).rows

    def row_sub(i, k, q):
        # row_i -= q*row_k;  U follows, U_inv absorbs the inverse op
        rows[i] = [a - q * b for a, b in zip(rows[i], rows[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]
        for r in range(m):
            U_inv[r][k] = U_inv[r][k] + U_inv[r][i] * q

    def col_sub(j, k, q):
        # col_j -= col_k*q
        for r in range(m):
            rows[r][j] = rows[r][j] - rows[r][k] * q
        for r in range(n):
            V[r][j] = V[r][j] - V[r][k] * q
        V_inv[k] = [a + q * b for a, b in zip(V_inv[k], V_inv[j])]

    def row_swap(i, k):
        rows[i], rows[k] = rows[k], rows[i]
        U[i], U[k] = U[k], U[i]
        for r in range(m):
            U_inv[r][i], U_inv[r][k] = U_inv[r][k], U_inv[r][i]

    def col_swap(j, k):
        for r in range(m):
            rows[r][j], rows[r][k] = rows[r][k], rows[r][j]
        for r in range(n):
            V[r][j], V[r][k] = V[r][k], V[r][j]
        V_inv[j], V_inv[k] = V_inv[k], V_inv[j]

    def row_scale(i, c):
        # row_i *= c (a unit scalar)
        P = OrePoly.scalar(c)
        rows[i] = [P * e for e in rows[i]]
        U[i] = [P * e for e in U[i]]
        Q = OrePoly.scalar(c.inverse())
        for r in range(m):
            U_inv[r][i] = U_inv[r][i] * Q

    def col_scale(j, c):
        # col_j *= c
        P = OrePoly.scalar(c)
        for r in range(m):
            rows[r][j] = rows[r][j] * P
        for r in range(n):
            V[r][j] = V[r][j] * P
        Q = OrePoly.scalar(c.inverse())
        V_inv[j] = [Q * e for e in V_inv[j]]

    def strip_row(i, j=None):
        # dividing a row by the coefficient content of its freshest
        # remainder keeps the fraction growth of the cascade in check
        if j is not None and not rows[i][j].is_zero:
            coeffs = rows[i][j].coeffs
        else:
            coeffs = [co for e in rows[i] for co in e.coeffs]
        c = fields.coefficient_content(desc, coeffs)
        if c is not None:
            row_scale(i, c.inverse())

    def strip_col(j, i=None):
        if i is not None and not rows[i][j].is_zero:
            coeffs = rows[i][j].coeffs
        else:
            coeffs = [co for r in range(m) for co in rows[r][j].coeffs]
        c = fields.coefficient_content(desc, coeffs)
        if c is not None:
            col_scale(j, c.inverse())

    def entry_size(e):
        return sum(len(part) for c in e.coeffs for part in c.pay[:2]) \
            if desc.kind in ("rational", "perfect") else 0

    for i in range(m):
        strip_row(i)

    k = 0
    while k < min(m, n):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                e = rows[i][j]
                if e.is_zero:
                    continue
                key = (e.degree, entry_size(e), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != k:
            row_swap(bi, k)
        if bj != k:
            col_swap(bj, k)
        dirty = False
        for i in range(m):
            if i == k or rows[i][k].is_zero:
                continue
            q, r = rows[i][k].left_divmod(rows[k][k])
            row_sub(i, k, q)
            strip_row(i, k)
            if not r.is_zero:
                dirty = True
        for j in range(n):
            if j == k or rows[k][j].is_zero:
                continue
            q, r = rows[k][j].right_divmod(rows[k][k])
            col_sub(j, k, q)
            strip_col(j, k)
            if not r.is_zero:
                dirty = True
        if dirty:
            continue
        lc = rows[k][k].lc
        if lc != fields.one(desc):
            row_scale(k, lc.inverse())
        k += 1

    return (OreMatrix(desc, U, ncols=m), OreMatrix(desc, rows, ncols=n),
            OreMatrix(desc, V, ncols=n), OreMatrix(desc, U_inv, ncols=m),
            OreMatrix(desc, V_inv, ncols=n), k)


def diagonalize(mat):
    """Two-sided reduction to diagonal form with tracked inverses.

    Over F_q(T) the column operations may need the inverse Frobenius;
    in that case the whole computation restarts over the perfect
    closure and the result carries lifted=True.
    """
    lifted = False
    work = mat
    try:
        U, D, V, U_inv, V_inv, r = _diag_core(work)
    except CapabilityError:
        if mat.desc.kind != "rational":
            raise
        work = mat.embed(fields.perfect_closure(mat.desc.q))
        lifted = True
        U, D, V, U_inv, V_inv, r = _diag_core(work)
    return DiagForm(U, D, V, U_inv, V_inv, r, lifted)


class TauSubmodule:
    """The left row module spanned by gens inside K{t}^n."""

    __slots__ = ("desc", "n", "gens", "_hermite", "_diag")

    def __init__(self, gens):
        if isinstance(gens, OreMatrix):
            mat = gens
        else:
            raise DomainError("gens must be an OreMatrix")
        self.desc = mat.desc
        self.n = mat.ncols
        self.gens = mat
        self._hermite = None
        self._diag = None

    @classmethod
    def zero(cls, desc, n):
        return cls(OreMatrix.zero(desc, 0, n))

    @classmethod
    def full(cls, desc, n):
        return cls(OreMatrix.identity(desc, n))

    def hermite_form(self):
        if self._hermite is None:
            self._hermite = hermite(self.gens)
        return self._hermite

    def diag_form(self):
        if self._diag is None:
            self._diag = diagonalize(self.gens)
        return self._diag

    def basis(self):
        """The nonzero Hermite rows: a canonical generating set."""
        H, _ = self.hermite_form()
        return OreMatrix(self.desc,
                         [r for r in H.rows
                          if not all(e.is_zero for e in r)],
                         ncols=self.n)

    @property
    def rank(self):
        return self.basis().nrows

    def _reduce(self, vec, want_coeffs):
        H, T = self.hermite_form()
        v = list(vec)
        coeffs = [OrePoly.zero(self.desc)] * H.nrows
        for i in range(H.nrows):
            piv = None
            for j in range(self.n):
                if not H.rows[i][j].is_zero:
                    piv = j
                    break
            if piv is None:
                continue
            e = v[piv]
            if e.is_zero or e.degree < H.rows[i][piv].degree:
                continue
            q, _ = e.left_divmod(H.rows[i][piv])
            if q.is_zero:
                continue
            v = [a - q * b for a, b in zip(v, H.rows[i])]
            coeffs[i] = coeffs[i] + q
        if any(not e.is_zero for e in v):
            return None if want_coeffs else False
        if not want_coeffs:
            return True
        # v = coeffs*H = coeffs*T*gens
        crow = OreMatrix(self.desc, [coeffs])
        return (crow * T).rows[0]

    def contains(self, vec):
        """Is the row vector (list of OrePoly) in the module?"""
        vec = self._check_vec(vec)
        return self._reduce(vec, want_coeffs=False)

    def express(self, vec):
        """Coefficients u with u*gens = vec, or None."""
        vec = self._check_vec(vec)
        return self._reduce(vec, want_coeffs=True)

    def _check_vec(self, vec):
        vec = list(vec)
        if len(vec) != self.n:
            raise DomainError("vector length does not match ambient rank")
        out = []
        for e in vec:
            if isinstance(e, fields.FieldElement):
                e = OrePoly.scalar(e)
            if not isinstance(e, OrePoly) or e.desc != self.desc:
                raise MixedBackends("vector entries must share the backend")
            out.append(e)
        return out

    def contains_module(self, other):
        return all(self.contains(r) for r in other.gens.rows)

    def __eq__(self, other):
        if not isinstance(other, TauSubmodule):
            return NotImplemented
        if self.desc != other.desc or self.n != other.n:
            return False
        return self.contains_module(other) and other.contains_module(self)

    def __hash__(self):
        raise TypeError("modules are compared by membership; not hashable")

    def add(self, other):
        self._match(other)
        return TauSubmodule(self.gens.stack(other.gens))

    def intersect(self, other):
        """Stack the generators; kernel syzygies project to the meet."""
        self._match(other)
        if self.gens.nrows == 0 or other.gens.nrows == 0:
            return TauSubmodule.zero(self.desc, self.n)
        stacked = self.gens.stack(-other.gens)
        ker = left_kernel(stacked)
        m1 = self.gens.nrows
        if ker.nrows == 0:
            return TauSubmodule.zero(self.desc, self.n)
        left = ker.submatrix(range(ker.nrows), range(m1))
        return TauSubmodule(left * self.gens)

    def _match(self, other):
        if not isinstance(other, TauSubmodule):
            raise DomainError("expected a module")
        if other.desc != self.desc:
            raise MixedBackends("modules live over different backends")
        if other.n != self.n:
            raise DomainError("modules live in different ambient ranks")

    def saturate(self):
        """The radical: all v with t^k*v in the module for some k.

        Diagonalize, strip the t-power (inseparable) factor off each
        diagonal entry, and push the separable parts back through the
        coordinate change.  May lift F_q(T) data to the perfect
        closure; the result records this on its diag form.
        """
        dd = self.diag_form()
        desc = dd.desc
        rows = []
        try:
            for i in range(dd.rank):
                d = dd.D.rows[i][i]
                _, sep = d.separable_part()
                vrow = dd.V_inv.rows[i]
                rows.append([sep * e for e in vrow])
        except CapabilityError:
            if desc.kind != "rational":
                raise
            work = fields.perfect_closure(desc.q)
            return TauSubmodule(self.gens.embed(work)).saturate()
        return TauSubmodule(OreMatrix(desc, rows, ncols=self.n))

    def is_saturated(self):
        dd = self.diag_form()
        return all(dd.D.rows[i][i].is_separable for i in range(dd.rank))

    def __repr__(self):
        return (f"<TauSubmodule rank {self.gens.nrows} gens in "
                f"K{{t}}^{self.n} : {self.desc}>")


# --- plain linear algebra over K (commutative), used for tangent data


def k_rref(rows):
    """Reduced row echelon form of FieldElement rows; returns
    (reduced nonzero rows, pivot column indices)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    rank = 0
    for j in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if not rows[i][j].is_zero:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][j].inverse()
        rows[rank] = [inv * e for e in rows[rank]]
        for i in range(len(rows)):
            if i == rank or rows[i][j].is_zero:
                continue
            c = rows[i][j]
            rows[i] = [a - c * b for a, b in zip(rows[i], rows[rank])]
        pivots.append(j)
        rank += 1
    return rows[:rank], pivots


def k_nullspace(rows, ncols, desc):
    """Basis of { x : rows*x = 0 } over the coefficient field."""
    red, pivots = k_rref(rows)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    z, o = fields.zero(desc), fields.one(desc)
    for f in free:
        v = [z] * ncols
        v[f] = o
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def k_rank(rows):
    return len(k_rref(rows)[0])
