"""Zariski-closed F_q-linear subgroups of affine n-space and their maps.

A subset V of Kbar^n cut out by F_q-linear polynomials corresponds to
the left row module M(V) in K{t}^n of all vanishing forms; V is
recovered as the common zero set.  Every such V splits, after a
unimodular change of coordinates, as a product of a full affine part
and a finite part: the coordinate matrix W and the separable diagonal
entries returned by the normal form encode exactly that splitting.
"""

from __future__ import annotations

from . import fields
from .errors import (
    CapabilityError,
    DomainError,
    MixedBackends,
    NotAMorphismInto,
    NotASubvariety,
)
from .linalg import OreMatrix, TauSubmodule, k_nullspace, k_rank, left_kernel
from .ore import OrePoly

_POINT_LIMIT = 1 << 20


class QVariety:
    """A Zariski-closed F_q-subspace of Kbar^n.

    Stored as its vanishing module (always saturated) plus the
    diagonal splitting: x in V exactly when x = W(y) with y_i in
    ker(sep_i) for i < len(seps) and y_i free afterwards.
    """

    __slots__ = ("n", "module", "lifted", "seps", "W", "W_inv")

    def __init__(self, module, lifted=False):
        if not isinstance(module, TauSubmodule):
            raise DomainError("a variety is built from its vanishing module")
        self.n = module.n
        self.module = module
        dd = module.diag_form()
        self.lifted = lifted or dd.lifted
        order = sorted(range(dd.rank),
                       key=lambda i: dd.D.rows[i][i].sort_key())
        seps = []
        for i in order:
            d = dd.D.rows[i][i]
            if not d.is_separable:
                raise DomainError(
                    "vanishing module must be saturated; call zeros()")
            seps.append(d.monic())
        self.seps = seps
        perm = order + list(range(dd.rank, self.n))
        V, V_inv = dd.V, dd.V_inv
        self.W = OreMatrix(V.desc,
                           [[V.rows[i][perm[j]] for j in range(self.n)]
                            for i in range(self.n)],
                           ncols=self.n)
        self.W_inv = OreMatrix(V.desc, [V_inv.rows[i] for i in perm],
                               ncols=self.n)

    @property
    def desc(self):
        return self.module.desc

    @property
    def rank(self):
        """Number of pinned coordinates (the rank of the module)."""
        return len(self.seps)

    @property
    def dimension(self):
        return self.n - len(self.seps)

    @property
    def finite_part_dim(self):
        """F_q-dimension of the finite (torsion) factor."""
        return sum(s.degree for s in self.seps)

    @property
    def is_irreducible(self):
        """True when the finite factor is trivial: V is a product of
        copies of Kbar, connected through 0."""
        return self.finite_part_dim == 0

    def irreducible_component(self):
        """The component through 0: pin every split coordinate to 0."""
        desc = self.desc
        rows = [self.W_inv.rows[i] for i in range(len(self.seps))]
        mod = TauSubmodule(OreMatrix(desc, rows, ncols=self.n))
        return QVariety(mod.saturate(), lifted=self.lifted)

    def contains_point(self, xs):
        xs = self._coerce_point(xs)
        tgt = xs[0].desc if xs else self.desc
        work = _working_desc(self.desc, tgt)
        xs = [_embed_el(x, work) for x in xs]
        for row in self.module.gens.rows:
            acc = None
            for e, x in zip(row, xs):
                v = e.evaluate(x)
                acc = v if acc is None else acc + v
            if acc is not None and not acc.is_zero:
                return False
        return True

    def _coerce_point(self, xs):
        xs = list(xs)
        if len(xs) != self.n:
            raise DomainError("point length does not match ambient rank")
        descs = {x.desc for x in xs if isinstance(x, fields.FieldElement)}
        if len(descs) > 1:
            raise MixedBackends("point coordinates must share one backend")
        tgt = descs.pop() if descs else self.desc
        return [x if isinstance(x, fields.FieldElement)
                else fields.from_int(tgt, x) for x in xs]

    def contains_variety(self, other):
        if self.n != other.n:
            return False
        a, b = _common_modules(self, other)
        return b.contains_module(a)

    def __eq__(self, other):
        if not isinstance(other, QVariety):
            return NotImplemented
        if self.n != other.n:
            return False
        a, b = _common_modules(self, other)
        return a == b

    def __hash__(self):
        raise TypeError("varieties are compared by membership; not hashable")

    def tangent_space(self):
        """Basis of the kernel of the linearized equations at 0."""
        basis_rows = self.module.basis()
        lin = [[e.linear_part for e in r] for r in basis_rows.rows]
        return k_nullspace(lin, self.n, self.desc)

    def tangent_dimension(self):
        return len(self.tangent_space())

    def points_in_extension(self, m):
        """Every point with coordinates in the degree-m extension."""
        desc = self.desc
        if not desc.is_finite:
            raise CapabilityError(
                "point enumeration requires a finite backend")
        target = fields.extension_of(desc, m)
        axes = []
        total = 1
        for s in self.seps:
            basis = s.kernel_in_extension(m)
            axes.append(_fq_span(basis, target))
            total *= len(axes[-1])
        free_axis = _all_elements(target)
        total *= len(free_axis) ** self.dimension
        if total > _POINT_LIMIT:
            raise CapabilityError(
                f"point set of size {total} exceeds the enumeration limit")
        for _ in range(self.dimension):
            axes.append(free_axis)
        W = self.W.embed(target)
        pts = [tuple(W.apply(list(y)))
               for y in _product(axes, self.n)]
        pts.sort(key=lambda p: tuple(x.sort_key() for x in p))
        return pts

    def finite_part_points(self, max_ext=64):
        """(m, points): the full torsion factor over its splitting field."""
        desc = self.desc
        if not desc.is_finite:
            raise CapabilityError(
                "point enumeration requires a finite backend")
        m0 = desc.degree_over_fq
        if self.finite_part_dim == 0:
            zero_pt = tuple(fields.zero(desc) for _ in range(self.n))
            return m0, [zero_pt]
        M = m0
        for s in self.seps:
            m_i, _ = s.split_kernel(max_ext)
            M = _lcm(M, m_i)
        target = fields.extension_of(desc, M)
        axes = []
        total = 1
        for s in self.seps:
            basis = s.kernel_in_extension(M)
            axes.append(_fq_span(basis, target))
            total *= len(axes[-1])
        if total > _POINT_LIMIT:
            raise CapabilityError(
                f"torsion point set of size {total} exceeds the limit")
        zero = fields.zero(target)
        for _ in range(self.dimension):
            axes.append([zero])
        W = self.W.embed(target)
        pts = [tuple(W.apply(list(y)))
               for y in _product(axes, self.n)]
        pts.sort(key=lambda p: tuple(x.sort_key() for x in p))
        return M, pts

    def __repr__(self):
        return (f"<QVariety dim {self.dimension} + finite q^"
                f"{self.finite_part_dim} in Kbar^{self.n} : {self.desc}>")


def zeros(gens):
    """The variety cut out by the rows of gens (module or matrix)."""
    if isinstance(gens, OreMatrix):
        gens = TauSubmodule(gens)
    if not isinstance(gens, TauSubmodule):
        raise DomainError("zeros expects a matrix or module of forms")
    sat = gens.saturate()
    lifted = sat.desc != gens.desc or gens.diag_form().lifted
    return QVariety(sat, lifted=lifted)


def full_space(desc, n):
    return QVariety(TauSubmodule.zero(desc, n))


def origin(desc, n):
    return QVariety(TauSubmodule.full(desc, n))


def annihilator_of_points(desc, points, n):
    """The module of all forms vanishing on the given points.

    Each point contributes the forms cutting out its F_q-line; the
    result is the intersection over all points.
    """
    mod = TauSubmodule.full(desc, n)
    for pt in points:
        pt = list(pt)
        if len(pt) != n:
            raise DomainError("point length does not match ambient rank")
        for x in pt:
            if x.desc != desc:
                raise MixedBackends("point does not live over the backend")
        if all(x.is_zero for x in pt):
            continue
        piv = next(i for i, x in enumerate(pt) if not x.is_zero)
        vp = pt[piv]
        rows = []
        z = OrePoly.zero(desc)
        for j in range(n):
            if j == piv:
                continue
            row = [z] * n
            row[j] = OrePoly.one(desc)
            row[piv] = OrePoly.scalar(-(pt[j] / vp))
            rows.append(row)
        row = [z] * n
        q = desc.q
        row[piv] = OrePoly.tau(desc) - OrePoly.scalar(vp ** (q - 1))
        rows.append(row)
        mod = mod.intersect(TauSubmodule(OreMatrix(desc, rows, ncols=n)))
    return mod


def variety_from_points(desc, points, n):
    """The smallest closed F_q-subspace containing the points."""
    return zeros(annihilator_of_points(desc, points, n))


class Morphism:
    """An F_q-linear map between varieties, given by a matrix of forms.

    The matrix has one row per target coordinate; certification checks
    that every vanishing form of the codomain pulls back into the
    vanishing module of the domain.
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain, codomain, matrix, check=True):
        if matrix.ncols != domain.n or matrix.nrows != codomain.n:
            raise DomainError("matrix shape does not match the two varieties")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        if check:
            self._certify()

    def _certify(self):
        work = _working_desc(self.domain.desc, self.matrix.desc,
                             self.codomain.desc)
        L = self.matrix.embed(work)
        dom = _module_over(self.domain.module, work)
        cod = _module_over(self.codomain.module, work)
        for g in cod.gens.rows:
            pulled = (OreMatrix(work, [g], ncols=cod.n) * L).rows[0]
            if not dom.contains(pulled):
                raise NotAMorphismInto(
                    "the map does not send the domain into the codomain")

    @classmethod
    def identity(cls, V):
        return cls(V, V, OreMatrix.identity(V.desc, V.n), check=False)

    def __call__(self, xs):
        xs = self.domain._coerce_point(xs)
        if not self.domain.contains_point(xs):
            raise DomainError("point does not lie on the domain")
        tgt = xs[0].desc if xs else self.domain.desc
        work = _working_desc(tgt, self.matrix.desc)
        xs = [_embed_el(x, work) for x in xs]
        return self.matrix.embed(work).apply(xs)

    def compose(self, other):
        """self after other."""
        if other.codomain is not self.domain \
                and other.codomain != self.domain:
            raise DomainError("composition needs matching middle variety")
        work = _working_desc(self.matrix.desc, other.matrix.desc)
        mat = self.matrix.embed(work) * other.matrix.embed(work)
        return Morphism(other.domain, self.codomain, mat, check=False)

    def differential(self):
        """The matrix of t^0 coefficients: the tangent map at 0."""
        return [[e.linear_part for e in r] for r in self.matrix.rows]

    def is_separable(self):
        """The tangent map on T(domain) has rank equal to the image
        dimension."""
        tang = self.domain.tangent_space()
        d = self.differential()
        work = _working_desc(self.domain.desc, self.matrix.desc)
        imgs = []
        for v in tang:
            w = []
            for row in d:
                acc = fields.zero(work)
                for c, x in zip(row, v):
                    acc = acc + _embed_el(c, work) * _embed_el(x, work)
                w.append(acc)
            imgs.append(w)
        return k_rank(imgs) == self.image().dimension

    def image(self):
        """The closure of the set-theoretic image, as a variety.

        The free factor's forms are the left kernel of the composed
        matrix; the finite factor is enumerated pointwise, which can
        move the result into a splitting extension.
        """
        V = self.domain
        work = _working_desc(V.desc, self.matrix.desc)
        L = self.matrix.embed(work)
        W = V.W.embed(work)
        B = L * W
        r = V.rank
        k = self.codomain.n
        B_free = B.submatrix(range(k), range(r, V.n))
        free_var = zeros(TauSubmodule(left_kernel(B_free)))
        if V.finite_part_dim == 0:
            return free_var
        M, pts = V.finite_part_points()
        M = _lcm(M, work.degree_over_fq)
        target = fields.extension_of(work, M)
        pts = [tuple(_embed_el(x, target) for x in p) for p in pts]
        Lt = self.matrix.embed(target)
        imgs = [tuple(Lt.apply(list(p))) for p in pts]
        if all(all(x.is_zero for x in p) for p in imgs):
            return free_var
        fin_mod = annihilator_of_points(target, imgs, k)
        free_gens = free_var.module.gens.embed(target)
        meet = TauSubmodule(free_gens).intersect(fin_mod)
        return zeros(meet)

    def kernel(self):
        """The subvariety of the domain mapping to 0."""
        V = self.domain
        work = _working_desc(V.desc, self.matrix.desc)
        L = self.matrix.embed(work)
        mod = _module_over(V.module, work).add(TauSubmodule(L))
        return zeros(mod)

    def preimage(self, Z):
        """The subvariety of the domain mapping into Z."""
        if Z.n != self.codomain.n:
            raise DomainError("preimage target lives in the wrong space")
        V = self.domain
        work = _working_desc(V.desc, self.matrix.desc, Z.desc)
        L = self.matrix.embed(work)
        pulled = _module_over(Z.module, work).gens * L
        mod = _module_over(V.module, work).add(TauSubmodule(pulled))
        return zeros(mod)

    def __repr__(self):
        return (f"<Morphism Kbar^{self.domain.n} -> Kbar^{self.codomain.n}"
                f" : {self.matrix.desc}>")


def sum_varieties(a, b):
    """Closure of the pointwise sum: meet of the vanishing modules."""
    ma, mb = _common_modules(a, b)
    return zeros(ma.intersect(mb))


def intersect_varieties(a, b):
    ma, mb = _common_modules(a, b)
    return zeros(ma.add(mb))


def product_variety(a, b):
    """The product variety inside Kbar^(a.n + b.n)."""
    ma, mb = _common_modules(a, b)
    work = ma.desc
    z = OrePoly.zero(work)
    rows = [list(r) + [z] * b.n for r in ma.gens.rows]
    rows += [[z] * a.n + list(r) for r in mb.gens.rows]
    return zeros(OreMatrix(work, rows, ncols=a.n + b.n))


def quotient(V, U):
    """(Q, pi): the quotient variety V/U and its projection.

    U must be a subvariety of V.  The projection's coordinates are the
    reduced generators of U's vanishing module, so a point maps to 0
    exactly when it lies on U.
    """
    if not V.contains_variety(U):
        raise NotASubvariety("quotient requires a subvariety")
    ua, va = _common_modules(U, V)
    desc = ua.desc
    basis = ua.basis()
    if basis.nrows == 0:
        # U is the whole space: the quotient collapses to a point
        basis = OreMatrix.zero(desc, 1, V.n)
    if desc != V.desc:
        Vw = QVariety(va, lifted=True)
    else:
        Vw = V
    ambient = full_space(desc, basis.nrows)
    pi = Morphism(Vw, ambient, basis, check=False)
    Q = pi.image()
    pi = Morphism(Vw, Q, basis.embed(Q.desc) if Q.desc != desc else basis)
    return Q, pi


def induced_on_quotient(phi, piV, piW):
    """Fill in the square: the map on quotients taking piV(x) to
    piW(phi(x)), when the square can commute."""
    work = _working_desc(phi.matrix.desc, piV.matrix.desc, piW.matrix.desc)
    top = piW.matrix.embed(work) * phi.matrix.embed(work)
    gens = piV.matrix.embed(work).stack(
        _module_over(piV.domain.module, work).gens)
    helper = TauSubmodule(gens)
    rows = []
    s = piV.matrix.nrows
    for g in top.rows:
        coeffs = helper.express(g)
        if coeffs is None:
            raise DomainError("the map does not descend to the quotients")
        rows.append(coeffs[:s])
    mat = OreMatrix(work, rows, ncols=s)
    return Morphism(piV.codomain, piW.codomain, mat)


# --- helpers


def _lcm(a, b):
    g, x = a, b
    while x:
        g, x = x, g % x
    return a // g * b


def _embed_el(x, desc):
    return x if x.desc == desc else fields.embed(x, desc)


def _working_desc(*descs):
    """A backend every argument embeds into, preferring to stay put."""
    uniq = []
    for d in descs:
        if d not in uniq:
            uniq.append(d)
    if len(uniq) == 1:
        return uniq[0]
    q = uniq[0].q
    if any(d.q != q for d in uniq):
        raise MixedBackends("backends disagree on the base field")
    kinds = {d.kind for d in uniq}
    if kinds <= {"prime", "ext"}:
        m = 1
        for d in uniq:
            m = _lcm(m, d.degree_over_fq)
        return fields.extension_of(uniq[0], m)
    if kinds <= {"prime", "rational", "perfect"}:
        if "perfect" in kinds:
            return fields.perfect_closure(q)
        return fields.rational_function_field(q)
    raise MixedBackends(
        "finite extensions and function fields do not mix")


def _module_over(mod, desc):
    if mod.desc == desc:
        return mod
    return TauSubmodule(mod.gens.embed(desc))


def _common_modules(a, b):
    work = _working_desc(a.desc, b.desc)
    return _module_over(a.module, work), _module_over(b.module, work)


def _fq_span(basis, desc):
    """All F_q-combinations of the basis vectors (elements of desc)."""
    q = desc.q
    out = [fields.zero(desc)]
    for b in basis:
        mult = [fields.from_fq_code(desc, code) * b for code in range(q)]
        out = [x + m for m in mult for x in out]
    return out


def _all_elements(desc):
    size = desc.q ** desc.degree_over_fq
    return [fields.FieldElement(desc, c) for c in range(size)]


def _product(axes, n):
    if len(axes) != n:
        raise DomainError("axis count mismatch")
    if n == 0:
        yield ()
        return
    idx = [0] * n
    while True:
        yield tuple(axes[i][idx[i]] for i in range(n))
        j = n - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < len(axes[j]):
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            return
