"""Maurer-Cartan twists, twisted hom complexes, extensions and splittings.

Objects are pairs (base, eta): a commuting-pair representation together with
a Maurer-Cartan matrix whose entries live in one of two ambients,

* ``forms``    - scalar polynomial forms on the square (hom complexes of the
                 torus cell structure), or
* ``salgebra`` - degree-1 elements of the exterior algebra on two degree-1
                 cocycle generators s1, s2 (the invariant model of the torus).

Morphisms are matrices of scalar square forms subject to the global-section
(conjugation) conditions; the twisted differential is
d f = d_forms f + eta' f - (-1)^{|f|} f eta.

The pipeline `rep_to_mc` peels an upper-triangular pair one diagonal entry at
a time: build the splitting of the next extension (corner polynomial solved
exactly), read off the extension-class cocycle, push it forward along the
isomorphism built so far, and straighten it to a constant-coefficient
representative supported on equal-character entry pairs.  The gauge is fixed
by forbidding constant terms of the straightening chain on equal-character
entries, which pins the same representative the step-by-step hand
computation produces.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .gca import SCALAR_ALGEBRA, AlgebraPresentation, Element
from .qlinalg import Matrix, frac, invert, solve
from .t2forms import Form1, Form2
from .torus_rep import TorusRep, require_valid


class AmbientMismatchError(DomainError):
    pass


class NotACocycleError(DomainError):
    pass


class NotEquivariantError(DomainError):
    pass


class NonConstantCoefficientsError(DomainError):
    pass


class StraighteningFailedError(DomainError):
    """No straightening chain within the polynomial-degree bound."""


class NoGammaAtBoundError(DomainError):
    """No comparison chain between two split extensions was found;
    `classes_differ` is True when the failure certifies a genuine class
    difference at the bound."""

    def __init__(self, message, classes_differ, bound):
        super().__init__(message)
        self.classes_differ = classes_differ
        self.bound = bound


# the ambient exterior algebra on s1, s2 for constant-coefficient twists
S_ALGEBRA = AlgebraPresentation(bound=6)
S_ALGEBRA.add_generator("s1", 1)
S_ALGEBRA.add_generator("s2", 1)
S_ALGEBRA.finalize()

FORMS = "forms"
SALGEBRA = "salgebra"


def s_element(c1, c2) -> Element:
    return (S_ALGEBRA.generator("s1").scale(frac(c1))
            + S_ALGEBRA.generator("s2").scale(frac(c2)))


def s_coefficients(e: Element):
    """Coefficients (c1, c2) of a degree-1 element of the s-algebra."""
    c1 = c2 = Fraction(0)
    for mono, coeff in e.coeffs.items():
        if mono == (1, 0):
            c1 = coeff
        elif mono == (0, 1):
            c2 = coeff
        else:
            raise ValueError("not a degree-1 s-algebra element")
    return c1, c2


# -- matrices of scalar square forms ----------------------------------------

def fm_zero(rows, cols):
    return [[Form2.zero(SCALAR_ALGEBRA) for _ in range(cols)]
            for _ in range(rows)]


def fm_from_matrix(m: Matrix):
    return [[Form2.const(SCALAR_ALGEBRA, SCALAR_ALGEBRA.scalar(m[(i, j)]))
             for j in range(m.cols)] for i in range(m.rows)]


def fm_dt_matrix(m1: Matrix, m2: Matrix):
    """Constant 1-form matrix m1 dt1 + m2 dt2."""
    rows, cols = m1.rows, m1.cols
    out = fm_zero(rows, cols)
    for i in range(rows):
        for j in range(cols):
            out[i][j] = (Form2.monomial(SCALAR_ALGEBRA,
                                        SCALAR_ALGEBRA.scalar(m1[(i, j)]),
                                        mask=1)
                         + Form2.monomial(SCALAR_ALGEBRA,
                                          SCALAR_ALGEBRA.scalar(m2[(i, j)]),
                                          mask=2))
    return out


def fm_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fm_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def fm_neg(a):
    return [[-x for x in row] for row in a]


def fm_scale(a, c):
    return [[x.scale(c) for x in row] for row in a]


def fm_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ValueError("shape mismatch in form-matrix product")
    out = fm_zero(rows, cols)
    for i in range(rows):
        for j in range(cols):
            acc = Form2.zero(SCALAR_ALGEBRA)
            for k in range(inner):
                acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def fm_d(a):
    return [[x.d() for x in row] for row in a]


def fm_is_zero(a):
    return all(x.is_zero() for row in a for x in row)


def fm_eq(a, b):
    return (len(a) == len(b)
            and all(len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb))
                    for ra, rb in zip(a, b)))


def fm_shape(a):
    return len(a), len(a[0]) if a else 0


def fm_restrict(a, i, j):
    return [[x.restrict_edge(i, j) for x in row] for row in a]


def f1m_scalar_mul(m: Matrix, a):
    """Rational matrix times interval-form matrix."""
    rows, cols = m.rows, len(a[0]) if a else 0
    out = [[Form1.zero(SCALAR_ALGEBRA) for _ in range(cols)]
           for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = Form1.zero(SCALAR_ALGEBRA)
            for k in range(m.cols):
                acc = acc + a[k][j].scale(m[(i, k)])
            out[i][j] = acc
    return out


def f1m_mul_scalar(a, m: Matrix):
    rows = len(a)
    out = [[Form1.zero(SCALAR_ALGEBRA) for _ in range(m.cols)]
           for _ in range(rows)]
    for i in range(rows):
        for j in range(m.cols):
            acc = Form1.zero(SCALAR_ALGEBRA)
            for k in range(m.rows):
                acc = acc + a[i][k].scale(m[(k, j)])
            out[i][j] = acc
    return out


def f1m_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def f1m_is_zero(a):
    return all(x.is_zero() for row in a for x in row)


def fm_constant_part(a):
    """The (t-free, dt-free) coefficient matrix, or None if some entry has a
    non-constant 0-form component."""
    rows, cols = fm_shape(a)
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            c = Fraction(0)
            for (mask, e1, e2), coeff in a[i][j].terms.items():
                if mask == 0:
                    if (e1, e2) != (0, 0):
                        return None
                    c = coeff.coeffs.get((), Fraction(0))
            row.append(c)
        out.append(row)
    return Matrix.from_rows(out) if rows and cols else Matrix(rows, cols, [])


def fm_dt_parts(a):
    """Split a constant 1-form matrix into (m1, m2) with a = m1 dt1 + m2 dt2.

    Returns None when any entry has a t-dependent or non-1-form component.
    """
    rows, cols = fm_shape(a)
    m1 = [[Fraction(0)] * cols for _ in range(rows)]
    m2 = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            for (mask, e1, e2), coeff in a[i][j].terms.items():
                if (e1, e2) != (0, 0) or mask not in (1, 2):
                    return None
                c = coeff.coeffs.get((), Fraction(0))
                if mask == 1:
                    m1[i][j] = c
                else:
                    m2[i][j] = c
    return Matrix.from_rows(m1) if rows and cols else Matrix(rows, cols, []), \
        Matrix.from_rows(m2) if rows and cols else Matrix(rows, cols, [])


# -- objects -----------------------------------------------------------------

class MCObject:
    """A semisimple base with a Maurer-Cartan twist.

    `characters` lists the diagonal (g1, g2) scalars when the base is
    diagonal; `base` is the underlying representation.  `eta` is a matrix of
    degree-1 ambient entries (scalar square forms, or s-algebra elements).
    """

    __slots__ = ("ambient", "characters", "base", "eta")

    def __init__(self, ambient, base: TorusRep, eta, characters=None):
        self.ambient = ambient
        self.base = base
        self.eta = eta
        self.characters = characters

    @classmethod
    def semisimple(cls, characters, eta=None, ambient=FORMS):
        characters = [(frac(c1), frac(c2)) for c1, c2 in characters]
        base = TorusRep.diagonal(characters)
        n = len(characters)
        if eta is None:
            eta = (fm_zero(n, n) if ambient == FORMS
                   else [[S_ALGEBRA.zero() for _ in range(n)] for _ in range(n)])
        return cls(ambient, base, eta, characters)

    @classmethod
    def from_rep(cls, rep: TorusRep):
        require_valid(rep)
        return cls(FORMS, rep, fm_zero(rep.dim, rep.dim), None)

    @property
    def dim(self):
        return self.base.dim

    def eta_forms(self):
        """The twist as a matrix of square forms (s1 -> dt1, s2 -> dt2)."""
        if self.ambient == FORMS:
            return self.eta
        n = self.dim
        out = fm_zero(n, n)
        for i in range(n):
            for j in range(n):
                c1, c2 = s_coefficients(self.eta[i][j])
                out[i][j] = (Form2.monomial(SCALAR_ALGEBRA,
                                            SCALAR_ALGEBRA.scalar(c1), mask=1)
                             + Form2.monomial(SCALAR_ALGEBRA,
                                              SCALAR_ALGEBRA.scalar(c2), mask=2))
        return out


def as_object(x) -> MCObject:
    if isinstance(x, MCObject):
        return x
    if isinstance(x, TorusRep):
        return MCObject.from_rep(x)
    raise TypeError(f"expected a representation or MC object, got {x!r}")


def _check_same_ambient(*objs):
    ambients = {o.ambient for o in objs}
    if len(ambients) > 1:
        raise AmbientMismatchError(f"mixed ambients {sorted(ambients)}")


class HomElement:
    """A matrix of scalar square forms with a homological degree."""

    __slots__ = ("entries", "degree")

    def __init__(self, entries, degree: int):
        self.entries = entries
        self.degree = degree

    @classmethod
    def from_matrix(cls, m: Matrix, degree: int = 0):
        return cls(fm_from_matrix(m), degree)

    def shape(self):
        return fm_shape(self.entries)

    def __eq__(self, other):
        return (isinstance(other, HomElement) and self.degree == other.degree
                and fm_eq(self.entries, other.entries))

    def is_zero(self):
        return fm_is_zero(self.entries)


def twisted_d(f: HomElement, source, target) -> HomElement:
    """d f = d_forms f + eta_target · f - (-1)^{|f|} f · eta_source."""
    src = as_object(source)
    dst = as_object(target)
    rows, cols = f.shape()
    if rows != dst.dim or cols != src.dim:
        raise ValueError("hom element shape does not match the endpoints")
    out = fm_d(f.entries)
    eta_t = dst.eta_forms()
    eta_s = src.eta_forms()
    if not fm_is_zero(eta_t):
        out = fm_add(out, fm_mul(eta_t, f.entries))
    if not fm_is_zero(eta_s):
        sign = -1 if f.degree % 2 == 0 else 1
        out = fm_add(out, fm_scale(fm_mul(f.entries, eta_s), sign))
    return HomElement(out, f.degree + 1)


def global_section_defects(f: HomElement, source, target):
    """The two face-compatibility defects of a hom matrix.

    For each edge direction i the twisted restriction (conjugated by the
    crossing generator) must agree with the plain restriction; the returned
    list holds (edge index, defect interval-form matrix) for the failures.
    """
    src = as_object(source)
    dst = as_object(target)
    defects = []
    for i in (1, 2):
        cross = 3 - i
        lhs = f1m_mul_scalar(
            f1m_scalar_mul(dst.base.g(cross), fm_restrict(f.entries, i, 0)),
            src.base.g_inv(cross))
        rhs = fm_restrict(f.entries, i, 1)
        diff = f1m_sub(lhs, rhs)
        if not f1m_is_zero(diff):
            defects.append((i, diff))
    return defects


def is_global_section_hom(f: HomElement, source, target) -> bool:
    return not global_section_defects(f, source, target)


class McReport:
    __slots__ = ("ok", "failures")

    def __init__(self, failures):
        self.failures = list(failures)
        self.ok = not self.failures

    def __repr__(self):
        return f"McReport(ok={self.ok}, failures={self.failures})"


def mc_check(o: MCObject) -> McReport:
    """Verify d(eta) + eta² = 0 and the equivariance of eta."""
    failures = []
    n = o.dim
    if o.ambient == FORMS:
        eta = HomElement(o.eta, 1)
        defect = fm_add(fm_d(o.eta), fm_mul(o.eta, o.eta))
        if not fm_is_zero(defect):
            failures.append("mc_equation")
        if global_section_defects(eta, MCObject.from_rep(o.base),
                                  MCObject.from_rep(o.base)):
            failures.append("equivariance")
    elif o.ambient == SALGEBRA:
        for i in range(n):
            for j in range(n):
                entry = o.eta[i][j]
                if not entry.is_zero():
                    if entry.degree() != 1:
                        failures.append(f"entry_degree[{i}][{j}]")
                    if o.characters[i] != o.characters[j]:
                        failures.append(f"equivariance[{i}][{j}]")
        for i in range(n):
            for j in range(n):
                acc = S_ALGEBRA.zero()
                for k in range(n):
                    acc = acc + o.eta[i][k] * o.eta[k][j]
                if not acc.is_zero():
                    failures.append(f"mc_equation[{i}][{j}]")
    else:
        raise AmbientMismatchError(f"unknown ambient {o.ambient!r}")
    return McReport(failures)


# -- extensions and splittings ------------------------------------------------

class ExtensionData:
    """An extension top -> total -> bottom with a chosen splitting.

    p, q are degree-0 cocycles, alpha, beta degree-0 morphisms with
    alpha·beta = 0, alpha·p = id, q·beta = id, p·alpha + beta·q = id.
    """

    __slots__ = ("top", "bottom", "total", "p", "q", "alpha", "beta")

    def __init__(self, top, bottom, total, p, q, alpha, beta):
        self.top = as_object(top)
        self.bottom = as_object(bottom)
        self.total = as_object(total)
        self.p = p
        self.q = q
        self.alpha = alpha
        self.beta = beta

    def validate(self):
        top, bottom, total = self.top, self.bottom, self.total
        for name, f, src, dst in (("p", self.p, top, total),
                                  ("q", self.q, total, bottom)):
            if not twisted_d(f, src, dst).is_zero():
                raise NotACocycleError(f"{name} is not a cocycle")
            if global_section_defects(f, src, dst):
                raise NotEquivariantError(f"{name} is not a global section")
        for name, f, src, dst in (("alpha", self.alpha, total, top),
                                  ("beta", self.beta, bottom, total)):
            if global_section_defects(f, src, dst):
                raise NotEquivariantError(f"{name} is not a global section")
        ident_top = fm_from_matrix(Matrix.identity(top.dim))
        ident_bot = fm_from_matrix(Matrix.identity(bottom.dim))
        ident_tot = fm_from_matrix(Matrix.identity(total.dim))
        checks = (
            ("alpha·p = id", fm_sub(fm_mul(self.alpha.entries, self.p.entries),
                                    ident_top)),
            ("q·beta = id", fm_sub(fm_mul(self.q.entries, self.beta.entries),
                                   ident_bot)),
            ("alpha·beta = 0", fm_mul(self.alpha.entries, self.beta.entries)),
            ("p·alpha + beta·q = id",
             fm_sub(fm_add(fm_mul(self.p.entries, self.alpha.entries),
                           fm_mul(self.beta.entries, self.q.entries)),
                    ident_tot)),
        )
        for label, defect in checks:
            if not fm_is_zero(defect):
                raise DomainError(f"splitting identity failed: {label}")
        return self


def build_extension(omega: HomElement, top, bottom) -> ExtensionData:
    """The block extension with twist [[eta_top, omega], [0, eta_bottom]].

    omega must be a degree-1 twisted cocycle from bottom to top; p and q are
    the constant inclusion/projection with the obvious block splitting, and
    the extension class of the result is exactly [omega].
    """
    top = as_object(top)
    bottom = as_object(bottom)
    _check_same_ambient(top, bottom)
    if top.ambient != FORMS:
        raise AmbientMismatchError("extensions are built in the forms ambient")
    if omega.degree != 1:
        raise NotACocycleError("omega must have degree 1")
    if not twisted_d(omega, bottom, top).is_zero():
        raise NotACocycleError("omega is not a twisted cocycle")
    if global_section_defects(omega, bottom, top):
        raise NotEquivariantError("omega is not a global section")
    nt, nb = top.dim, bottom.dim
    n = nt + nb
    if top.characters is None or bottom.characters is None:
        raise DomainError("block extensions need semisimple endpoints")
    chars = list(top.characters) + list(bottom.characters)
    eta = fm_zero(n, n)
    for i in range(nt):
        for j in range(nt):
            eta[i][j] = top.eta[i][j]
        for j in range(nb):
            eta[i][nt + j] = omega.entries[i][j]
    for i in range(nb):
        for j in range(nb):
            eta[nt + i][nt + j] = bottom.eta[i][j]
    total = MCObject.semisimple(chars, eta)
    p = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(i == j)) for j in range(nt)] for i in range(n)]))
    q = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(j == nt + i)) for j in range(n)] for i in range(nb)]))
    alpha = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(i == j)) for j in range(n)] for i in range(nt)]))
    beta = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(nt + j == i)) for j in range(nb)] for i in range(n)]))
    return ExtensionData(top, bottom, total, p, q, alpha, beta).validate()


def extension_class(ext: ExtensionData) -> HomElement:
    """The degree-1 cocycle alpha · d(beta) classifying the extension."""
    dbeta = twisted_d(ext.beta, ext.bottom, ext.total)
    cls = HomElement(fm_mul(ext.alpha.entries, dbeta.entries), 1)
    if not twisted_d(cls, ext.bottom, ext.top).is_zero():
        raise NotACocycleError("extension class failed the cocycle check")
    return cls


# -- linear solving over bounded polynomial forms ----------------------------

def _poly_monomials(bound):
    out = []
    for total in range(bound + 1):
        for e1 in range(total, -1, -1):
            out.append((e1, total - e1))
    return out


def _flatten_f2(tag, mat, into, sign=1):
    for p, row in enumerate(mat):
        for q, form in enumerate(row):
            for key, coeff in form.terms.items():
                c = coeff.coeffs.get((), Fraction(0))
                if c:
                    k = (tag, p, q, key)
                    into[k] = into.get(k, Fraction(0)) + sign * c


def _flatten_f1(tag, mat, into, sign=1):
    for p, row in enumerate(mat):
        for q, form in enumerate(row):
            for key, coeff in form.terms.items():
                c = coeff.coeffs.get((), Fraction(0))
                if c:
                    k = (tag, p, q, key)
                    into[k] = into.get(k, Fraction(0)) + sign * c


def _solve_sparse(images, rhs):
    """Solve sum_k x_k · images[k] = rhs over shared sparse coordinates.

    Returns (particular, kernel) or None; the particular solution zeroes all
    free variables (leftmost-pivot reduction, deterministic).
    """
    keys = set(rhs)
    for img in images:
        keys.update(img)
    keys = sorted(keys, key=repr)
    rows = [[img.get(k, Fraction(0)) for img in images] for k in keys]
    b = [rhs.get(k, Fraction(0)) for k in keys]
    if not rows:
        return tuple(Fraction(0) for _ in images), []
    return solve(Matrix.from_rows(rows), b)


class _ChainProblem:
    """Shared assembly for the gamma- and straightening solves.

    Unknowns are elementary degree-0 chains (entry position times t-monomial)
    plus, optionally, constant dt1/dt2 unknowns on selected entries.  Each
    unknown contributes its twisted differential to the main equation and its
    two face-compatibility defects to the constraint block.
    """

    def __init__(self, src: MCObject, dst: MCObject, bound: int):
        self.src = src
        self.dst = dst
        self.bound = bound
        self.vars = []     # ("chain", p, q, (e1, e2)) or ("k", axis, p, q)
        self.images = []

    def _image_of_chain(self, p, q, mono):
        rows, cols = self.dst.dim, self.src.dim
        unit = fm_zero(rows, cols)
        unit[p][q] = Form2.monomial(SCALAR_ALGEBRA, SCALAR_ALGEBRA.scalar(1),
                                    e1=mono[0], e2=mono[1])
        h = HomElement(unit, 0)
        img = {}
        _flatten_f2("eq", twisted_d(h, self.src, self.dst).entries, img)
        for i, diff in global_section_defects(h, self.src, self.dst) or []:
            _flatten_f1(("gs", i), diff, img)
        return unit, img

    def add_chain_vars(self, skip_constant_on=frozenset()):
        for p in range(self.dst.dim):
            for q in range(self.src.dim):
                for mono in _poly_monomials(self.bound):
                    if mono == (0, 0) and (p, q) in skip_constant_on:
                        continue
                    unit, img = self._image_of_chain(p, q, mono)
                    self.vars.append(("chain", p, q, mono, unit))
                    self.images.append(img)

    def add_constant_dt_vars(self, allowed):
        for axis, mask in ((1, 1), (2, 2)):
            for (p, q) in allowed:
                unit = fm_zero(self.dst.dim, self.src.dim)
                unit[p][q] = Form2.monomial(SCALAR_ALGEBRA,
                                            SCALAR_ALGEBRA.scalar(1), mask=mask)
                h = HomElement(unit, 1)
                img = {}
                _flatten_f2("eq", unit, img)
                for i, diff in global_section_defects(
                        h, self.src, self.dst) or []:
                    _flatten_f1(("gs", i), diff, img)
                self.vars.append(("k", axis, p, q, unit))
                self.images.append(img)

    def solve(self, target_entries):
        rhs = {}
        _flatten_f2("eq", target_entries, rhs)
        return _solve_sparse(self.images, rhs)

    def assemble(self, coeffs, kind):
        rows, cols = self.dst.dim, self.src.dim
        out = fm_zero(rows, cols)
        for c, var in zip(coeffs, self.vars):
            if c and var[0] == kind:
                out = fm_add(out, fm_scale(var[-1], c))
        return out


def solve_gamma(delta: HomElement, source, target, bound: int = 4):
    """A degree-0 global-section chain gamma with d(gamma) = delta, or None."""
    src = as_object(source)
    dst = as_object(target)
    problem = _ChainProblem(src, dst, bound)
    problem.add_chain_vars()
    sol = problem.solve(delta.entries)
    if sol is None:
        return None
    coeffs, _ = sol
    return HomElement(problem.assemble(coeffs, "chain"), 0)


def straighten(omega: HomElement, src: MCObject, dst: MCObject,
               bound: int = 4):
    """Write omega = k1·dt1 + k2·dt2 + d(chain) with k supported on
    equal-character entries and the chain free of constant terms there.

    Returns (k1, k2, chain) as (Matrix, Matrix, HomElement).  Raises
    StraighteningFailedError when no such decomposition exists within the
    polynomial-degree bound.
    """
    if dst.characters is None or src.characters is None:
        raise DomainError("straightening needs semisimple endpoints")
    allowed = [(p, q) for p in range(dst.dim) for q in range(src.dim)
               if dst.characters[p] == src.characters[q]]
    problem = _ChainProblem(src, dst, bound)
    problem.add_constant_dt_vars(allowed)
    problem.add_chain_vars(skip_constant_on=frozenset(allowed))
    sol = problem.solve(omega.entries)
    if sol is None:
        raise StraighteningFailedError(
            f"no constant representative within polynomial degree {bound}")
    coeffs, kernel = sol
    coeffs = list(coeffs)
    k_idx = [idx for idx, var in enumerate(problem.vars) if var[0] == "k"]
    # The constant part is unique under the no-constant-term gauge; if a
    # kernel direction nevertheless touches it, reduce the constant
    # coordinates against a reduced echelon basis of the kernel so the
    # representative stays deterministic.
    if any(vec[i] != 0 for vec in kernel for i in k_idx):
        work = [list(v) for v in kernel]
        echelon = []
        for col in k_idx:
            pv = next((v for v in work if v[col] != 0), None)
            if pv is None:
                continue
            work.remove(pv)
            inv = Fraction(1) / pv[col]
            pv = [x * inv for x in pv]
            work = [[x - v[col] * y for x, y in zip(v, pv)] for v in work]
            echelon = [[x - e[col] * y for x, y in zip(e, pv)]
                       for e in echelon]
            echelon.append(pv)
        for pv in echelon:
            col = next(i for i in k_idx if pv[i] != 0)
            if coeffs[col]:
                coeffs = [c - coeffs[col] * y for c, y in zip(coeffs, pv)]
    k1 = [[Fraction(0)] * src.dim for _ in range(dst.dim)]
    k2 = [[Fraction(0)] * src.dim for _ in range(dst.dim)]
    for c, var in zip(coeffs, problem.vars):
        if var[0] == "k" and c:
            _, axis, p, q, _unit = var
            (k1 if axis == 1 else k2)[p][q] = c
    chain = HomElement(problem.assemble(coeffs, "chain"), 0)
    return Matrix.from_rows(k1), Matrix.from_rows(k2), chain


# -- comparing two split extensions of the same pair -------------------------

class ExtensionIsoResult:
    __slots__ = ("map", "gamma")

    def __init__(self, map_, gamma):
        self.map = map_
        self.gamma = gamma


def _objects_equal(a: MCObject, b: MCObject):
    return (a.base.g1 == b.base.g1 and a.base.g2 == b.base.g2
            and fm_eq(a.eta_forms(), b.eta_forms()))


def extension_iso(e1: ExtensionData, e2: ExtensionData,
                  bound: int = 4) -> ExtensionIsoResult:
    """The isomorphism p2·alpha1 + beta2·q1 - p2·gamma·q1 between two
    extensions with the same top and bottom and equal classes.

    gamma solves d(gamma) = alpha2·d(beta2) - alpha1·d(beta1) over chains of
    polynomial degree <= bound (the bound is retried once, two degrees
    higher, before reporting failure with a class-difference certificate).
    """
    if not (_objects_equal(e1.top, e2.top)
            and _objects_equal(e1.bottom, e2.bottom)):
        raise DomainError("extensions do not share their endpoints")
    d1 = fm_mul(e1.alpha.entries,
                twisted_d(e1.beta, e1.bottom, e1.total).entries)
    d2 = fm_mul(e2.alpha.entries,
                twisted_d(e2.beta, e2.bottom, e2.total).entries)
    delta = HomElement(fm_sub(d2, d1), 1)
    gamma = solve_gamma(delta, e1.bottom, e1.top, bound)
    used_bound = bound
    if gamma is None:
        used_bound = bound + 2
        gamma = solve_gamma(delta, e1.bottom, e1.top, used_bound)
    if gamma is None:
        max_poly = max((p1 + p2 for row in delta.entries for form in row
                        for (_m, p1, p2) in form.terms), default=0)
        raise NoGammaAtBoundError(
            "no chain matches the class difference within polynomial degree "
            f"{used_bound}", classes_differ=(max_poly + 1 <= used_bound),
            bound=used_bound)
    iso = fm_sub(fm_add(fm_mul(e2.p.entries, e1.alpha.entries),
                        fm_mul(e2.beta.entries, e1.q.entries)),
                 fm_mul(fm_mul(e2.p.entries, gamma.entries), e1.q.entries))
    result = HomElement(iso, 0)
    if not twisted_d(result, e1.total, e2.total).is_zero():
        raise NotACocycleError("candidate isomorphism is not a cocycle")
    const = fm_constant_part_invertible(result.entries)
    if const is None:
        raise DomainError("candidate isomorphism is not invertible")
    return ExtensionIsoResult(result, gamma)


def fm_constant_part_invertible(a):
    """The 0-form part must be a polynomial matrix with constant nonzero
    determinant for the form matrix to be invertible; returns the constant
    determinant or None."""
    rows, cols = fm_shape(a)
    if rows != cols:
        return None
    poly = [[{} for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            for (mask, e1, e2), coeff in a[i][j].terms.items():
                if mask == 0:
                    poly[i][j][(e1, e2)] = coeff.coeffs.get((), Fraction(0))

    def poly_mul(f, g):
        out = {}
        for (a1, b1), c1 in f.items():
            for (a2, b2), c2 in g.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return {k: v for k, v in out.items() if v != 0}

    def poly_det(mat):
        n = len(mat)
        if n == 0:
            return {(0, 0): Fraction(1)}
        out = {}
        for j in range(n):
            entry = mat[0][j]
            if not entry:
                continue
            minor = [[mat[i][jj] for jj in range(n) if jj != j]
                     for i in range(1, n)]
            sub = poly_mul(entry, poly_det(minor))
            for k, v in sub.items():
                sv = v if j % 2 == 0 else -v
                out[k] = out.get(k, Fraction(0)) + sv
        return {k: v for k, v in out.items() if v != 0}

    d = poly_det(poly)
    if set(d) == {(0, 0)} and d[(0, 0)] != 0:
        return d[(0, 0)]
    return None


# -- realization ---------------------------------------------------------------

class RealizeResult:
    __slots__ = ("rep", "extension")

    def __init__(self, rep, extension):
        self.rep = rep
        self.extension = extension


def realize_rep(top: TorusRep, bottom: TorusRep, f1: Matrix,
                f2: Matrix) -> RealizeResult:
    """The representation with extension class [f1 dt1 + f2 dt2].

    Block matrices [[top.g_i, -top.g_i f_i], [0, bottom.g_i]] with the
    splitting alpha = [id, -(t1 f1 + t2 f2)], beta = [[t1 f1 + t2 f2], [id]].
    Requires the cross equivariance top.g_{3-i} f_i bottom.g_{3-i}^{-1} = f_i.
    """
    require_valid(top)
    require_valid(bottom)
    nt, nb = top.dim, bottom.dim
    if f1.rows != nt or f1.cols != nb or f2.rows != nt or f2.cols != nb:
        raise ValueError("class matrices must map bottom to top")
    for i, f in ((1, f1), (2, f2)):
        cross = 3 - i
        if top.g(cross) * f * bottom.g_inv(cross) != f:
            raise NotEquivariantError(
                f"f{i} is not invariant under the crossing generator g{cross}")
    mats = []
    for i, f in ((1, f1), (2, f2)):
        corner = top.g(i) * f
        rows = []
        for r in range(nt):
            rows.append(list(top.g(i).row(r)) + [-c for c in corner.row(r)])
        for r in range(nb):
            rows.append([Fraction(0)] * nt + list(bottom.g(i).row(r)))
        mats.append(Matrix.from_rows(rows))
    rep = TorusRep(mats[0], mats[1])
    require_valid(rep)
    n = nt + nb
    psi = fm_zero(nt, nb)
    for i in range(nt):
        for j in range(nb):
            psi[i][j] = (Form2.monomial(SCALAR_ALGEBRA,
                                        SCALAR_ALGEBRA.scalar(f1[(i, j)]), e1=1)
                         + Form2.monomial(SCALAR_ALGEBRA,
                                          SCALAR_ALGEBRA.scalar(f2[(i, j)]),
                                          e2=1))
    p = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(i == j)) for j in range(nt)] for i in range(n)]))
    q = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(j == nt + i)) for j in range(n)] for i in range(nb)]))
    alpha_entries = fm_zero(nt, n)
    beta_entries = fm_zero(n, nb)
    for i in range(nt):
        alpha_entries[i][i] = Form2.const(SCALAR_ALGEBRA,
                                          SCALAR_ALGEBRA.scalar(1))
        for j in range(nb):
            alpha_entries[i][nt + j] = -psi[i][j]
            beta_entries[i][j] = psi[i][j]
    for j in range(nb):
        beta_entries[nt + j][j] = Form2.const(SCALAR_ALGEBRA,
                                              SCALAR_ALGEBRA.scalar(1))
    ext = ExtensionData(top, bottom, rep, p, q,
                        HomElement(alpha_entries, 0),
                        HomElement(beta_entries, 0)).validate()
    return RealizeResult(rep, ext)


def _nilpotent_exp(m: Matrix) -> Matrix:
    n = m.rows
    acc = Matrix.identity(n)
    term = Matrix.identity(n)
    fact = 1
    for k in range(1, n + 1):
        term = term * m
        if term.is_zero():
            break
        fact *= k
        acc = acc + term.scale(Fraction(1, fact))
    else:
        if n:
            raise DomainError("twist matrix is not nilpotent")
    return acc


def realize_mc(o: MCObject) -> TorusRep:
    """Realize a constant-coefficient nilpotent MC object as a representation.

    The transport Phi = exp(-t1 F1 - t2 F2) solves d(Phi) = -eta Phi exactly
    (F1, F2 commute by the MC equation), and its face compatibility forces
    g_i = D_i exp(-F_i).  For a single extension step this is the familiar
    two-block realization; on the three-step example it returns the original
    upper-triangular matrices on the nose.
    """
    if o.characters is None:
        raise DomainError("realization needs a semisimple base")
    report = mc_check(o)
    if not report.ok:
        raise DomainError(f"invalid MC object: {report.failures}")
    parts = fm_dt_parts(o.eta_forms())
    if parts is None:
        raise NonConstantCoefficientsError(
            "realization needs constant coefficients")
    m1, m2 = parts
    d1 = Matrix.diagonal([c[0] for c in o.characters])
    d2 = Matrix.diagonal([c[1] for c in o.characters])
    rep = TorusRep(d1 * _nilpotent_exp(m1.scale(-1)),
                   d2 * _nilpotent_exp(m2.scale(-1)))
    require_valid(rep)
    return rep


# -- the representation -> MC pipeline ----------------------------------------

def rep_extension(r: TorusRep, split: int, bound: int = 4) -> ExtensionData:
    """The extension (leading block) -> r -> (trailing block) with an exact
    polynomial splitting.

    The splitting corner psi is taken linear in t when the corner blocks are
    invariant under the crossing generators (the closed form
    psi = -t1·g1_top^{-1}·n1 - t2·g2_top^{-1}·n2); otherwise it is solved for
    over polynomials of degree <= bound.
    """
    require_valid(r)
    n = r.dim
    if not 0 < split < n:
        raise ValueError("split must cut the representation properly")
    for g in (r.g1, r.g2):
        for i in range(split, n):
            for j in range(split):
                if g[(i, j)] != 0:
                    raise DomainError("representation is not block upper "
                                      "triangular at the split")
    sub = lambda g, r0, r1, c0, c1: Matrix.from_rows(
        [[g[(i, j)] for j in range(c0, c1)] for i in range(r0, r1)])
    top = TorusRep(sub(r.g1, 0, split, 0, split), sub(r.g2, 0, split, 0, split))
    bottom = TorusRep(sub(r.g1, split, n, split, n),
                      sub(r.g2, split, n, split, n))
    corners = [sub(r.g1, 0, split, split, n), sub(r.g2, 0, split, split, n)]
    psi = _splitting_corner(top, bottom, corners, bound)
    nt, nb = split, n - split
    p = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(i == j)) for j in range(nt)] for i in range(n)]))
    q = HomElement.from_matrix(Matrix.from_rows(
        [[Fraction(int(j == nt + i)) for j in range(n)] for i in range(nb)]))
    alpha_entries = fm_zero(nt, n)
    beta_entries = fm_zero(n, nb)
    for i in range(nt):
        alpha_entries[i][i] = Form2.const(SCALAR_ALGEBRA,
                                          SCALAR_ALGEBRA.scalar(1))
        for j in range(nb):
            alpha_entries[i][nt + j] = -psi[i][j]
            beta_entries[i][j] = psi[i][j]
    for j in range(nb):
        beta_entries[nt + j][j] = Form2.const(SCALAR_ALGEBRA,
                                              SCALAR_ALGEBRA.scalar(1))
    return ExtensionData(top, bottom, r, p, q, HomElement(alpha_entries, 0),
                         HomElement(beta_entries, 0)).validate()


def _splitting_corner(top: TorusRep, bottom: TorusRep, corners, bound: int):
    """Solve the face-compatibility conditions for the splitting corner."""
    h = []
    fast = True
    for i in (1, 2):
        hi = invert(top.g(i)) * corners[i - 1]
        hi = hi.scale(-1)
        h.append(hi)
    for i in (1, 2):
        cross = 3 - i
        if top.g(cross) * h[i - 1] * bottom.g_inv(cross) != h[i - 1]:
            fast = False
            break
    nt, nb = top.dim, bottom.dim
    if fast:
        psi = fm_zero(nt, nb)
        for i in range(nt):
            for j in range(nb):
                psi[i][j] = (
                    Form2.monomial(SCALAR_ALGEBRA,
                                   SCALAR_ALGEBRA.scalar(h[0][(i, j)]), e1=1)
                    + Form2.monomial(SCALAR_ALGEBRA,
                                     SCALAR_ALGEBRA.scalar(h[1][(i, j)]), e2=1))
        return psi
    # general case: linear solve for a polynomial corner
    monos = _poly_monomials(bound)
    variables = [(p, q, mono) for p in range(nt) for q in range(nb)
                 for mono in monos]
    images = []
    for (p, q, mono) in variables:
        img = {}
        unit = fm_zero(nt, nb)
        unit[p][q] = Form2.monomial(SCALAR_ALGEBRA, SCALAR_ALGEBRA.scalar(1),
                                    e1=mono[0], e2=mono[1])
        for i in (1, 2):
            cross = 3 - i
            lhs = f1m_mul_scalar(
                f1m_scalar_mul(top.g(cross), fm_restrict(unit, i, 0)),
                bottom.g_inv(cross))
            rhs = fm_restrict(unit, i, 1)
            _flatten_f1(("cond", i), f1m_sub(lhs, rhs), img)
        images.append(img)
    rhs_total = {}
    for i in (1, 2):
        cross = 3 - i
        const = f1m_mul_scalar(
            [[Form1.const(SCALAR_ALGEBRA,
                          SCALAR_ALGEBRA.scalar(corners[cross - 1][(p, q)]))
              for q in range(nb)] for p in range(nt)],
            bottom.g_inv(cross))
        _flatten_f1(("cond", i), const, rhs_total, sign=-1)
    sol = _solve_sparse(images, rhs_total)
    if sol is None:
        raise StraighteningFailedError(
            f"no polynomial splitting within degree {bound}")
    coeffs, _ = sol
    psi = fm_zero(nt, nb)
    for c, (p, q, mono) in zip(coeffs, variables):
        if c:
            psi[p][q] = psi[p][q] + Form2.monomial(
                SCALAR_ALGEBRA, SCALAR_ALGEBRA.scalar(c), e1=mono[0],
                e2=mono[1])
    return psi


class RepToMcResult:
    __slots__ = ("mc", "iso", "ssdata")

    def __init__(self, mc, iso, ssdata):
        self.mc = mc
        self.iso = iso
        self.ssdata = ssdata


def rep_to_mc(r: TorusRep, bound: int = 4) -> RepToMcResult:
    """Convert a Q-triangularizable pair to a constant-coefficient MC object.

    Peels the triangularization one diagonal entry at a time: extension
    class of the next stage, pushforward along the isomorphism built so far,
    straightening to the constant representative.  Returns the MC object,
    the isomorphism from the input to it (a degree-0 invertible twisted
    cocycle), and the triangularization data.
    """
    from .torus_rep import semisimplify

    ss = semisimplify(r)
    tri = TorusRep(ss.tri1, ss.tri2)
    chars = ss.characters
    n = r.dim
    if n == 0:
        return RepToMcResult(MCObject.semisimple([]),
                             HomElement(fm_zero(0, 0), 0), ss)
    eta = fm_zero(1, 1)
    phi = HomElement.from_matrix(Matrix.identity(1))
    for m in range(1, n):
        stage = TorusRep(
            Matrix.from_rows([[tri.g1[(i, j)] for j in range(m + 1)]
                              for i in range(m + 1)]),
            Matrix.from_rows([[tri.g2[(i, j)] for j in range(m + 1)]
                              for i in range(m + 1)]))
        ext = rep_extension(stage, m, bound)
        omega = extension_class(ext)
        pushed = HomElement(fm_mul(phi.entries, omega.entries), 1)
        partial = MCObject.semisimple(chars[:m], eta)
        bottom = MCObject.semisimple([chars[m]])
        k1, k2, chain = straighten(pushed, bottom, partial, bound)
        new_eta = fm_zero(m + 1, m + 1)
        for i in range(m):
            for j in range(m):
                new_eta[i][j] = eta[i][j]
            new_eta[i][m] = (
                Form2.monomial(SCALAR_ALGEBRA,
                               SCALAR_ALGEBRA.scalar(k1[(i, 0)]), mask=1)
                + Form2.monomial(SCALAR_ALGEBRA,
                                 SCALAR_ALGEBRA.scalar(k2[(i, 0)]), mask=2))
        eta = new_eta
        # phi_{m+1} = [[phi, chain - phi·psi], [0, 1]]
        psi = [[ext.beta.entries[i][0]] for i in range(m)]
        corner = fm_sub(chain.entries, fm_mul(phi.entries, psi))
        new_phi = fm_zero(m + 1, m + 1)
        for i in range(m):
            for j in range(m):
                new_phi[i][j] = phi.entries[i][j]
            new_phi[i][m] = corner[i][0]
        new_phi[m][m] = Form2.const(SCALAR_ALGEBRA, SCALAR_ALGEBRA.scalar(1))
        phi = HomElement(new_phi, 0)
    mc = MCObject.semisimple(chars, eta)
    report = mc_check(mc)
    if not report.ok:
        raise DomainError(f"pipeline produced an invalid MC object: "
                          f"{report.failures}")
    # compose with the change of basis back to the original coordinates
    binv = invert(ss.basis)
    iso = HomElement(fm_mul(phi.entries, fm_from_matrix(binv)), 0)
    if not twisted_d(iso, MCObject.from_rep(r), mc).is_zero():
        raise NotACocycleError("pipeline isomorphism is not a cocycle")
    if global_section_defects(iso, MCObject.from_rep(r), mc):
        raise NotEquivariantError("pipeline isomorphism is not a global "
                                  "section")
    if fm_constant_part_invertible(iso.entries) is None:
        raise DomainError("pipeline isomorphism is not invertible")
    return RepToMcResult(mc, iso, ss)


def mc_to_s(o: MCObject) -> MCObject:
    """Translate a constant-coefficient forms twist to the s-algebra ambient
    (dt_i -> s_i); the MC equation and equivariance are re-verified."""
    if o.ambient != FORMS:
        raise AmbientMismatchError("mc_to_s expects the forms ambient")
    if o.characters is None:
        raise DomainError("mc_to_s needs a semisimple base")
    parts = fm_dt_parts(o.eta)
    if parts is None:
        raise NonConstantCoefficientsError(
            "twist entries must be constant-coefficient 1-forms")
    m1, m2 = parts
    n = o.dim
    eta = [[s_element(m1[(i, j)], m2[(i, j)]) for j in range(n)]
           for i in range(n)]
    out = MCObject(SALGEBRA, o.base, eta, o.characters)
    report = mc_check(out)
    if not report.ok:
        raise DomainError(f"translated twist fails checks: {report.failures}")
    return out
