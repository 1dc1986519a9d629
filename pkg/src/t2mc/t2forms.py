"""Polynomial differential forms on the square and interval, and the torus
cell structure with twisted face maps.

The square model of the torus has one 0-cell, two edges (sigma1 = {(t1, 0)},
sigma2 = {(0, t2)}) and one square cell tau.  Forms carry coefficients in a
presented graded algebra (use the scalar algebra for plain forms); a term is
a polynomial in t1, t2 times dt-monomial times coefficient, and the
differential includes the internal differential of the coefficient algebra
with the usual Koszul sign.

A local system assigns the value algebra to every cell and records the
twisted face maps d0 (the d1 faces are identities composed with the
substitution).  Global sections are cellular compatible families; the
predicate `is_global_section` checks all face equations, including an
optional character twist carried by the section.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .gca import SCALAR_ALGEBRA, AlgebraPresentation, Element
from .qlinalg import Matrix, frac
from .torus_rep import TorusRep, require_valid


class ParameterZeroError(DomainError):
    pass


class NotLinearOnGeneratorsError(DomainError):
    pass


def _popcount(mask: int) -> int:
    return (mask & 1) + ((mask >> 1) & 1)


class Form1:
    """Polynomial form on the interval: sum of t^e * (dt?) * coefficient."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraPresentation, terms=None):
        self.alg = alg
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                if not coeff.is_zero():
                    self.terms[key] = coeff

    @classmethod
    def zero(cls, alg):
        return cls(alg)

    @classmethod
    def monomial(cls, alg, coeff, e: int = 0, dt: int = 0):
        coeff = alg.coerce(coeff)
        return cls(alg, {(dt, e): coeff})

    @classmethod
    def const(cls, alg, coeff):
        return cls.monomial(alg, coeff)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, Form1) and self.alg is other.alg
                and self.terms == other.terms)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Form1.const(self.alg, self.alg.scalar(other))
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
        return Form1(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return Form1(self.alg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Form1.const(self.alg, self.alg.scalar(other))
        return self + (-other)

    def scale(self, c):
        c = frac(c)
        return Form1(self.alg, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            other = Form1.const(self.alg, other)
        out = {}
        for (dt1, e1), a1 in self.terms.items():
            a1_twisted = None
            for (dt2, e2), a2 in other.terms.items():
                if dt1 and dt2:
                    continue
                left = a1
                if dt2:
                    # dt of the right factor passes the left coefficient
                    if a1_twisted is None:
                        a1_twisted = a1.negate_odd()
                    left = a1_twisted
                prod = left * a2
                if prod.is_zero():
                    continue
                key = (dt1 | dt2, e1 + e2)
                cur = out.get(key)
                out[key] = prod if cur is None else cur + prod
        return Form1(self.alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            return Form1.const(self.alg, other) * self
        return NotImplemented

    def d(self):
        out = Form1.zero(self.alg)
        for (dt, e), a in self.terms.items():
            if dt == 0 and e > 0:
                out = out + Form1(self.alg, {(1, e - 1): a.scale(e)})
            da = self.alg.differential(a)
            if not da.is_zero():
                sign = -1 if dt else 1
                out = out + Form1(self.alg, {(dt, e): da.scale(sign)})
        return out

    def at_endpoint(self, value) -> Element:
        """Substitute t := value and drop dt (face to the 0-cell)."""
        value = frac(value)
        out = self.alg.zero()
        for (dt, e), a in self.terms.items():
            if dt:
                continue
            out = out + a.scale(value ** e)
        return out

    def degrees(self):
        degs = set()
        for (dt, _e), a in self.terms.items():
            for mono in a.coeffs:
                degs.add(dt + self.alg.mono_degree(mono))
        return degs

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (dt, e) in sorted(self.terms):
            a = self.terms[(dt, e)]
            t = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            bits.append(f"{t}{'dt' if dt else ''}({a!r})")
        return " + ".join(bits)


class Form2:
    """Polynomial form on the square: terms (mask, e1, e2) -> coefficient,
    where mask bit 1 is dt1 and bit 2 is dt2."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraPresentation, terms=None):
        self.alg = alg
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                if not coeff.is_zero():
                    self.terms[key] = coeff

    @classmethod
    def zero(cls, alg):
        return cls(alg)

    @classmethod
    def monomial(cls, alg, coeff, e1: int = 0, e2: int = 0, mask: int = 0):
        coeff = alg.coerce(coeff)
        return cls(alg, {(mask, e1, e2): coeff})

    @classmethod
    def const(cls, alg, coeff):
        return cls.monomial(alg, coeff)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, Form2) and self.alg is other.alg
                and self.terms == other.terms)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Form2.const(self.alg, self.alg.scalar(other))
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
        return Form2(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return Form2(self.alg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Form2.const(self.alg, self.alg.scalar(other))
        return self + (-other)

    def scale(self, c):
        c = frac(c)
        return Form2(self.alg, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            other = Form2.const(self.alg, other)
        out = {}
        for (m1, e1, f1), a1 in self.terms.items():
            a1_twisted = None
            for (m2, e2, f2), a2 in other.terms.items():
                if m1 & m2:
                    continue
                left = a1
                if _popcount(m2) % 2:
                    # the right factor's dt passes the left coefficient
                    if a1_twisted is None:
                        a1_twisted = a1.negate_odd()
                    left = a1_twisted
                sign = -1 if (m1 & 2) and (m2 & 1) else 1  # dt2∧dt1 = -dt1∧dt2
                prod = (left * a2).scale(sign)
                if prod.is_zero():
                    continue
                key = (m1 | m2, e1 + e2, f1 + f2)
                cur = out.get(key)
                out[key] = prod if cur is None else cur + prod
        return Form2(self.alg, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Element):
            return Form2.const(self.alg, other) * self
        return NotImplemented

    def d(self):
        """De Rham differential plus the internal coefficient differential:
        d(p·dtμ ⊗ a) = (dp)·dtμ ⊗ a + (-1)^{|dtμ|} p·dtμ ⊗ da."""
        out = Form2.zero(self.alg)
        parts = {}

        def put(key, coeff):
            cur = parts.get(key)
            parts[key] = coeff if cur is None else cur + coeff

        for (mask, e1, e2), a in self.terms.items():
            if e1 > 0 and not (mask & 1):
                put((mask | 1, e1 - 1, e2), a.scale(e1))
            if e2 > 0 and not (mask & 2):
                sign = -1 if mask & 1 else 1
                put((mask | 2, e1, e2 - 1), a.scale(sign * e2))
            da = self.alg.differential(a)
            if not da.is_zero():
                sign = -1 if _popcount(mask) % 2 else 1
                put((mask, e1, e2), da.scale(sign))
        return out + Form2(self.alg, parts)

    def restrict_edge(self, i: int, j: int) -> Form1:
        """Face d_{ij} substitution part: t -> (t, 1-j) for i = 1 and
        (1-j, t) for i = 2; kills the crossing dt and renames the parameter."""
        if i not in (1, 2) or j not in (0, 1):
            raise ValueError("edge index i in {1,2}, vertex index j in {0,1}")
        value = Fraction(1 - j)
        cross_bit = 2 if i == 1 else 1
        out = {}
        for (mask, e1, e2), a in self.terms.items():
            if mask & cross_bit:
                continue
            par_e, cross_e = (e1, e2) if i == 1 else (e2, e1)
            coeff = a.scale(value ** cross_e)
            if coeff.is_zero():
                continue
            key = (1 if mask else 0, par_e)
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
        return Form1(self.alg, out)

    def degrees(self):
        degs = set()
        for (mask, _e1, _e2), a in self.terms.items():
            for mono in a.coeffs:
                degs.add(_popcount(mask) + self.alg.mono_degree(mono))
        return degs

    def degree(self):
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop()

    def poly_degree(self):
        return max((e1 + e2 for (_m, e1, e2) in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms):
            mask, e1, e2 = key
            a = self.terms[key]
            s = ""
            if e1:
                s += "t1" if e1 == 1 else f"t1^{e1}"
            if e2:
                s += "t2" if e2 == 1 else f"t2^{e2}"
            if mask & 1:
                s += "dt1"
            if mask & 2:
                s += "dt2"
            bits.append(f"{s}({a!r})")
        return " + ".join(bits)


def d_rham(x: Form2) -> Form2:
    """The differential on square forms (includes the coefficient
    differential when the coefficient algebra carries one)."""
    return x.d()


def wedge(x: Form2, y: Form2) -> Form2:
    return x * y


def restrict_edge(x: Form2, i: int, j: int) -> Form1:
    return x.restrict_edge(i, j)


# scalar form shorthands
def sq(coeff=1, e1=0, e2=0, mask=0, alg=SCALAR_ALGEBRA) -> Form2:
    return Form2.monomial(alg, alg.scalar(coeff), e1, e2, mask)


def iv(coeff=1, e=0, dt=0, alg=SCALAR_ALGEBRA) -> Form1:
    return Form1.monomial(alg, alg.scalar(coeff), e, dt)


def algebra_map_element(pres: AlgebraPresentation, images: dict, x: Element):
    """Extend a generator-image table multiplicatively to an element.

    Images live in any algebra supporting + and * (Elements, Form1, Form2);
    the unit of the target must be supplied as images['1']."""
    one = images["1"]
    out = one * Fraction(0) if not isinstance(one, Element) else one.scale(0)
    for mono, coeff in x.coeffs.items():
        term = one
        for e, g in zip(mono, pres.generators):
            for _ in range(e):
                term = term * images[g.name]
        out = out + term * coeff
    return out


def build_fiber_algebra(bound: int = 10) -> AlgebraPresentation:
    """The fiber value algebra: generators x, y, z (degree 3, cocycles),
    w (degree 6, cocycle), u (degree 5) with du = y*z."""
    p = AlgebraPresentation(bound=bound)
    p.add_generator("x", 3, (1, 0, 1, 0))
    p.add_generator("y", 3, (0, 1, 0, 1))
    p.add_generator("z", 3, (1, 0, 1, 0))
    p.add_generator("w", 6, (1, 1, 1, 1))
    p.add_generator("u", 5, (1, 1, 1, 1))
    p.set_differential("u", p.generator("y") * p.generator("z"))
    return p.finalize()


class LocalSystemT2:
    """Per-cell value algebras on the torus cell structure with face maps.

    `edge_d0[i]` gives the twisted face sigma_i -> point on generators
    (Elements); `face_d0[i]` gives the twisted face tau -> sigma_i on
    generators (interval forms).  The other faces are identities composed
    with the substitution.  Construction verifies that every face map
    commutes with the differentials on all generators.
    """

    def __init__(self, alg: AlgebraPresentation, params, edge_d0, face_d0):
        self.alg = alg
        self.params = tuple(frac(p) for p in params)
        if any(p == 0 for p in self.params):
            raise ParameterZeroError("parameters a1, b1, a2, b2 must be nonzero")
        self.edge_d0 = edge_d0
        self.face_d0 = face_d0
        self._validate()

    # parameter shorthands: params = (a1, b1, a2, b2)
    def a(self, i):
        return self.params[0 if i == 1 else 2]

    def b(self, i):
        return self.params[1 if i == 1 else 3]

    def _images_for_face(self, i: int, twisted: bool):
        one = Form1.const(self.alg, self.alg.unit())
        images = {"1": one}
        for g in self.alg.generators:
            if twisted:
                images[g.name] = self.face_d0[i][g.name]
            else:
                images[g.name] = Form1.const(self.alg, self.alg.generator(g.name))
        return images

    def apply_face(self, i: int, j: int, form: Form2) -> Form1:
        """The face map d_{ij}: L_tau -> L_sigma_i applied to a square form."""
        images = self._images_for_face(i, twisted=(j == 0))
        out = Form1.zero(self.alg)
        for (mask, e1, e2), a in form.terms.items():
            base = Form2(self.alg, {(mask, e1, e2): self.alg.unit()})
            restricted = base.restrict_edge(i, j)
            if restricted.is_zero():
                continue
            mapped = algebra_map_element(self.alg, images, a)
            out = out + restricted * mapped
        return out

    def apply_edge(self, i: int, j: int, form: Form1) -> Element:
        """The face map d_j: L_sigma_i -> L_pt applied to an interval form."""
        out = self.alg.zero()
        value = Fraction(1 - j)
        images = None
        if j == 0:
            images = {"1": self.alg.unit()}
            images.update({g.name: self.edge_d0[i][g.name]
                           for g in self.alg.generators})
        for (dt, e), a in form.terms.items():
            if dt:
                continue
            coeff = value ** e
            if j == 0:
                out = out + algebra_map_element(self.alg, images, a).scale(coeff)
            else:
                out = out + a.scale(coeff)
        return out

    def _validate(self):
        for i in (1, 2):
            for g in self.alg.generators:
                gen = self.alg.generator(g.name)
                dgen = self.alg.differential(gen)
                lhs = self.apply_face(i, 0, Form2.const(self.alg, dgen))
                rhs = self.apply_face(i, 0, Form2.const(self.alg, gen)).d()
                if lhs != rhs:
                    raise DomainError(
                        f"face d_{i}0 does not commute with d on {g.name}")
                lhs_e = self.apply_edge(i, 0, Form1.const(self.alg, dgen))
                rhs_e = self.alg.differential(
                    self.apply_edge(i, 0, Form1.const(self.alg, gen)))
                if lhs_e != rhs_e:
                    raise DomainError(
                        f"edge d_0 on sigma_{i} does not commute with d "
                        f"on {g.name}")

    def monodromy_of(self, n: int) -> TorusRep:
        """The pair of d0 matrices on the degree-n generator span.

        Generators are listed in reversed declaration order (so that
        sub-representations come first and twists sit strictly above the
        diagonal); raises when a face image leaves the generator span.
        """
        gens = [g for g in self.alg.generators if g.degree == n]
        gens.reverse()
        if not gens:
            return TorusRep.trivial(0)
        index = {}
        for pos, g in enumerate(gens):
            mono = tuple(int(k == g.index) for k in range(self.alg.n_gens))
            index[mono] = pos
        mats = []
        for i in (1, 2):
            rows = [[Fraction(0)] * len(gens) for _ in gens]
            for col, g in enumerate(gens):
                img = self.edge_d0[i][g.name]
                for mono, coeff in img.coeffs.items():
                    if mono not in index:
                        raise NotLinearOnGeneratorsError(
                            f"d_0 on sigma_{i} sends {g.name} outside the "
                            f"degree-{n} generator span")
                    rows[index[mono]][col] = coeff
            mats.append(Matrix.from_rows(rows))
        rep = TorusRep(mats[0], mats[1])
        require_valid(rep)
        return rep


def build_local_system(a1, b1, a2, b2, bound: int = 10) -> LocalSystemT2:
    """The local system on the torus with fiber algebra Λ(x, y, z, w, u).

    Face twists: on sigma_1, d0 scales (x, y, z) by (a1, b1, a1), sends
    w -> a1 b1 (w + x y) and u -> a1 b1 u; on sigma_2, d0 sends
    x -> a2(x + z), scales y, z by (b2, a2) and w, u by a2 b2.  The square
    faces twist by the crossing direction, with
    d_{10}(w) = a2 b2 (w - t y z - dt u) and d_{20}(w) = a1 b1 (w + x y).
    """
    alg = build_fiber_algebra(bound)
    a1, b1, a2, b2 = frac(a1), frac(b1), frac(a2), frac(b2)
    x, y, z = alg.generator("x"), alg.generator("y"), alg.generator("z")
    w, u = alg.generator("w"), alg.generator("u")

    edge_d0 = {
        1: {"x": x.scale(a1), "y": y.scale(b1), "z": z.scale(a1),
            "w": (w + x * y).scale(a1 * b1), "u": u.scale(a1 * b1)},
        2: {"x": (x + z).scale(a2), "y": y.scale(b2), "z": z.scale(a2),
            "w": w.scale(a2 * b2), "u": u.scale(a2 * b2)},
    }

    def c(e):  # constant interval form
        return Form1.const(alg, e)

    face_d0 = {
        1: {"x": c((x + z).scale(a2)), "y": c(y.scale(b2)),
            "z": c(z.scale(a2)), "u": c(u.scale(a2 * b2)),
            "w": (c(w) - Form1.monomial(alg, y * z, e=1)
                  - Form1.monomial(alg, u, dt=1)).scale(a2 * b2)},
        2: {"x": c(x.scale(a1)), "y": c(y.scale(b1)), "z": c(z.scale(a1)),
            "u": c(u.scale(a1 * b1)),
            "w": (c(w) + c(x * y)).scale(a1 * b1)},
    }
    return LocalSystemT2(alg, (a1, b1, a2, b2), edge_d0, face_d0)


class SectionCandidate:
    """A would-be global section: square component plus an optional character
    twist (k, l), meaning the value lies in the system tensored with the
    character acting by a_i^{-k} b_i^{-l}."""

    __slots__ = ("tau", "twist")

    def __init__(self, tau: Form2, twist=(0, 0)):
        self.tau = tau
        self.twist = (int(twist[0]), int(twist[1]))


class SectionReport:
    __slots__ = ("ok", "failures", "edge_values", "point_value")

    def __init__(self, failures, edge_values, point_value):
        self.failures = list(failures)
        self.ok = not self.failures
        self.edge_values = edge_values
        self.point_value = point_value

    def __repr__(self):
        return f"SectionReport(ok={self.ok}, failures={self.failures})"


def is_global_section(ls: LocalSystemT2, s: SectionCandidate) -> SectionReport:
    """Check the cellular compatibility equations for the candidate.

    For each edge the two square faces must agree (the twisted face carries
    the extra character factor), and each edge value must have matching
    endpoints under the twisted and plain vertex faces.
    """
    k, l = s.twist
    failures = []
    edge_values = {}
    for i in (1, 2):
        other = 3 - i
        factor = (ls.a(other) ** (-k)) * (ls.b(other) ** (-l))
        twisted = ls.apply_face(i, 0, s.tau).scale(factor)
        plain = ls.apply_face(i, 1, s.tau)
        if twisted != plain:
            failures.append(
                (f"face_equation_sigma{i}",
                 f"d_{i}0 value {twisted!r} != d_{i}1 value {plain!r}"))
        edge_values[i] = plain
    point_value = None
    for i in (1, 2):
        factor = (ls.a(i) ** (-k)) * (ls.b(i) ** (-l))
        v0 = ls.apply_edge(i, 0, edge_values[i]).scale(factor)
        v1 = ls.apply_edge(i, 1, edge_values[i])
        if v0 != v1:
            failures.append(
                (f"vertex_equation_sigma{i}",
                 f"d_0 value {v0!r} != d_1 value {v1!r}"))
        if point_value is None:
            point_value = v1
        elif v1 != point_value:
            failures.append(("point_mismatch",
                             "edge values disagree at the 0-cell"))
    return SectionReport(failures, edge_values, point_value)


def section_x(ls: LocalSystemT2) -> SectionCandidate:
    """Degree-3 section with square component -x + t2 z, twisted by the
    character dual to the x-line (k, l) = (1, 0)."""
    alg = ls.alg
    tau = (Form2.const(alg, -alg.generator("x"))
           + Form2.monomial(alg, alg.generator("z"), e2=1))
    return SectionCandidate(tau, twist=(1, 0))


def section_w(ls: LocalSystemT2) -> SectionCandidate:
    """Degree-6 section with square component w - t1 x y + t2 dt1 u and
    character twist (1, 1).

    The sign is fixed so that d applied to the square component equals
    dt1 * (x-section) * y - dt1 dt2 u; the overall negative of this section
    is a global section as well.
    """
    alg = ls.alg
    xy = alg.generator("x") * alg.generator("y")
    tau = (Form2.const(alg, alg.generator("w"))
           - Form2.monomial(alg, xy, e1=1)
           + Form2.monomial(alg, alg.generator("u"), e2=1, mask=1))
    return SectionCandidate(tau, twist=(1, 1))


def constant_section(ls: LocalSystemT2, name: str) -> SectionCandidate:
    """The constant section carried by a single generator, twisted by the
    inverse of its own character (y, z and u admit these)."""
    g = ls.alg.generator_spec(name)
    twist = (g.character[0], g.character[1])
    return SectionCandidate(Form2.const(ls.alg, ls.alg.generator(name)), twist)


def local_system_to_text(ls: LocalSystemT2) -> str:
    """Serialize parameters and face tables in the expression syntax."""
    from .qlinalg import frac_str

    lines = [f"params {' '.join(frac_str(p) for p in ls.params)}"]
    for i in (1, 2):
        for g in ls.alg.generators:
            lines.append(f"edge{i} {g.name} = {_element_expr(ls.alg, ls.edge_d0[i][g.name])}")
    for i in (1, 2):
        for g in ls.alg.generators:
            lines.append(f"face{i} {g.name} = {_form1_expr(ls.alg, ls.face_d0[i][g.name])}")
    return "\n".join(lines) + "\n"


def _element_expr(alg, x: Element) -> str:
    return alg.element_str(x).replace(" ", "")


def _form1_expr(alg, f: Form1) -> str:
    if f.is_zero():
        return "0"
    bits = []
    for (dt, e) in sorted(f.terms):
        a = f.terms[(dt, e)]
        head = ""
        if e:
            head += "t*" if e == 1 else f"t^{e}*"
        if dt:
            head += "dt*"
        body = _element_expr(alg, a)
        if "+" in body or "-" in body[1:]:
            body = f"({body})"
        bits.append(f"{head}{body}")
    return "+".join(bits).replace("+-", "-")


def parse_local_system(text: str, bound: int = 10) -> LocalSystemT2:
    """Parse the `local_system_to_text` format back into a local system.

    Face-map expressions use the generator names plus t and dt; the fiber
    algebra is the standard one."""
    from .expr import parse_expression

    alg = build_fiber_algebra(bound)
    params = None
    edge_d0 = {1: {}, 2: {}}
    face_d0 = {1: {}, 2: {}}
    env_elem = {g.name: alg.generator(g.name) for g in alg.generators}
    env_form = {g.name: Form1.const(alg, alg.generator(g.name))
                for g in alg.generators}
    env_form["t"] = Form1.monomial(alg, alg.unit(), e=1)
    env_form["dt"] = Form1.monomial(alg, alg.unit(), dt=1)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("params"):
            params = [frac(tok) for tok in line.split()[1:]]
            if len(params) != 4:
                raise ValueError("params line needs a1 b1 a2 b2")
            for env in (env_elem, env_form):
                env.update(zip(("a1", "b1", "a2", "b2"), params))
            continue
        if params is None:
            raise ValueError("params line must come first")
        head, _, expr = line.partition("=")
        kind, name = head.split()
        if kind.startswith("edge"):
            i = int(kind[4:])
            edge_d0[i][name] = parse_expression(expr, env_elem, alg.zero())
        elif kind.startswith("face"):
            i = int(kind[4:])
            face_d0[i][name] = parse_expression(expr, env_form,
                                                Form1.zero(alg))
        else:
            raise ValueError(f"bad local-system line {raw!r}")
    if params is None:
        raise ValueError("missing params line")
    return LocalSystemT2(alg, params, edge_d0, face_d0)
