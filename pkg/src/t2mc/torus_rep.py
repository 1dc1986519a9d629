"""Finite-dimensional representations of Z x Z over Q.

A representation is a commuting pair of invertible rational matrices (the
images of the two generators g1, g2).  The module provides simultaneous
triangularization over Q (semi-simplification), hom/tensor/dual
constructions, the 3-term cellular cochain complex of the torus computing
H*(T^2, V), and an exact isomorphism test with a certified negative answer.
"""

from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction
from math import gcd, lcm

from .cochain import TwistedComplex
from .errors import DomainError, ParseError
from .qlinalg import Matrix, det, frac, frac_str, invert, rank_kernel, solve


class NonCommutingError(DomainError):
    pass


class SingularError(DomainError):
    pass


class IrrationalSpectrumError(DomainError):
    """No rational eigenvalue at some triangularization stage."""


class TorusRep:
    """A pair of commuting invertible matrices acting on Q^dim."""

    __slots__ = ("dim", "g1", "g2")

    def __init__(self, g1: Matrix, g2: Matrix):
        if g1.rows != g1.cols or g2.rows != g2.cols or g1.rows != g2.rows:
            raise ValueError("generator matrices must be square of equal size")
        self.dim = g1.rows
        self.g1 = g1
        self.g2 = g2

    @classmethod
    def from_rows(cls, rows1, rows2) -> "TorusRep":
        return cls(Matrix.from_rows(rows1), Matrix.from_rows(rows2))

    @classmethod
    def trivial(cls, dim: int = 1) -> "TorusRep":
        return cls(Matrix.identity(dim), Matrix.identity(dim))

    @classmethod
    def character(cls, c1, c2) -> "TorusRep":
        return cls(Matrix.diagonal([c1]), Matrix.diagonal([c2]))

    @classmethod
    def diagonal(cls, characters) -> "TorusRep":
        """Semisimple rep from a list of (g1-scalar, g2-scalar) pairs."""
        return cls(Matrix.diagonal([c[0] for c in characters]),
                   Matrix.diagonal([c[1] for c in characters]))

    def g(self, i: int) -> Matrix:
        if i == 1:
            return self.g1
        if i == 2:
            return self.g2
        raise ValueError("generator index must be 1 or 2")

    def g_inv(self, i: int) -> Matrix:
        inv = invert(self.g(i))
        if inv is None:
            raise SingularError(f"g{i} is singular")
        return inv

    def __eq__(self, other):
        return (isinstance(other, TorusRep) and self.g1 == other.g1
                and self.g2 == other.g2)

    def __repr__(self):
        return f"TorusRep(dim={self.dim}, g1={self.g1!r}, g2={self.g2!r})"

    def conjugate(self, p: Matrix) -> "TorusRep":
        """The rep p^{-1} g p in the new basis given by the columns of p."""
        pinv = invert(p)
        if pinv is None:
            raise ValueError("change of basis must be invertible")
        return TorusRep(pinv * self.g1 * p, pinv * self.g2 * p)


class ValidationReport:
    __slots__ = ("ok", "problems")

    def __init__(self, problems):
        self.problems = list(problems)
        self.ok = not self.problems

    def __repr__(self):
        return f"ValidationReport(ok={self.ok}, problems={self.problems})"


def validate(r: TorusRep) -> ValidationReport:
    """Check commutativity and invertibility of the generator pair."""
    problems = []
    if r.g1 * r.g2 != r.g2 * r.g1:
        problems.append("non_commuting")
    if det(r.g1) == 0:
        problems.append("singular_g1")
    if det(r.g2) == 0:
        problems.append("singular_g2")
    return ValidationReport(problems)


def require_valid(r: TorusRep):
    report = validate(r)
    if "non_commuting" in report.problems:
        raise NonCommutingError("generator matrices do not commute")
    if not report.ok:
        raise SingularError("generator matrix is singular")


# -- characteristic polynomial and rational roots ---------------------------

def char_poly(m: Matrix):
    """Coefficients of det(xI - m), ascending, computed by interpolation."""
    n = m.rows
    points = [Fraction(k) for k in range(n + 1)]
    values = [det(Matrix.diagonal([x] * n) - m) for x in points]
    vand = Matrix.from_rows([[x ** j for j in range(n + 1)] for x in points])
    sol = solve(vand, values)
    coeffs = list(sol[0])
    return coeffs


def rational_roots(coeffs):
    """All rational roots of the polynomial (ascending coefficients), sorted."""
    coeffs = [frac(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    roots = set()
    # strip powers of x
    k = 0
    while coeffs[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
        coeffs = coeffs[k:]
    if len(coeffs) > 1:
        mult = lcm(*[c.denominator for c in coeffs])
        ints = [int(c * mult) for c in coeffs]
        a0, an = abs(ints[0]), abs(ints[-1])

        def divisors(v):
            out = []
            d = 1
            while d * d <= v:
                if v % d == 0:
                    out.append(d)
                    out.append(v // d)
                d += 1
            return sorted(set(out))

        for p in divisors(a0):
            for q in divisors(an):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    acc = Fraction(0)
                    for c in reversed(ints):
                        acc = acc * cand + c
                    if acc == 0:
                        roots.add(cand)
    return sorted(roots)


# -- semi-simplification -----------------------------------------------------

class SemiSimpleData:
    """Simultaneous triangularization data.

    `characters` lists the diagonal (g1-scalar, g2-scalar) pairs in filtration
    order (sub first), `n1`/`n2` are the strictly upper parts, `basis` the
    change-of-basis matrix with basis^-1 · g_i · basis = diag + n_i, and
    `tri1`/`tri2` the full triangular matrices.
    """

    __slots__ = ("characters", "n1", "n2", "basis", "tri1", "tri2")

    def __init__(self, characters, n1, n2, basis, tri1, tri2):
        self.characters = characters
        self.n1 = n1
        self.n2 = n2
        self.basis = basis
        self.tri1 = tri1
        self.tri2 = tri2


def _primitive(vec):
    vec = [frac(v) for v in vec]
    denl = lcm(*[v.denominator for v in vec]) if vec else 1
    ints = [int(v * denl) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g:
        ints = [v // g for v in ints]
    for v in ints:
        if v != 0:
            if v < 0:
                ints = [-w for w in ints]
            break
    return [Fraction(v) for v in ints]


def _common_eigenvector(a1: Matrix, a2: Matrix):
    """A common eigenvector with rational eigenvalues, deterministically.

    Scans the rational eigenvalues of a1 in ascending order; inside each
    eigenspace (which a2 preserves) takes the smallest rational eigenvalue of
    the restriction of a2.  Returns (vector, lam1, lam2) or None.
    """
    n = a1.rows
    for lam1 in rational_roots(char_poly(a1)):
        _, e_basis = rank_kernel(a1 - Matrix.diagonal([lam1] * n))
        if not e_basis:
            continue
        emat = Matrix.from_rows([[v[i] for v in e_basis] for i in range(n)])
        cols = []
        ok = True
        for v in e_basis:
            img = a2.apply(v)
            sol = solve(emat, img)
            if sol is None:
                ok = False
                break
            cols.append(sol[0])
        if not ok:
            continue
        m = len(e_basis)
        b = Matrix.from_rows([[cols[j][i] for j in range(m)] for i in range(m)])
        broots = rational_roots(char_poly(b))
        if not broots:
            continue
        lam2 = broots[0]
        _, w_basis = rank_kernel(b - Matrix.diagonal([lam2] * m))
        w = w_basis[0]
        vec = [sum((e_basis[j][i] * w[j] for j in range(m)), Fraction(0))
               for i in range(n)]
        return _primitive(vec), lam1, lam2
    return None


def _complete_basis(vec, n):
    cols = [list(vec)]
    for i in range(n):
        cand = [Fraction(int(j == i)) for j in range(n)]
        test = Matrix.from_rows(
            [[c[k] for c in cols + [cand]] for k in range(n)])
        rank, _ = rank_kernel(test)
        if rank == len(cols) + 1:
            cols.append(cand)
        if len(cols) == n:
            break
    return Matrix.from_rows([[c[k] for c in cols] for k in range(n)])


def semisimplify(r: TorusRep) -> SemiSimpleData:
    """Simultaneously triangularize over Q; the diagonal lists the
    composition characters in filtration order.

    Raises IrrationalSpectrumError when some stage has no rational
    eigenvalue (the pair is not triangularizable over Q).
    """
    require_valid(r)
    n = r.dim
    basis = Matrix.identity(n)
    a1, a2 = r.g1, r.g2
    for step in range(n - 1):
        m = n - step
        sub1 = Matrix.from_rows([[a1[(i, j)] for j in range(step, n)]
                                 for i in range(step, n)])
        sub2 = Matrix.from_rows([[a2[(i, j)] for j in range(step, n)]
                                 for i in range(step, n)])
        found = _common_eigenvector(sub1, sub2)
        if found is None:
            raise IrrationalSpectrumError(
                "no common rational eigenvector; the pair is not "
                "triangularizable over Q")
        vec, _, _ = found
        p_small = _complete_basis(vec, m)
        p_step = Matrix.from_rows(
            [[Fraction(int(i == j)) if i < step or j < step
              else p_small[(i - step, j - step)]
              for j in range(n)] for i in range(n)])
        basis = basis * p_step
        pinv = invert(p_step)
        a1 = pinv * a1 * p_step
        a2 = pinv * a2 * p_step
    characters = [(a1[(i, i)], a2[(i, i)]) for i in range(n)]

    def strict(a):
        return Matrix.from_rows(
            [[a[(i, j)] if j > i else Fraction(0) for j in range(n)]
             for i in range(n)])

    data = SemiSimpleData(characters, strict(a1), strict(a2), basis, a1, a2)
    # reconjugation must recover the input exactly
    binv = invert(basis)
    assert binv * r.g1 * basis == a1 and binv * r.g2 * basis == a2
    return data


# -- hom / tensor / dual -----------------------------------------------------

def hom_rep(v: TorusRep, w: TorusRep) -> TorusRep:
    """Hom(V, W) with the conjugate action f -> w.g ∘ f ∘ v.g^{-1}.

    Basis: matrix units E_{kl} (k a W-index, l a V-index), ordered row-major.
    """
    require_valid(v)
    require_valid(w)
    dim = v.dim * w.dim
    mats = []
    for i in (1, 2):
        wg = w.g(i)
        vginv = v.g_inv(i)
        entries = []
        cols = []
        for k in range(w.dim):
            for l in range(v.dim):
                unit = Matrix(w.dim, v.dim,
                              [Fraction(int((a, b) == (k, l)))
                               for a in range(w.dim) for b in range(v.dim)])
                img = wg * unit * vginv
                cols.append([img[(a, b)] for a in range(w.dim)
                             for b in range(v.dim)])
        for rr in range(dim):
            entries.extend(cols[cc][rr] for cc in range(dim))
        mats.append(Matrix(dim, dim, entries))
    return TorusRep(mats[0], mats[1])


def tensor_rep(v: TorusRep, w: TorusRep) -> TorusRep:
    """V ⊗ W with the diagonal action; basis e_k ⊗ e_l, row-major."""
    require_valid(v)
    require_valid(w)
    dim = v.dim * w.dim
    mats = []
    for i in (1, 2):
        vg, wg = v.g(i), w.g(i)
        entries = []
        for k in range(v.dim):
            for l in range(w.dim):
                for kk in range(v.dim):
                    for ll in range(w.dim):
                        entries.append(vg[(k, kk)] * wg[(l, ll)])
        mats.append(Matrix(dim, dim, entries))
    return TorusRep(mats[0], mats[1])


def dual_rep(v: TorusRep) -> TorusRep:
    """The dual representation Hom(V, trivial)."""
    return hom_rep(v, TorusRep.trivial(1))


# -- cellular cochain complex ------------------------------------------------

def cellular_complex(v: TorusRep) -> TwistedComplex:
    """The cellular cochain complex of the square torus with coefficients in v.

    C^0 = V -> C^1 = V ⊕ V -> C^2 = V with
    d0(x) = ((g1-1)x, (g2-1)x) and d1(x1, x2) = (g2-1)x1 - (g1-1)x2;
    d1 ∘ d0 = 0 because the generators commute.
    """
    require_valid(v)
    n = v.dim
    one = Matrix.identity(n)
    m1 = v.g1 - one
    m2 = v.g2 - one
    d0 = Matrix.from_rows([list(m1.row(i)) for i in range(n)]
                          + [list(m2.row(i)) for i in range(n)])
    d1 = Matrix.from_rows([list(m2.row(i)) + [-e for e in m1.row(i)]
                           for i in range(n)])
    basis = {
        0: [f"pt[{k}]" for k in range(n)],
        1: [f"edge1[{k}]" for k in range(n)] + [f"edge2[{k}]" for k in range(n)],
        2: [f"square[{k}]" for k in range(n)],
    }
    return TwistedComplex(basis, {0: d0, 1: d1})


# -- isomorphism testing -----------------------------------------------------

class IsoResult:
    """Outcome of the intertwiner search.

    status is 'isomorphic' (with a verified invertible conjugator),
    'not_isomorphic' (intertwiner space zero, or provably all-singular), or
    'inconclusive' (nonzero space, no invertible point within budget).
    """

    __slots__ = ("status", "conjugator", "space_dim")

    def __init__(self, status, conjugator, space_dim):
        self.status = status
        self.conjugator = conjugator
        self.space_dim = space_dim

    def __bool__(self):
        return self.status == "isomorphic"

    def __repr__(self):
        return f"IsoResult({self.status}, dim={self.space_dim})"


def intertwiner_space(v: TorusRep, w: TorusRep):
    """Basis of {T : T v.g_i = w.g_i T, i = 1, 2} as dim x dim matrices."""
    if v.dim != w.dim:
        raise ValueError("equal dimensions required")
    n = v.dim
    rows = []
    for i in (1, 2):
        vg, wg = v.g(i), w.g(i)
        # (T vg - wg T)[a, b] = sum_c T[a,c] vg[c,b] - wg[a,c] T[c,b]
        for a in range(n):
            for b in range(n):
                row = [Fraction(0)] * (n * n)
                for c in range(n):
                    row[a * n + c] += vg[(c, b)]
                    row[c * n + b] -= wg[(a, c)]
                rows.append(row)
    _, kernel = rank_kernel(Matrix.from_rows(rows))
    return [Matrix(n, n, k) for k in kernel]


def _candidate_key(t: Matrix):
    entries = t.entries
    return (max(abs(e) for e in entries),
            sum(1 for e in entries if e != 0),
            sum(1 for e in entries if e < 0),
            entries)


GRID_CAP = 120_000


def is_isomorphic(v: TorusRep, w: TorusRep, seed: int = 20260808) -> IsoResult:
    """Search for an invertible intertwiner; exact negative certificates.

    The solution space of the intertwiner equations is computed exactly.  On
    a small-integer coefficient grid large enough to detect a vanishing
    determinant polynomial (degree <= dim per coefficient) the search is a
    decision procedure; past that size it falls back to seeded random
    sampling and may report 'inconclusive'.
    """
    require_valid(v)
    require_valid(w)
    if v.dim != w.dim:
        raise ValueError("equal dimensions required")
    if v.g1 == w.g1 and v.g2 == w.g2:
        return IsoResult("isomorphic", Matrix.identity(v.dim), None)
    space = intertwiner_space(v, w)
    k = len(space)
    if k == 0:
        return IsoResult("not_isomorphic", None, 0)
    n = v.dim
    values = [Fraction(0)]
    step = 1
    while len(values) < n + 1:
        values.extend((Fraction(step), Fraction(-step)))
        step += 1
    values = values[:max(n + 1, 5)]
    if len(values) ** k <= GRID_CAP:
        best = None
        for lam in itertools.product(values, repeat=k):
            t = space[0].scale(lam[0])
            for i in range(1, k):
                t = t + space[i].scale(lam[i])
            if det(t) == 0:
                continue
            key = _candidate_key(t)
            if best is None or key < best[0]:
                best = (key, t)
        if best is None:
            # det vanishes on a full grid, hence identically: no invertible
            # intertwiner exists.
            return IsoResult("not_isomorphic", None, k)
        t = best[1]
        assert t * v.g1 == w.g1 * t and t * v.g2 == w.g2 * t
        return IsoResult("isomorphic", t, k)
    rng = random.Random(seed)
    for _ in range(500):
        lam = [Fraction(rng.randint(-5, 5)) for _ in range(k)]
        t = space[0].scale(lam[0])
        for i in range(1, k):
            t = t + space[i].scale(lam[i])
        if det(t) != 0:
            assert t * v.g1 == w.g1 * t and t * v.g2 == w.g2 * t
            return IsoResult("isomorphic", t, k)
    return IsoResult("inconclusive", None, k)


# -- text format --------------------------------------------------------------

def parse_rep(text: str) -> TorusRep:
    """Parse the rep file format: a dimension line, then two nested arrays
    of 'p/q' strings (bare integers also accepted)."""
    stripped = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    body = stripped.strip()
    if not body:
        raise ParseError("empty representation file")
    head, _, rest = body.partition("\n")
    try:
        dim = int(head.strip())
    except ValueError as exc:
        raise ParseError(f"bad dimension line {head!r}") from exc
    blocks = []
    depth = 0
    start = None
    for pos, ch in enumerate(rest):
        if ch == "[":
            if depth == 0:
                start = pos
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                blocks.append(rest[start:pos + 1])
    if len(blocks) != 2:
        raise ParseError("expected exactly two matrices")

    def load(block):
        try:
            data = json.loads(block)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad matrix block: {exc}") from exc
        if (not isinstance(data, list) or len(data) != dim
                or any(not isinstance(r, list) or len(r) != dim for r in data)):
            raise ParseError(f"matrix is not {dim}x{dim}")
        try:
            return Matrix.from_rows([[frac(e) for e in row] for row in data])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad matrix entry: {exc}") from exc

    return TorusRep(load(blocks[0]), load(blocks[1]))


def rep_to_text(r: TorusRep) -> str:
    def dump(m: Matrix):
        return json.dumps([[frac_str(e) for e in m.row(i)]
                           for i in range(m.rows)])

    return f"{r.dim}\n{dump(r.g1)}\n{dump(r.g2)}\n"
