"""
Reflection group acting on the contracted monodromy manifold.

Coordinates are x = g1, y = -g2, z = g3 together with the Stokes parameter
s, so the manifold reads x + y + z(1 - s) = 1, z(z - 1) = xy. The three
reflections r1, r2, r3 generate a Coxeter group G(s); finite orbits of
r1 r2 are the algebroid solutions, and they occur exactly when s is a root
of one of the integer polynomials q_k(s).

Points are either exact, with coordinates in Q[s]/(m(s)) for the minimal
polynomial m of s, or numeric, with ComplexHP coordinates.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mpf
import sympy
from sympy import QQ, ZZ

from modules.exceptions import (
    BoundaryError,
    DivisionInexactError,
    UndefinedGeneratorError,
    ValidationError,
    WrongParameterError,
)
from modules.series import int_poly_to_json
from modules.specfun import ComplexHP, DEFAULT_DIGITS, chebyshev_sympy

logger = logging.getLogger(__name__)

S = sympy.Symbol('s')
GENERATORS = ('r1', 'r2', 'r3')
DEFAULT_DENOMINATOR_BOUND = 200


# --- exact arithmetic in Q(s) ---------------------------------------------------

class QuotientField:
    """Q[s]/(m(s)) for a monic irreducible m; a rational s0 uses m = s - s0."""

    def __init__(self, modulus: sympy.Poly):
        m = sympy.Poly(modulus, S, domain=QQ)
        if m.degree() < 1:
            raise ValidationError('modulus must have positive degree')
        if not m.is_irreducible:
            raise ValidationError('modulus must be irreducible over Q', {'modulus': str(m.as_expr())})
        self.modulus = m.monic()

    @classmethod
    def rational(cls, s0: Any) -> 'QuotientField':
        return cls(sympy.Poly(S - sympy.Rational(s0), S, domain=QQ))

    def __call__(self, value: Any) -> 'FieldElement':
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, sympy.Poly):
            poly = sympy.Poly(value.as_expr(), S, domain=QQ)
        else:
            poly = sympy.Poly(sympy.sympify(value), S, domain=QQ)
        return FieldElement(poly.rem(self.modulus), self)

    def generator(self) -> 'FieldElement':
        return self(S)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, QuotientField) and self.modulus == other.modulus

    def __hash__(self):
        return hash(str(self.modulus))


@dataclass(frozen=True, eq=False)
class FieldElement:
    poly: sympy.Poly
    field: QuotientField

    def _other(self, other: Any) -> 'FieldElement':
        return other if isinstance(other, FieldElement) else self.field(other)

    def _wrap(self, poly: sympy.Poly) -> 'FieldElement':
        return FieldElement(poly.rem(self.field.modulus), self.field)

    def __add__(self, other):
        return self._wrap(self.poly + self._other(other).poly)

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.poly - self._other(other).poly)

    def __rsub__(self, other):
        return self._wrap(self._other(other).poly - self.poly)

    def __mul__(self, other):
        return self._wrap(self.poly * self._other(other).poly)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.poly, self.field)

    def inverse(self) -> 'FieldElement':
        if self.is_zero():
            raise ZeroDivisionError('division by zero in Q(s)')
        return self._wrap(sympy.invert(self.poly, self.field.modulus))

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def __eq__(self, other: Any) -> bool:
        return (self - other).is_zero()

    def __hash__(self):
        return hash(str(self.poly.as_expr()))

    def as_expr(self) -> sympy.Expr:
        return self.poly.as_expr()

    def __str__(self) -> str:
        return str(self.as_expr())


Coordinate = Union[FieldElement, ComplexHP]


def _is_zero(value: Coordinate, tol: Any) -> bool:
    if isinstance(value, FieldElement):
        return value.is_zero()
    return abs(value) <= tol


def _numeric_tol(digits: int) -> mpf:
    return mpf(10) ** (-(digits // 2))


@dataclass(frozen=True)
class Point4:
    """(x, y, z, s) = (g1, -g2, g3, s)."""

    x: Coordinate
    y: Coordinate
    z: Coordinate
    s: Coordinate

    @property
    def exact(self) -> bool:
        return isinstance(self.x, FieldElement)

    @property
    def tol(self) -> Any:
        return 0 if self.exact else _numeric_tol(self.x.digits)

    def coords(self) -> Tuple[Coordinate, Coordinate, Coordinate, Coordinate]:
        return self.x, self.y, self.z, self.s

    def residuals(self) -> Tuple[Coordinate, Coordinate]:
        x, y, z, s = self.coords()
        return x + y + z * (1 - s) - 1, z * (z - 1) - x * y

    def on_manifold(self, tol: Any = None) -> Dict[str, Any]:
        limit = self.tol if tol is None else tol
        errors = []
        for name, value in zip(('linear', 'quadratic'), self.residuals()):
            if not _is_zero(value, limit):
                errors.append(f'{name} residual {value}')
        return {'valid': not errors, 'errors': errors or None}

    def same_as(self, other: 'Point4', tol: Any = None) -> bool:
        limit = self.tol if tol is None else tol
        return all(_is_zero(a - b, limit) for a, b in zip(self.coords(), other.coords()))

    def to_json(self) -> Dict[str, Any]:
        if self.exact:
            return {name: str(getattr(self, name)) for name in ('x', 'y', 'z', 's')}
        return {name: getattr(self, name).to_json() for name in ('x', 'y', 'z', 's')}

    @classmethod
    def numeric(cls, x: Any, y: Any, z: Any, s: Any, digits: Optional[int] = None) -> 'Point4':
        d = digits or DEFAULT_DIGITS
        return cls(*(ComplexHP.of(v, d) for v in (x, y, z, s)))

    @classmethod
    def in_field(cls, field: QuotientField, x: Any, y: Any, z: Any) -> 'Point4':
        return cls(field(x), field(y), field(z), field.generator())


def from_monodromy(point: Any) -> Point4:
    """Point4 of a contracted MonodromyPoint."""
    return Point4(point.g1, -point.g2, point.g3, point.s)


# --- generators ----------------------------------------------------------------

def _regularized_r3(p: Point4) -> Point4:
    x, y, z, s = p.coords()
    if _is_zero(s + 1, p.tol):
        raise UndefinedGeneratorError('r3 cannot be regularized at (1, 0, 0, -1)')
    return Point4((1 - s) / (1 + s), 2 / (1 + s), 2 / (1 + s), 2 - s)


def apply_generator(gen: str, p: Point4) -> Point4:
    """
    Apply r1, r2 or r3.

    r1: (x, y, z, s) -> (y, x, z, s)
    r2: (x, y, z, s) -> (z, y + (x - z)s, x, s)
    r3: (x, y, z, s) -> (((2 - x)z + xy)/(z + y), -(z - y)y/(z + y), (z - y)z/(z + y), 2 - s)

    r3 at z + y = 0 is only defined at (1, 0, 0, s), s != -1, through its
    limit ((1 - s)/(1 + s), 2/(1 + s), 2/(1 + s), 2 - s).

    Raises:
        UndefinedGeneratorError: r3 at z + y = 0 away from (1, 0, 0, s)
    """
    x, y, z, s = p.coords()
    if gen == 'r1':
        return Point4(y, x, z, s)
    if gen == 'r2':
        return Point4(z, y + (x - z) * s, x, s)
    if gen == 'r3':
        den = z + y
        if _is_zero(den, p.tol):
            if _is_zero(x - 1, p.tol) and _is_zero(y, p.tol) and _is_zero(z, p.tol):
                return _regularized_r3(p)
            raise UndefinedGeneratorError('r3 is undefined where z + y = 0', {'point': p.to_json()})
        return Point4(((2 - x) * z + x * y) / den, -(z - y) * y / den, (z - y) * z / den, 2 - s)
    raise UndefinedGeneratorError(f'unknown generator {gen!r}', {'allowed': list(GENERATORS)})


def parse_word(word: Union[str, Sequence[str]]) -> List[str]:
    """'r1r2' or ['r1', 'r2'] -> ['r1', 'r2']; the rightmost letter acts first."""
    if isinstance(word, str):
        letters = ['r' + c for c in word.replace(' ', '').split('r') if c]
    else:
        letters = list(word)
    for g in letters:
        if g not in GENERATORS:
            raise UndefinedGeneratorError(f'unknown generator {g!r} in word {word!r}')
    if not letters:
        raise ValidationError('empty generator word')
    return letters


def apply_word(word: Union[str, Sequence[str]], p: Point4) -> Point4:
    for g in reversed(parse_word(word)):
        p = apply_generator(g, p)
    return p


def r3_regularized(s: Any, digits: Optional[int] = None) -> Point4:
    """r3(1, 0, 0, s)."""
    if isinstance(s, FieldElement):
        f = s.field
        return _regularized_r3(Point4(f(1), f(0), f(0), s))
    return _regularized_r3(Point4.numeric(1, 0, 0, s, digits))


def epsilon_point(s: Any, eps: Any, digits: Optional[int] = None) -> Point4:
    """
    On-manifold point with z + y = eps approaching (1, 0, 0, s):
    z, y = eps/2 +- sqrt(eps/(s+1) + eps^2 (s-3)/(4(s+1))), x = zs + 1 - eps.
    """
    d = digits or DEFAULT_DIGITS
    ss, e = ComplexHP.of(s, d), ComplexHP.of(eps, d)
    root = (e / (ss + 1) + e * e * (ss - 3) / ((ss + 1) * 4)).sqrt()
    z = e / 2 + root
    y = e / 2 - root
    return Point4(z * ss + 1 - e, y, z, ss)


def parametrize_cubic(kappa: Any, s: Any, digits: Optional[int] = None) -> Point4:
    """
    Rational point of the manifold with z = kappa x:
    x = (1 + kappa)/(1 + kappa(1 - s) + kappa^2), z = kappa x, y = kappa(z - 1).
    """
    if isinstance(s, FieldElement):
        k = s.field(kappa)
    else:
        d = digits or DEFAULT_DIGITS
        s, k = ComplexHP.of(s, d), ComplexHP.of(kappa, d)
    den = 1 + k * (1 - s) + k * k
    if _is_zero(den, 0):
        raise ValidationError('kappa is a pole of the parametrization', {'kappa': str(kappa)})
    x = (1 + k) / den
    z = k * x
    return Point4(x, k * (z - 1), z, s)


# --- orbits --------------------------------------------------------------------

@dataclass
class OrbitResult:
    points: List[Point4]
    finite: bool
    length: Optional[int]
    max_iter: int

    @property
    def verdict(self) -> str:
        return f'finite({self.length})' if self.finite else f'undecided({self.max_iter})'

    def to_json(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict,
            'length': self.length,
            'points': [p.to_json() for p in self.points],
        }


def orbit(p: Point4, generator: Union[str, Sequence[str]] = 'r1r2', max_iter: int = 200,
          tol: Any = None) -> OrbitResult:
    """
    Iterate a generator word until the start point recurs.

    Args:
        p: on-manifold start point
        generator: word such as 'r1r2' (acts as r1 after r2)
        max_iter: iteration cap
        tol: return tolerance for numeric points (default 10^(-digits/2))

    Returns:
        OrbitResult; finite(length) or undecided(max_iter)
    """
    if max_iter < 1:
        raise ValidationError('max_iter must be at least 1', {'max_iter': max_iter})
    check = p.on_manifold()
    if not check['valid']:
        raise ValidationError('orbit start point is not on the manifold', {'errors': check['errors']})
    word = parse_word(generator)
    points = [p]
    current = p
    for n in range(1, max_iter + 1):
        current = apply_word(word, current)
        if current.same_as(p, tol):
            logger.info(f'Orbit of {"".join(word)} closed after {n} steps')
            return OrbitResult(points, True, n, max_iter)
        points.append(current)
    return OrbitResult(points, False, None, max_iter)


def _sign(k: int) -> int:
    return 1 if k % 2 == 0 else -1


def closed_form_orbit(s: int, p0: Point4, n: int) -> Point4:
    """
    n-th point of the r1 r2 orbit at s = -1 or s = 3 in closed form.

    Raises:
        WrongParameterError: s not in {-1, 3}
    """
    if s not in (-1, 3):
        raise WrongParameterError('closed-form orbits exist only for s = -1 and s = 3', {'s': s})
    if n < 0:
        raise ValidationError('n must be nonnegative', {'n': n})
    x0, y0, z0, s_coord = p0.coords()
    if s == -1:
        odd = n % 2
        x = _sign(n) * (1 + n // 2) * x0 - _sign(n) * ((n + 1) // 2) * y0 + odd * z0
        y = _sign(n) * (n // 2) * x0 - _sign(n) * ((n - 1) // 2) * y0 + odd * z0
        z = -_sign(n) * ((n + 1) // 2) * x0 + _sign(n) * (n // 2) * y0 + (1 - odd) * z0
    else:
        x = (n + 1) * (n + 2) // 2 * x0 + n * (n + 1) // 2 * y0 + (1 - (n + 1) ** 2) * z0
        y = n * (n - 1) // 2 * x0 + (n - 2) * (n - 1) // 2 * y0 + (1 - (n - 1) ** 2) * z0
        z = n * (n + 1) // 2 * x0 + (n - 1) * n // 2 * y0 + (1 - n ** 2) * z0
    return Point4(x, y, z, s_coord)


# --- q-tower -------------------------------------------------------------------

@dataclass
class QPolyTower:
    q: Dict[int, sympy.Poly]

    def __getitem__(self, k: int) -> sympy.Poly:
        return self.q[k]

    @property
    def K(self) -> int:
        return max(self.q)

    def to_json(self) -> Dict[str, List[str]]:
        return {str(k): int_poly_to_json(p) for k, p in sorted(self.q.items())}


def _chebyshev_at_shift(n: int) -> sympy.Poly:
    return sympy.Poly(chebyshev_sympy(n, (S - 1) / 2), S, domain=QQ)


def _divisor_product(tower: Dict[int, sympy.Poly], m: int, proper: bool = True) -> sympy.Poly:
    prod = sympy.Poly(1, S, domain=QQ)
    for d in sympy.divisors(m):
        if proper and d == m:
            continue
        prod = prod * tower[d]
    return prod


def qk_tower(K: int) -> QPolyTower:
    """
    q_1..q_K from the Chebyshev factorizations

        2(T_{n+1}(w) - T_n(w))     = prod_{d | 2n+1} q_d(s)
        2(T_{n+1}(w) - T_{n-1}(w)) = prod_{d | 2n} q_d(s)

    with w = (s - 1)/2.

    Raises:
        DivisionInexactError: a quotient is not an exact monic integer polynomial
    """
    if not isinstance(K, int) or K < 2:
        raise ValidationError('K must be an integer >= 2', {'K': K})
    tower: Dict[int, sympy.Poly] = {
        1: sympy.Poly(S - 3, S, domain=QQ),
        2: sympy.Poly(S + 1, S, domain=QQ),
    }
    for m in range(3, K + 1):
        n = m // 2
        if m % 2:
            lhs = 2 * (_chebyshev_at_shift(n + 1) - _chebyshev_at_shift(n))
        else:
            lhs = 2 * (_chebyshev_at_shift(n + 1) - _chebyshev_at_shift(n - 1))
        quotient, remainder = lhs.div(_divisor_product(tower, m))
        if not remainder.is_zero:
            raise DivisionInexactError(f'q_{m} division left a remainder', {'remainder': str(remainder.as_expr())})
        if quotient.LC() != 1 or any(not c.is_integer for c in quotient.all_coeffs()):
            raise DivisionInexactError(f'q_{m} is not a monic integer polynomial',
                                       {'q': str(quotient.as_expr())})
        tower[m] = quotient
    return QPolyTower({k: sympy.Poly(p.as_expr(), S, domain=ZZ) for k, p in tower.items()})


def tower_checks(tower: QPolyTower) -> Dict[str, Any]:
    """
    Degrees deg q_k = phi(k)/2 (k > 2) and the squared-product identities

        2 q1 (T_{2n+1}(w) - 1)    = (prod_{d | 2n+1} q_d)^2
        2 q1 q2 (T_{2n+2}(w) - 1) = (prod_{d | 2n+2} q_d)^2
    """
    errors = []
    q = {k: sympy.Poly(p.as_expr(), S, domain=QQ) for k, p in tower.q.items()}
    for k, p in tower.q.items():
        if k > 2 and p.degree() != sympy.totient(k) // 2:
            errors.append(f'deg q_{k} = {p.degree()}, expected {sympy.totient(k) // 2}')
    for m in range(1, tower.K + 1):
        if any(d not in q for d in sympy.divisors(m)):
            continue
        square = _divisor_product(q, m, proper=False) ** 2
        if m % 2:
            lhs = 2 * q[1] * (_chebyshev_at_shift(m) - 1)
        else:
            lhs = 2 * q[1] * q[2] * (_chebyshev_at_shift(m) - 1)
        if lhs != square:
            errors.append(f'squared-product identity fails at m = {m}')
    return {'valid': not errors, 'errors': errors or None}


# --- predictors ----------------------------------------------------------------

def _real_s(s: Any, digits: int) -> mpf:
    ss = ComplexHP.of(s, digits)
    if abs(ss.im) > _numeric_tol(digits):
        raise WrongParameterError('s must be real', {'s': str(ss)})
    return ss.re


def orbit_length_from_s(s: Any, D: int = DEFAULT_DENOMINATOR_BOUND,
                        digits: Optional[int] = None) -> Dict[str, Any]:
    """
    Predict the r1 r2 orbit length from s = 1 + 2 cos(2 pi rho1), 0 < 2 rho1 < 1.

    Returns:
        {'verdict': 'finite' | 'infinite' | 'undecided', 'length', 'rho1'};
        the length is the denominator of rho1 when it is rational with
        denominator <= D.

    Raises:
        WrongParameterError: s outside [-1, 3] or not real
    """
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 5):
        x = _real_s(s, d)
        tol = _numeric_tol(d)
        if x < -1 - tol or x > 3 + tol:
            raise WrongParameterError('s must lie in [-1, 3]', {'s': mpmath.nstr(x, 15)})
        if abs(x + 1) <= tol or abs(x - 3) <= tol:
            return {'verdict': 'infinite', 'length': None, 'rho1': None, 'boundary': True}
        rho1 = mpmath.acos((x - 1) / 2) / (2 * mpmath.pi)
        guess = Fraction(mpmath.nstr(rho1, d)).limit_denominator(D)
        matched = abs(rho1 - mpf(guess.numerator) / guess.denominator) <= tol
    if matched:
        return {'verdict': 'finite', 'length': guess.denominator, 'rho1': str(guess)}
    return {'verdict': 'undecided', 'length': None, 'rho1': mpmath.nstr(rho1, 20), 'bound': D}


def group_order(s: Any, D: int = DEFAULT_DENOMINATOR_BOUND,
                digits: Optional[int] = None) -> Dict[str, Any]:
    """
    Order of G(s): 4 max(m, n) with m, n the orbit lengths at s and 2 - s.

    Raises:
        BoundaryError: s = -1 or s = 3
    """
    d = digits or DEFAULT_DIGITS
    x = _real_s(s, d)
    tol = _numeric_tol(d)
    if abs(x + 1) <= tol or abs(x - 3) <= tol:
        raise BoundaryError('G(s) is infinite dihedral at s = -1 and s = 3', {'s': mpmath.nstr(x, 15)})
    m = orbit_length_from_s(x, D, d)
    with mpmath.workdps(d + 5):
        n = orbit_length_from_s(2 - x, D, d)
    if m['verdict'] != 'finite' or n['verdict'] != 'finite':
        return {'order': 'infinite', 'm': m['length'], 'n': n['length']}
    return {'order': 4 * max(m['length'], n['length']), 'm': m['length'], 'n': n['length']}


# --- seven lines ---------------------------------------------------------------

def seven_lines() -> List[Dict[str, Any]]:
    """The seven affine lines on the cubic, each checked symbolically."""
    x = sympy.Symbol('x')
    lines = [
        (0, 1, 0, S),
        (1, 0, 0, S),
        (0, S, 1, S),
        (x, x + 1, -x, -1),
        (x, x - 1, 1 - x, -1),
        (1, S * (S - 1), S, S),
        (S, 0, 1, S),
    ]
    out = []
    for index, (px, py, pz, ps) in enumerate(lines, start=1):
        linear = sympy.expand(px + py + pz * (1 - ps) - 1)
        quadratic = sympy.expand(pz * (pz - 1) - px * py)
        out.append({
            'line': index,
            'point': [str(sympy.sympify(c)) for c in (px, py, pz, ps)],
            'valid': linear == 0 and quadratic == 0,
        })
    return out


# --- relations -----------------------------------------------------------------

RELATIONS = (('r1r1', 1), ('r2r2', 1), ('r3r3', 1), ('r3r1', 4), ('r2r3', 2))


def relation_checks(p: Point4, tol: Any = None) -> Dict[str, Any]:
    """
    w^m(p) = p for the involutions and for (r3 r1)^4, (r2 r3)^2.

    Words that hit an undefined r3 are reported as skipped, not failed.
    """
    errors = []
    skipped = []
    for word, power in RELATIONS:
        current = p
        try:
            for _ in range(power):
                current = apply_word(word, current)
        except UndefinedGeneratorError:
            skipped.append(word)
            continue
        if not current.same_as(p, tol):
            errors.append(f'({word})^{power} moved the point')
    return {'valid': not errors, 'errors': errors or None, 'skipped': skipped}
