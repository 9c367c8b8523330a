"""
Exact Taylor machinery for the solution H(r) holomorphic at the origin.

H(r) = -a0 + sum_{k>=1} a_k r^k.  In exact mode every a_k is a Laurent
polynomial in a0 with rational coefficients; in numeric mode a0 = -H(0) is a
ComplexHP and the a_k are mpmath complex numbers.

Besides the recurrence this module extracts the integer polynomials P_n of
the coefficient ansatz, evaluates the number-theoretic sequences tied to
them, checks the closed-form identities for P_n(-1), P_n(0), P_n'(-1) and
the leading coefficients, produces the generating-function coefficient
sequences, and gives the convergence-radius bound.
"""

import logging
import math
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import mpmath
from mpmath import mpc, mpf
import sympy
from sympy import QQ, ZZ

from modules.exceptions import (
    AnsatzMismatchError,
    TableTooShortError,
    ValidationError,
    ZeroA0Error,
)
from modules.specfun import ComplexHP, DEFAULT_DIGITS, bessel_modified

logger = logging.getLogger(__name__)

N_MAX_DEFAULT = 60
IRREDUCIBILITY_LIMIT = 12

X = sympy.Symbol('x')
A0 = sympy.Symbol('a0')

BigRat = type(QQ(1))


def to_rat(value: Any) -> Any:
    """Coerce int, Fraction, sympy Rational or 'p/q' string to a QQ element."""
    if isinstance(value, str):
        if '/' in value:
            num, den = value.split('/')
            return QQ(int(num), int(den))
        return QQ(int(value))
    if isinstance(value, sympy.Rational):
        return QQ(int(value.p), int(value.q))
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return QQ(int(value.numerator), int(value.denominator))
    return QQ(value)


class LaurentRatPoly:
    """Laurent polynomial in a0 with exact rational coefficients."""

    __slots__ = ('coeffs',)

    def __init__(self, coeffs: Optional[Dict[int, Any]] = None):
        clean = {}
        for exp, c in (coeffs or {}).items():
            c = to_rat(c)
            if c != 0:
                clean[int(exp)] = c
        self.coeffs = clean

    @classmethod
    def constant(cls, c: Any) -> 'LaurentRatPoly':
        return cls({0: c})

    @classmethod
    def monomial(cls, exp: int, c: Any = 1) -> 'LaurentRatPoly':
        return cls({exp: c})

    @classmethod
    def a0(cls) -> 'LaurentRatPoly':
        return cls({1: 1})

    def _coerce(self, other: Any) -> 'LaurentRatPoly':
        if isinstance(other, LaurentRatPoly):
            return other
        return LaurentRatPoly.constant(other)

    def __add__(self, other: Any) -> 'LaurentRatPoly':
        o = self._coerce(other)
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            out[e] = out.get(e, QQ(0)) + c
        return LaurentRatPoly(out)

    __radd__ = __add__

    def __neg__(self) -> 'LaurentRatPoly':
        return LaurentRatPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: Any) -> 'LaurentRatPoly':
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> 'LaurentRatPoly':
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> 'LaurentRatPoly':
        if not isinstance(other, LaurentRatPoly):
            return self.scale(other)
        out: Dict[int, Any] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, QQ(0)) + c1 * c2
        return LaurentRatPoly(out)

    __rmul__ = __mul__

    def scale(self, c: Any) -> 'LaurentRatPoly':
        c = to_rat(c)
        return LaurentRatPoly({e: v * c for e, v in self.coeffs.items()})

    def shift(self, k: int) -> 'LaurentRatPoly':
        """Multiply by a0**k."""
        return LaurentRatPoly({e + k: c for e, c in self.coeffs.items()})

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, LaurentRatPoly):
            other = LaurentRatPoly.constant(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_exp(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_exp(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def items(self) -> List[Tuple[int, Any]]:
        return sorted(self.coeffs.items())

    def evaluate(self, a0: Any, digits: Optional[int] = None) -> mpc:
        x = a0.value if isinstance(a0, ComplexHP) else ComplexHP.of(a0, digits).value
        d = a0.digits if isinstance(a0, ComplexHP) else (digits or DEFAULT_DIGITS)
        with mpmath.workdps(d + 10):
            total = mpc(0)
            for e, c in self.coeffs.items():
                total += (mpf(int(c.numerator)) / int(c.denominator)) * x ** e
        return total

    def evaluate_exact(self, a0: Any) -> Any:
        q = to_rat(a0)
        total = QQ(0)
        for e, c in self.coeffs.items():
            total += c * q ** e
        return total

    def to_sympy(self, symbol: sympy.Symbol = A0) -> sympy.Expr:
        return sum((sympy.Rational(int(c.numerator), int(c.denominator)) * symbol ** e
                    for e, c in self.items()), sympy.Integer(0))

    def to_json(self) -> Dict[str, Dict[str, str]]:
        return {str(e): {'num': str(c.numerator), 'den': str(c.denominator)} for e, c in self.items()}

    @classmethod
    def from_json(cls, data: Dict[str, Dict[str, str]]) -> 'LaurentRatPoly':
        return cls({int(e): QQ(int(v['num']), int(v['den'])) for e, v in data.items()})

    def __repr__(self) -> str:
        return f'LaurentRatPoly({self.to_sympy()})'


def int_poly_to_json(poly: sympy.Poly) -> List[str]:
    """Ascending decimal-string coefficients of an integer polynomial."""
    return [str(int(c)) for c in reversed(poly.all_coeffs())]


def int_poly_from_json(coeffs: List[str], symbol: sympy.Symbol = X) -> sympy.Poly:
    return sympy.Poly(list(reversed([int(c) for c in coeffs])), symbol, domain=ZZ)


@dataclass(frozen=True)
class CoeffTable:
    """Taylor coefficients a[0..order]; a[0] is the symbol/value a0 = -H(0)."""

    mode: str
    order: int
    a: Tuple[Any, ...]
    a0: Optional[ComplexHP] = None

    def __post_init__(self):
        if self.mode not in ('exact', 'numeric'):
            raise ValidationError(f'unknown table mode {self.mode!r}')
        if len(self.a) != self.order + 1:
            raise ValidationError('coefficient count does not match order',
                                  {'order': self.order, 'count': len(self.a)})

    def require(self, n: int) -> None:
        if n > self.order:
            raise TableTooShortError(f'coefficient table of order {self.order} is too short for n={n}',
                                     {'order': self.order, 'n': n})

    def value_at(self, k: int, a0: Any = None, digits: Optional[int] = None) -> mpc:
        """Numeric a_k, evaluating the Laurent form at a0 in exact mode."""
        self.require(k)
        if self.mode == 'numeric':
            return self.a[k].value if isinstance(self.a[k], ComplexHP) else self.a[k]
        return self.a[k].evaluate(a0, digits)

    def to_json(self) -> Dict[str, Any]:
        if self.mode == 'exact':
            coeffs = [c.to_json() for c in self.a]
        else:
            coeffs = [ComplexHP.of(c, self.a0.digits).to_json() for c in self.a]
        return {
            'mode': self.mode,
            'order': self.order,
            'a0': self.a0.to_json() if self.a0 is not None else None,
            'coefficients': coeffs,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'CoeffTable':
        mode = data['mode']
        a0 = ComplexHP.from_json(data['a0']) if data.get('a0') else None
        if mode == 'exact':
            a = tuple(LaurentRatPoly.from_json(c) for c in data['coefficients'])
        else:
            a = tuple(ComplexHP.from_json(c) for c in data['coefficients'])
        return cls(mode, int(data['order']), a, a0)


# --- recurrence ----------------------------------------------------------------

def _recurrence_step(a: List[Any], s2: List[Any], n: int, a0: Any, zero: Any,
                     divide: Callable[[Any, int], Any]) -> Any:
    """a_{n+1} from a_0..a_n, with s2[m] = sum_{j=1}^{m-1} a_j a_{m-j} cached for m <= n."""
    a1 = a[1]
    rhs = ((n - 1) ** 2 * a1 - 3 * a0 * a0) * a[n]
    rhs = rhs + 3 * a0 * s2[n]
    # at n = 1 the convention sum_{i=2}^{0} X_i = -X_1 contributes 0 * a_1^2
    for i in range(2, n):
        w = (n + 1 - i) * (n + 1 - 2 * i)
        if w:
            rhs = rhs + w * (a[i] * a[n + 1 - i])
    cubic = zero
    for i in range(1, n - 1):
        cubic = cubic + a[i] * s2[n - i]
    rhs = rhs - cubic
    return divide(rhs, n)


def _s2(a: List[Any], m: int, zero: Any) -> Any:
    total = zero
    for j in range(1, m):
        total = total + a[j] * a[m - j]
    return total


class _ExactRecurrence:
    """Incrementally extended exact table shared by every caller."""

    def __init__(self):
        self._lock = threading.Lock()
        a0 = LaurentRatPoly.a0()
        a1 = LaurentRatPoly({2: 1, -1: 1})
        zero = LaurentRatPoly()
        self.a: List[LaurentRatPoly] = [a0, a1]
        self.s2: List[LaurentRatPoly] = [zero, zero]

    def extend(self, N: int) -> Tuple[LaurentRatPoly, ...]:
        with self._lock:
            zero = LaurentRatPoly()
            a0 = self.a[0]
            while len(self.a) <= N:
                n = len(self.a) - 1
                while len(self.s2) <= n:
                    self.s2.append(_s2(self.a, len(self.s2), zero))

                def divide(x, n_):
                    return x.shift(-1).scale(QQ(1, (n_ + 1) ** 2))

                self.a.append(_recurrence_step(self.a, self.s2, n, a0, zero, divide))
            return tuple(self.a[:N + 1])


_EXACT = _ExactRecurrence()


def taylor_coeffs(mode: str, N: int, a0: Any = None, digits: Optional[int] = None) -> CoeffTable:
    """
    Taylor coefficients of H(r) = -a0 + sum a_k r^k up to order N.

    Args:
        mode: 'exact' (Laurent polynomials in a0) or 'numeric'
        N: order, N >= 1
        a0: numeric value of a0 = -H(0) (numeric mode)
        digits: working precision for numeric mode

    Returns:
        CoeffTable

    Raises:
        ZeroA0Error: numeric mode with a0 = 0
    """
    if not isinstance(N, int) or N < 1:
        raise ValidationError('order N must be a positive integer', {'N': N})
    if mode == 'exact':
        return CoeffTable('exact', N, _EXACT.extend(N))
    if mode != 'numeric':
        raise ValidationError(f'unknown mode {mode!r}')
    if a0 is None:
        raise ValidationError('numeric mode needs a0')
    a0hp = ComplexHP.of(a0, digits)
    if a0hp.is_zero():
        raise ZeroA0Error('a0 = -H(0) must be nonzero')
    d = a0hp.digits
    with mpmath.workdps(d + 10):
        x = a0hp.value
        a: List[mpc] = [x, (x ** 3 + 1) / x]
        s2: List[mpc] = [mpc(0), mpc(0)]
        for n in range(1, N):
            while len(s2) <= n:
                s2.append(_s2(a, len(s2), mpc(0)))
            a.append(_recurrence_step(a, s2, n, x, mpc(0), lambda v, n_: v / ((n_ + 1) ** 2 * x)))
        values = tuple(ComplexHP(v, d) for v in a[:N + 1])
    return CoeffTable('numeric', N, values, a0hp)


def evaluate_series(table: CoeffTable, r: Any, a0: Any = None,
                    digits: Optional[int] = None) -> Tuple[mpc, mpc]:
    """H(r) and H'(r) from the truncated series."""
    if table.mode == 'numeric':
        d = digits or table.a0.digits
        coeffs = [c.value for c in table.a]
    else:
        d = digits or DEFAULT_DIGITS
        coeffs = [table.a[0].evaluate(a0, d)] + [c.evaluate(a0, d) for c in table.a[1:]]
    with mpmath.workdps(d + 10):
        rr = ComplexHP.of(r, d).value
        H = -coeffs[0]
        dH = mpc(0)
        power = mpc(1)
        for k in range(1, len(coeffs)):
            dH += k * coeffs[k] * power
            power *= rr
            H += coeffs[k] * power
    return H, dH


# --- number theory ---------------------------------------------------------------

def nu3(n: int) -> int:
    """3-adic valuation of a positive integer."""
    if n <= 0:
        raise ValidationError('nu3 needs a positive integer', {'n': n})
    v = 0
    while n % 3 == 0:
        n //= 3
        v += 1
    return v


def nu3_factorial(n: int) -> int:
    """Legendre's formula for nu3(n!)."""
    total, p = 0, 3
    while p <= n:
        total += n // p
        p *= 3
    return total


def digit_sum3(n: int) -> int:
    total = 0
    while n:
        total += n % 3
        n //= 3
    return total


def cloitre(n: int) -> int:
    """n - 2 * sum_k floor(n / 3^k); equals the base-3 digit sum."""
    return n - 2 * nu3_factorial(n)


def fence_S(l: int) -> int:
    return (2 * l + 1) * 3 ** l


def fence_area_direct(l: int) -> int:
    """Sum of heights b_n - 1 over n in [3^l, 3^(l+1)]."""
    return sum(digit_sum3(n) - 1 for n in range(3 ** l, 3 ** (l + 1) + 1))


def fence_total(L: int) -> int:
    return L * 3 ** (L + 1) + 1


def padic_abs3(x: Any) -> Any:
    """|x|_3 for a nonzero rational, as a QQ element."""
    q = to_rat(x)
    if q == 0:
        return QQ(0)
    num, den = int(q.numerator), int(q.denominator)
    v = (nu3(abs(num)) if num % 3 == 0 else 0) - (nu3(den) if den % 3 == 0 else 0)
    return QQ(1, 3 ** v) if v >= 0 else QQ(3 ** (-v))


def number_theory(seq: str, n: int) -> int:
    """
    Integer sequences attached to the coefficient ansatz.

    Args:
        seq: 'b_n' (base-3 digit sum), 'nu3', 'cloitre' or 'fence_S'
        n: index

    Returns:
        the sequence value
    """
    if n < 0:
        raise ValidationError('index must be nonnegative', {'n': n})
    if seq == 'b_n':
        return digit_sum3(n)
    if seq == 'nu3':
        return nu3(n)
    if seq == 'cloitre':
        return cloitre(n)
    if seq == 'fence_S':
        return fence_S(n)
    raise ValidationError(f'unknown sequence {seq!r}')


def kappa(n: int) -> int:
    return 3 ** (nu3(n + 1) + 2 * nu3_factorial(n))


def ansatz_exponent(n: int) -> int:
    """e(n) = n/2 - 1/4 - (-1)^n 3/4."""
    return n // 2 - 1 if n % 2 == 0 else (n + 1) // 2


# --- ansatz polynomials ----------------------------------------------------------

@dataclass(frozen=True)
class AnsatzPolynomial:
    """kappa_n and P_n with the structural facts reported alongside."""

    n: int
    kappa: int
    poly: sympy.Poly
    content: int
    irreducible: Union[bool, str]

    def __iter__(self):
        return iter((self.kappa, self.poly))

    def to_json(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'kappa': str(self.kappa),
            'P': int_poly_to_json(self.poly),
            'content': str(self.content),
            'irreducible': self.irreducible,
        }


def reconstruct_an(n: int, kappa_n: int, poly: sympy.Poly) -> LaurentRatPoly:
    """(-1)^(n-1) kappa P_n(a0^3) (a0^3 + 1) / ((n!)^2 a0^e(n))."""
    scale = QQ((-1) ** (n - 1) * kappa_n, math.factorial(n) ** 2)
    full = poly * sympy.Poly(X + 1, X, domain=ZZ)
    out: Dict[int, Any] = {}
    for (deg,), c in full.terms():
        out[3 * deg - ansatz_exponent(n)] = QQ(int(c)) * scale
    return LaurentRatPoly(out)


def _ansatz_quotient(n: int, an: LaurentRatPoly) -> sympy.Poly:
    e = ansatz_exponent(n)
    k = kappa(n)
    q = an.shift(e).scale(QQ((-1) ** (n - 1) * math.factorial(n) ** 2, k))
    if q.min_exp < 0 or any(exp % 3 for exp in q.coeffs):
        raise AnsatzMismatchError(f'a_{n} is not a polynomial in a0^3 after the ansatz prefactor',
                                  {'n': n, 'exponents': sorted(q.coeffs)})
    terms = {exp // 3: c for exp, c in q.coeffs.items()}
    deg = max(terms) if terms else 0
    coeffs = [sympy.Rational(int(terms[j].numerator), int(terms[j].denominator)) if j in terms else 0
              for j in range(deg, -1, -1)]
    return sympy.Poly(coeffs, X, domain=sympy.QQ)


def extract_Pn(n: int, table: Optional[CoeffTable] = None) -> AnsatzPolynomial:
    """
    Recover kappa_n and the integer polynomial P_n from the exact a_n.

    Raises:
        AnsatzMismatchError: a_n does not have the ansatz form
        TableTooShortError: table order below n
    """
    if n < 1:
        raise ValidationError('n must be >= 1', {'n': n})
    table = table or taylor_coeffs('exact', max(n, 1))
    if table.mode != 'exact':
        raise ValidationError('extract_Pn needs an exact table')
    table.require(n)
    quotient = _ansatz_quotient(n, table.a[n])
    P, rem = sympy.div(quotient, sympy.Poly(X + 1, X, domain=sympy.QQ))
    if not rem.is_zero:
        raise AnsatzMismatchError(f'(x+1) does not divide the numerator of a_{n}', {'n': n})
    if any(not c.is_integer for c in P.all_coeffs()):
        raise AnsatzMismatchError(f'P_{n} has non-integer coefficients', {'n': n})
    P = sympy.Poly(P.as_expr(), X, domain=ZZ)
    if P.degree() != (n - 1) // 2:
        raise AnsatzMismatchError(f'deg P_{n} = {P.degree()}, expected {(n - 1) // 2}', {'n': n})
    content = int(P.content())
    if content != 1:
        logger.warning('P_%d has content %d', n, content)
    if n > IRREDUCIBILITY_LIMIT:
        irreducible: Union[bool, str] = 'unchecked'
    else:
        irreducible = bool(P.is_irreducible) if P.degree() > 0 else True
    return AnsatzPolynomial(n, kappa(n), P, content, irreducible)


def divisible_by_cube_plus_one(an: LaurentRatPoly) -> bool:
    """Whether a0^3 + 1 divides the numerator of a Laurent polynomial."""
    shifted = an.shift(-an.min_exp)
    poly = sympy.Poly(shifted.to_sympy(A0), A0, domain=sympy.QQ)
    return sympy.rem(poly, sympy.Poly(A0 ** 3 + 1, A0, domain=sympy.QQ)).is_zero


# --- identities -----------------------------------------------------------------

def _coeff(poly: sympy.Poly, k: int) -> int:
    cs = list(reversed(poly.all_coeffs()))
    return int(cs[k]) if k < len(cs) else 0


def _abs3_times(n: int) -> Any:
    """n |n|_3 as an integer."""
    return n // 3 ** nu3(n)


def _fact3(n: int) -> int:
    """n! |n!|_3."""
    return math.factorial(n) // 3 ** nu3_factorial(n)


def _catalan_tail(n: int) -> int:
    return sum(math.comb(2 * k, k - 1) for k in range(1, n))


def identity_check(which: str, n: int, table: Optional[CoeffTable] = None) -> Dict[str, Any]:
    """
    Evaluate one of the closed-form identities for P_n exactly.

    Args:
        which: kappa, Pn_minus1, leading, odd0, even0, relations or Pn_prime_minus1
        n: polynomial index
        table: exact table (built on demand)

    Returns:
        Dict with 'valid', 'lhs', 'rhs' and, for 'leading', the content
    """
    if n < 1:
        raise ValidationError('n must be >= 1', {'n': n})
    if table is not None:
        table.require(n)
    P = extract_Pn(n, table).poly
    k_n = kappa(n)
    b = digit_sum3(n)
    half = (n - 1) // 2
    extra: Dict[str, Any] = {}

    if which == 'kappa':
        lhs = k_n * int(P.eval(-1))
        rhs = (-1) ** half * 3 ** (n - 1)
    elif which == 'Pn_minus1':
        lhs = 3 ** nu3(n + 1) * int(P.eval(-1))
        rhs = (-1) ** half * 3 ** (b - 1)
    elif which == 'leading':
        lead = _coeff(P, P.degree())
        lhs = QQ(lead)
        rhs = QQ(_abs3_times(n + 1) * _fact3(n) ** 2, 2 ** n)
        extra['content'] = int(P.content())
        extra['positive'] = lead > 0
    elif which == 'odd0':
        if n % 2 == 0:
            raise ValidationError('odd0 needs odd n', {'n': n})
        k = (n + 1) // 2
        lhs = QQ(_coeff(P, 0))
        rhs = QQ(_fact3(2 * k) * _fact3(2 * k - 1), 2 ** (3 * k - 2))
    elif which == 'even0':
        if n % 2:
            raise ValidationError('even0 needs even n', {'n': n})
        k = n // 2
        lhs = QQ(_coeff(P, 0))
        if k == 1:
            rhs = QQ(1)
        elif k == 2:
            rhs = QQ(17)
        else:
            rhs = QQ(13, 35 ** 2) * QQ(_fact3(2 * k + 1) ** 2, 2 ** (3 * (k - 2))) * 3 ** nu3(2 * k + 1)
    elif which == 'relations':
        if n % 2:
            k = (n + 1) // 2
            lhs = QQ(2 ** (k - 1) * _coeff(P, 0))
            rhs = QQ(_coeff(P, k - 1))
        else:
            k = n // 2
            if k < 3:
                raise ValidationError('the even relation needs n >= 6', {'n': n})
            lhs = QQ(_coeff(P, 0)) * QQ(2) ** (k - 6)
            rhs = QQ(13, 35 ** 2) * (2 * k + 1) * _coeff(P, k - 1)
    elif which == 'Pn_prime_minus1':
        lhs = QQ((-1) ** ((n + 1) // 2) * 3 ** nu3(n + 1) * int(P.diff(X).eval(-1)))
        inner = QQ(n, 2) - QQ(5, 4) - QQ((-1) ** n * 3, 4) + _catalan_tail(n)
        rhs = QQ(3) ** (b - 2) * inner
    else:
        raise ValidationError(f'unknown identity {which!r}')

    valid = lhs == rhs
    if which == 'leading':
        valid = valid and extra['content'] == 1 and extra['positive']
    result = {'which': which, 'n': n, 'valid': bool(valid), 'lhs': str(lhs), 'rhs': str(rhs)}
    result.update(extra)
    if not valid:
        logger.warning('identity %s failed at n=%d: %s != %s', which, n, lhs, rhs)
    return result


# --- generating functions ----------------------------------------------------------

def g2_closed_form(n: int) -> Any:
    """c_n = 3^(n-2)/(n!)^2 (-1 + sum_{k=1}^{n-1} C(2k, k-1))."""
    return QQ(3) ** (n - 2) * QQ(-1 + _catalan_tail(n), math.factorial(n) ** 2)


def genfun_coeffs(which: str, N: int) -> List[Any]:
    """
    Coefficients 0..N of the generating functions g1, g2, A1, B1, B2.

    B1 and B2 are indexed by the power of z; the other sequences by the power of r.
    """
    if N < 1:
        raise ValidationError('N must be >= 1', {'N': N})
    if which == 'g1':
        return [QQ(0)] + [QQ(-3 ** (n - 1), math.factorial(n) ** 2) for n in range(1, N + 1)]
    if which == 'g2':
        c = [QQ(0), QQ(-1, 3)]
        for k in range(1, N):
            src = QQ(3 ** (k - 1) * math.comb(2 * k, k - 1), math.factorial(k) ** 2)
            c.append((3 * c[k] + src) / (k + 1) ** 2)
        return c[:N + 1]
    if which == 'A1':
        return [QQ((1 if n % 2 else -1) * (n + 1), 2 ** n) for n in range(N + 1)]
    if which == 'B1':
        out = []
        for m in range(N + 1):
            if m % 2:
                k = (m + 1) // 2
                out.append(QQ(k, 8 ** (k - 1)))
            else:
                out.append(QQ(0))
        return out
    if which == 'B2':
        low = {0: QQ(-1), 1: QQ(-3, 4), 2: QQ(-17, 64)}
        out = []
        for m in range(N + 1):
            if m % 2:
                out.append(QQ(0))
                continue
            k = m // 2
            out.append(low[k] if k in low else -QQ(13, 35 ** 2) * QQ((2 * k + 1) ** 2, 2 ** (3 * (k - 2))))
        return out
    raise ValidationError(f'unknown generating function {which!r}')


def epsilon_coefficient(an: LaurentRatPoly, order: int) -> Any:
    """[eps^order] of a_n at a0 = -(1 - eps)^(1/3), exactly."""
    total = QQ(0)
    for j, c in an.coeffs.items():
        expo = QQ(j, 3)
        binom = QQ(1)
        for i in range(order):
            binom *= (expo - i)
        binom /= math.factorial(order)
        sign = -1 if (j + order) % 2 else 1
        total += sign * c * binom
    return total


def genfun_crosscheck(which: str, N: int, table: Optional[CoeffTable] = None) -> Dict[str, Any]:
    """Compare a generating-function sequence with values read off the exact table or P_n."""
    table = table or taylor_coeffs('exact', max(N, 1))
    table.require(N)
    seq = genfun_coeffs(which, N)
    mismatches = []
    if which in ('g1', 'g2'):
        order = 1 if which == 'g1' else 2
        for n in range(1, N + 1):
            ref = epsilon_coefficient(table.a[n], order)
            if ref != seq[n]:
                mismatches.append({'n': n, 'sequence': str(seq[n]), 'table': str(ref)})
        if which == 'g2':
            for n in range(1, N + 1):
                if g2_closed_form(n) != seq[n]:
                    mismatches.append({'n': n, 'closed_form': str(g2_closed_form(n))})
    elif which == 'A1':
        for n in range(1, N + 1):
            P = extract_Pn(n, table).poly
            ref = QQ((-1) ** (n - 1) * kappa(n) * _coeff(P, P.degree()), math.factorial(n) ** 2)
            if ref != seq[n]:
                mismatches.append({'n': n, 'sequence': str(seq[n]), 'table': str(ref)})
    elif which in ('B1', 'B2'):
        for m in range(1, N + 1):
            if (which == 'B1') != bool(m % 2):
                continue
            P = extract_Pn(m, table).poly
            ref = QQ(kappa(m) * _coeff(P, 0), math.factorial(m) ** 2)
            if which == 'B2':
                ref = -ref
            if ref != seq[m]:
                mismatches.append({'n': m, 'sequence': str(seq[m]), 'table': str(ref)})
    else:
        raise ValidationError(f'unknown generating function {which!r}')
    return {'which': which, 'N': N, 'valid': not mismatches, 'errors': mismatches or None}


def genfun_closed_form(which: str, r: Any, digits: Optional[int] = None) -> ComplexHP:
    """g1(r) = (1 - I0(2 sqrt(3r)))/3; 'g1_series' sums the coefficient series instead."""
    rr = ComplexHP.of(r, digits)
    d = rr.digits
    if which == 'g1':
        with mpmath.workdps(d + 5):
            arg = 2 * mpmath.sqrt(3 * rr.value)
        i0 = bessel_modified('I0', ComplexHP(arg, d))
        with mpmath.workdps(d):
            return ComplexHP((1 - i0.value) / 3, d)
    raise ValidationError(f'no closed form for {which!r}')


def g2_ode_residual(r: Any, N: int = 80, digits: Optional[int] = None) -> mpf:
    """|(r g2')' - 3 g2 + 1/3 - I1(2 sqrt(3r))^2/3| using the recurrence series."""
    rr = ComplexHP.of(r, digits)
    d = rr.digits
    c = genfun_coeffs('g2', N)
    i1 = bessel_modified('I1', rr.apply(lambda v: 2 * mpmath.sqrt(3 * v)))
    with mpmath.workdps(d + 10):
        x = rr.value
        g = mpc(0)
        lhs = mpc(0)
        for k in range(1, N + 1):
            ck = mpf(int(c[k].numerator)) / int(c[k].denominator)
            g += ck * x ** k
            lhs += ck * k * k * x ** (k - 1)
        res = lhs - 3 * g + mpf(1) / 3 - i1.value ** 2 / 3
        return abs(res)


# --- radius -------------------------------------------------------------------------

def radius_bound(a0: Any, digits: Optional[int] = None) -> Tuple[mpf, mpf]:
    """
    Bound constants with |a_n| < N R^n / n^2.

    Returns:
        (N, R) with N = |a0|/16 and R = max{16N, 6|a0|, (|a0|^3 + 1)/(|a0| N)}
    """
    a = ComplexHP.of(a0, digits)
    if a.is_zero():
        raise ZeroA0Error('a0 = -H(0) must be nonzero')
    with mpmath.workdps(a.digits):
        m = abs(a.value)
        N = m / 16
        R = max(16 * N, 6 * m, (m ** 3 + 1) / (m * N))
    return N, R


def bound_holds(table: CoeffTable) -> Dict[str, Any]:
    """Check |a_n| < N R^n / n^2 on a numeric table."""
    if table.mode != 'numeric':
        raise ValidationError('bound check needs a numeric table')
    N, R = radius_bound(table.a0)
    failures = []
    with mpmath.workdps(table.a0.digits):
        for n in range(1, table.order + 1):
            if not abs(table.a[n].value) < N * R ** n / n ** 2:
                failures.append(n)
    return {'valid': not failures, 'errors': failures or None, 'N': str(N), 'R': str(R)}


def small_r_expansion(H0: Any, r: Any, digits: Optional[int] = None) -> ComplexHP:
    """Two-term behavior H0 + (H0^2 - 1/H0) r near the origin."""
    h0 = ComplexHP.of(H0, digits)
    if h0.is_zero():
        raise ZeroA0Error('H(0) must be nonzero')
    with mpmath.workdps(h0.digits):
        x = h0.value
        rr = ComplexHP.of(r, h0.digits).value
        return ComplexHP(x + (x * x - 1 / x) * rr, h0.digits)
