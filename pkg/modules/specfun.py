"""
Configurable-precision special functions for the dP3 toolkit.

Provides the complex number type used throughout (ComplexHP), the complex
gamma function (Spouge approximation with reflection), the modified Bessel
functions I0, I1 and K0, Chebyshev polynomials of the first kind, and a
branch tracker for analytically continuing the logarithm along sampled paths.
All evaluations run inside an mpmath working-precision context, so callers
never touch the global mpmath state.
"""

import logging
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import mpmath
from mpmath import mpc, mpf
import sympy

from modules.exceptions import (
    BranchStepError,
    GammaPoleError,
    PrecisionUnreachableError,
    ValidationError,
)

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 50
MIN_DIGITS = 16
SERIES_RADIUS = 30
MAX_SERIES_TERMS = 200000

_NUMBER = r'(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?'
_TERM = re.compile(r'([+-]?)(' + _NUMBER + r'(?:/' + _NUMBER + r')?)?\*?([ij]?)')


def default_digits() -> int:
    """Working precision from DP3_DIGITS, falling back to 50."""
    raw = os.environ.get('DP3_DIGITS')
    if raw is None:
        return DEFAULT_DIGITS
    try:
        digits = int(raw)
    except ValueError as e:
        raise ValidationError(f'DP3_DIGITS must be an integer, got {raw!r}') from e
    if digits < MIN_DIGITS:
        raise ValidationError(f'DP3_DIGITS must be >= {MIN_DIGITS}', {'digits': digits})
    return digits


def _parse_real(token: str, digits: int) -> mpf:
    with mpmath.workdps(digits + 5):
        if '/' in token:
            num, den = token.split('/')
            return mpf(num) / mpf(den)
        return mpf(token)


def parse_complex(text: str, digits: int) -> mpc:
    """Parse strings such as '-0.148+0.191i', '-1/30-i', '60-100i', 'i', '1e-8'."""
    s = text.replace(' ', '').replace('I', 'i').replace('J', 'j')
    if not s:
        raise ValidationError('empty complex literal')
    with mpmath.workdps(digits + 5):
        re_part = mpf(0)
        im_part = mpf(0)
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if m is None or m.end() == pos or (m.group(2) is None and not m.group(3)):
                raise ValidationError(f'cannot parse complex literal {text!r}', {'position': pos})
            sign = -1 if m.group(1) == '-' else 1
            value = _parse_real(m.group(2), digits) if m.group(2) else mpf(1)
            if m.group(3):
                im_part += sign * value
            else:
                re_part += sign * value
            pos = m.end()
            if pos < len(s) and s[pos] not in '+-':
                raise ValidationError(f'cannot parse complex literal {text!r}', {'position': pos})
        return mpc(re_part, im_part)


def _decimal(x: mpf, digits: int) -> str:
    return mpmath.nstr(x, digits + 3, min_fixed=-5, max_fixed=digits)


@dataclass(frozen=True)
class ComplexHP:
    """Complex number with an explicit decimal working precision."""

    value: mpc
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValidationError(f'digits must be an integer >= {MIN_DIGITS}', {'digits': self.digits})
        with mpmath.workdps(self.digits):
            v = mpc(self.value)
        if not (mpmath.isfinite(v.real) and mpmath.isfinite(v.imag)):
            raise ValidationError('non-finite complex value', {'value': str(v)})
        object.__setattr__(self, 'value', v)

    @classmethod
    def of(cls, x: Any, digits: Optional[int] = None) -> 'ComplexHP':
        """Coerce strings, numbers, fractions, sympy rationals and mpmath values."""
        if isinstance(x, ComplexHP):
            return x if digits is None or digits == x.digits else cls(x.value, digits)
        d = digits if digits is not None else DEFAULT_DIGITS
        if isinstance(x, str):
            return cls(parse_complex(x, d), d)
        with mpmath.workdps(d + 5):
            if isinstance(x, Fraction):
                v = mpc(mpf(x.numerator) / x.denominator)
            elif isinstance(x, sympy.Basic):
                re_, im_ = sympy.re(x), sympy.im(x)
                v = mpc(mpmath.mpmathify(sympy.N(re_, d + 5)), mpmath.mpmathify(sympy.N(im_, d + 5)))
            elif hasattr(x, 'numerator') and hasattr(x, 'denominator') and not isinstance(x, (int, float)):
                v = mpc(mpf(int(x.numerator)) / int(x.denominator))
            else:
                v = mpc(x)
        return cls(v, d)

    @property
    def re(self) -> mpf:
        return self.value.real

    @property
    def im(self) -> mpf:
        return self.value.imag

    def _binary(self, other: Any, op) -> 'ComplexHP':
        o = other if isinstance(other, ComplexHP) else ComplexHP.of(other, self.digits)
        d = min(self.digits, o.digits)
        with mpmath.workdps(d):
            return ComplexHP(op(self.value, o.value), d)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __pow__(self, other):
        return self._binary(other, lambda a, b: a ** b)

    def __neg__(self):
        with mpmath.workdps(self.digits + 5):
            return ComplexHP(-self.value, self.digits)

    def __abs__(self) -> mpf:
        with mpmath.workdps(self.digits):
            return abs(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def apply(self, fn) -> 'ComplexHP':
        """Evaluate an mpmath function at this value's precision."""
        with mpmath.workdps(self.digits):
            return ComplexHP(fn(self.value), self.digits)

    def conj(self) -> 'ComplexHP':
        with mpmath.workdps(self.digits + 5):
            return ComplexHP(mpmath.conj(self.value), self.digits)

    def sqrt(self) -> 'ComplexHP':
        return self.apply(mpmath.sqrt)

    def exp(self) -> 'ComplexHP':
        return self.apply(mpmath.exp)

    def log(self) -> 'ComplexHP':
        if self.is_zero():
            raise ValidationError('logarithm of zero')
        return self.apply(mpmath.log)

    def is_zero(self) -> bool:
        return self.value == 0

    def close_to(self, other: Any, tol: Any) -> bool:
        o = ComplexHP.of(other, self.digits)
        with mpmath.workdps(min(self.digits, o.digits)):
            return abs(self.value - o.value) <= mpf(tol)

    def __str__(self) -> str:
        sign = '-' if self.im < 0 else '+'
        return f'{_decimal(self.re, self.digits)}{sign}{_decimal(abs(self.im), self.digits)}i'

    def to_json(self) -> Dict[str, str]:
        return {
            're': _decimal(self.re, self.digits),
            'im': _decimal(self.im, self.digits),
            'digits': str(self.digits),
        }

    @classmethod
    def from_json(cls, data: Dict[str, str]) -> 'ComplexHP':
        digits = int(data.get('digits', DEFAULT_DIGITS))
        with mpmath.workdps(digits + 5):
            return cls(mpc(mpf(data['re']), mpf(data['im'])), digits)


def as_mpc(x: Any, digits: int) -> mpc:
    if isinstance(x, ComplexHP):
        return x.value
    return ComplexHP.of(x, digits).value


# --- gamma -------------------------------------------------------------------

def spouge_parameter(digits: int) -> int:
    """Spouge's a: relative error below (2*pi)^-(a+1/2) reaches 10^-(digits+5)."""
    return math.ceil((digits + 5) * math.log(10) / math.log(2 * math.pi)) + 1


@lru_cache(maxsize=32)
def _spouge_coefficients(digits: int) -> Tuple[mpf, ...]:
    a = spouge_parameter(digits)
    # the coefficient sum cancels about digits decimal places
    with mpmath.workdps(2 * digits + 20):
        coeffs = [mpmath.sqrt(2 * mpmath.pi)]
        fact = mpf(1)
        for k in range(1, a):
            if k > 1:
                fact *= (k - 1)
            c = (-1) ** (k - 1) / fact * mpf(a - k) ** (k - mpf(1) / 2) * mpmath.exp(a - k)
            coeffs.append(c)
    return tuple(coeffs)


def _gamma_spouge(z: mpc, digits: int) -> mpc:
    """Gamma(z) for Re z >= 1/2 via Gamma(w + 1) with w = z - 1."""
    coeffs = _spouge_coefficients(digits)
    a = len(coeffs)
    w = z - 1
    s = coeffs[0]
    for k in range(1, a):
        s += coeffs[k] / (w + k)
    return (w + a) ** (w + mpf(1) / 2) * mpmath.exp(-w - a) * s


def gamma_complex(z: Any, digits: Optional[int] = None) -> ComplexHP:
    """
    Complex gamma function at the working precision of z.

    Args:
        z: argument (ComplexHP or anything ComplexHP.of accepts)
        digits: precision override

    Returns:
        Gamma(z) as ComplexHP

    Raises:
        GammaPoleError: z is a nonpositive integer
    """
    zz = ComplexHP.of(z, digits)
    d = zz.digits
    with mpmath.workdps(d + 10):
        v = zz.value
        if v.imag == 0 and v.real <= 0 and v.real == mpmath.floor(v.real):
            raise GammaPoleError('gamma has a pole at nonpositive integers', {'z': str(zz)})
        if v.real < mpf(1) / 2:
            result = mpmath.pi / (mpmath.sin(mpmath.pi * v) * _gamma_spouge(1 - v, d))
        else:
            result = _gamma_spouge(v, d)
    return ComplexHP(result, d)


def gamma_mp(z: mpc, digits: int) -> mpc:
    """Raw-mpc convenience wrapper used inside formula evaluators."""
    return gamma_complex(ComplexHP(z, digits)).value


# --- modified Bessel functions -----------------------------------------------

def _bessel_series(kind: str, x: mpc, digits: int) -> mpc:
    guard = int(2 * float(abs(x)) / math.log(10)) + 10
    with mpmath.workdps(digits + guard):
        x = mpc(x)
        q = x * x / 4
        eps = mpf(10) ** (-(digits + 5))
        term = mpc(1) if kind != 'I1' else x / 2
        total = term
        harmonic = mpf(0)
        k_total = mpc(0)
        k = 0
        while True:
            k += 1
            if k > MAX_SERIES_TERMS:
                raise PrecisionUnreachableError('Bessel series did not converge',
                                                {'kind': kind, 'x': str(x), 'digits': digits})
            if kind == 'I1':
                term = term * q / (k * (k + 1))
            else:
                term = term * q / (k * k)
            total += term
            if kind == 'K0':
                harmonic += mpf(1) / k
                k_total += term * harmonic
            if k > abs(x) and abs(term) * (1 + harmonic) <= eps * abs(total):
                break
        if kind == 'K0':
            return -(mpmath.log(x / 2) + mpmath.euler) * total + k_total
        return total


def _bessel_asymptotic(kind: str, x: mpc, digits: int) -> Optional[mpc]:
    nu = 1 if kind == 'I1' else 0
    with mpmath.workdps(digits + 10):
        x = mpc(x)
        eps = mpf(10) ** (-(digits + 5))
        mu = 4 * nu * nu
        terms = [mpc(1)]
        a_k = mpf(1)
        k = 0
        while True:
            k += 1
            a_next = a_k * (mu - (2 * k - 1) ** 2) / (k * 8)
            t = a_next / x ** k
            if abs(t) > abs(terms[-1]):
                return None
            terms.append(t)
            a_k = a_next
            if abs(t) <= eps:
                break
        plus = mpmath.fsum(terms)
        alt = mpmath.fsum(t * (-1) ** j for j, t in enumerate(terms))
        root = mpmath.sqrt(2 * mpmath.pi * x)
        if kind == 'K0':
            return mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.exp(-x) * plus
        sign = 1 if x.imag >= 0 else -1
        phase = mpmath.exp(sign * nu * mpmath.pi * 1j)
        return mpmath.exp(x) / root * alt + sign * 1j * phase * mpmath.exp(-x) / root * plus


def bessel_modified(kind: str, x: Any, digits: Optional[int] = None) -> ComplexHP:
    """
    Modified Bessel functions I0, I1 and K0 (principal branch, cut on the negative axis).

    Args:
        kind: 'I0', 'I1' or 'K0'
        x: argument
        digits: precision override

    Returns:
        Function value as ComplexHP

    Raises:
        ValidationError: unknown kind, or K0 at zero or on its branch cut
        PrecisionUnreachableError: neither the series nor the expansion converges
    """
    if kind not in ('I0', 'I1', 'K0'):
        raise ValidationError(f'unknown Bessel kind {kind!r}')
    xx = ComplexHP.of(x, digits)
    d = xx.digits
    v = xx.value
    if kind == 'K0' and (v == 0 or (v.imag == 0 and v.real < 0)):
        raise ValidationError('K0 is undefined at zero and on the negative real axis', {'x': str(xx)})
    if abs(v) > SERIES_RADIUS:
        result = _bessel_asymptotic(kind, v, d)
        if result is None:
            logger.debug('asymptotic Bessel expansion short of %d digits at |x|=%s, using series',
                         d, mpmath.nstr(abs(v), 8))
            result = _bessel_series(kind, v, d)
    else:
        result = _bessel_series(kind, v, d)
    return ComplexHP(result, d)


# --- Chebyshev ---------------------------------------------------------------

def chebyshev_T(n: int, mode: str = 'value', x: Any = None,
                digits: Optional[int] = None) -> Union[ComplexHP, sympy.Poly]:
    """
    Chebyshev polynomial of the first kind by the three-term recurrence.

    Args:
        n: degree, n >= 0
        mode: 'value' (evaluate at x) or 'integer_poly' (exact Poly over ZZ in x)
        x: evaluation point for value mode

    Returns:
        ComplexHP in value mode, sympy Poly in integer_poly mode
    """
    if not isinstance(n, int) or n < 0:
        raise ValidationError('Chebyshev degree must be a nonnegative integer', {'n': n})
    if mode == 'integer_poly':
        xs = sympy.Symbol('x')
        prev, cur = sympy.Poly(1, xs, domain='ZZ'), sympy.Poly(xs, xs, domain='ZZ')
        if n == 0:
            return prev
        two_x = sympy.Poly(2 * xs, xs, domain='ZZ')
        for _ in range(n - 1):
            prev, cur = cur, two_x * cur - prev
        return cur
    if mode != 'value':
        raise ValidationError(f'unknown Chebyshev mode {mode!r}')
    xx = ComplexHP.of(x, digits)
    with mpmath.workdps(xx.digits + 5):
        prev, cur = mpc(1), xx.value
        if n == 0:
            return ComplexHP(prev, xx.digits)
        for _ in range(n - 1):
            prev, cur = cur, 2 * xx.value * cur - prev
    return ComplexHP(cur, xx.digits)


def chebyshev_sympy(n: int, s: sympy.Expr) -> sympy.Expr:
    """T_n composed with an arbitrary sympy expression, exact."""
    poly = chebyshev_T(n, mode='integer_poly')
    return sympy.expand(poly.as_expr().subs(sympy.Symbol('x'), s))


# --- branch-continuous logarithm ---------------------------------------------

@dataclass(frozen=True)
class BranchTracker:
    """Analytic continuation state of log along a sampled path."""

    current_value: ComplexHP
    last_argument: ComplexHP
    winding: int = 0

    @classmethod
    def start(cls, z: Any, digits: Optional[int] = None) -> 'BranchTracker':
        zz = ComplexHP.of(z, digits)
        if zz.is_zero():
            raise ValidationError('logarithm path cannot start at zero')
        return cls(zz.log(), zz, 0)

    def to_json(self) -> Dict[str, Any]:
        return {
            'current_value': self.current_value.to_json(),
            'last_argument': self.last_argument.to_json(),
            'winding': self.winding,
        }


def continuous_log(tracker: BranchTracker, next_value: Any,
                   tol: float = 1e-9) -> Tuple[BranchTracker, ComplexHP]:
    """
    Continue log from tracker.last_argument to next_value.

    Args:
        tracker: current branch state
        next_value: next sample of the path
        tol: margin below pi for the allowed argument jump

    Returns:
        (new tracker, continued logarithm at next_value)

    Raises:
        BranchStepError: consecutive samples differ in argument by pi - tol or more
    """
    d = tracker.current_value.digits
    nxt = ComplexHP.of(next_value, d)
    if nxt.is_zero():
        raise ValidationError('logarithm path hits zero')
    with mpmath.workdps(d + 5):
        step = mpmath.log(nxt.value / tracker.last_argument.value)
        if abs(step.imag) >= mpmath.pi - tol:
            raise BranchStepError('argument step too large for continuous logarithm',
                                  {'from': str(tracker.last_argument), 'to': str(nxt),
                                   'step': mpmath.nstr(step.imag, 12)})
        current = tracker.current_value.value + step
        winding = tracker.winding
        on_cut = nxt.value.imag == 0 and nxt.value.real < 0
        if not on_cut:
            winding = int(mpmath.nint((current.imag - mpmath.arg(nxt.value)) / (2 * mpmath.pi)))
    value = ComplexHP(current, d)
    return BranchTracker(value, nxt, winding), value


def unwrap_logs(path: Iterable[Any], digits: Optional[int] = None,
                tol: float = 1e-9) -> List[ComplexHP]:
    """Continuous logarithm along a whole sampled path, starting on the principal branch."""
    it = iter(path)
    try:
        first = next(it)
    except StopIteration:
        return []
    tracker = BranchTracker.start(first, digits)
    out = [tracker.current_value]
    for z in it:
        tracker, value = continuous_log(tracker, z, tol)
        out.append(value)
    return out
