"""
Algebroid solutions of the m- and n-series.

Labels: p = -m (m >= 1) for the m-series, p = n (n >= 1) for the n-series,
p = 0 for H itself. Every H_p is normalized with H_p(0) = -a0 and solves

    m-series:  H (x H')' - x H'^2 = 2 H^3 - 2 x^m
    n-series:  H (x H')' - x H'^2 = x^n H^3 - 1

(the logarithmic forms (x H'/H)' = ... multiplied by x H^2). The branch
functions f_q use the normalized variable z = x^P, P the branch count, so
v = x^s H_p(x) = sum_q x^q f_q(z) with the shift s = n + 1 (n-series, H)
or s = 1 (m-series).
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from modules.exceptions import (
    AnsatzMismatchError,
    DeterminantCapError,
    OrderTooShortError,
    SingularTruncationError,
    UnsupportedLabelError,
    ValidationError,
    ZeroA0Error,
)
from modules.series import CoeffTable, LaurentRatPoly, evaluate_series, taylor_coeffs, to_rat
from modules.specfun import ComplexHP, DEFAULT_DIGITS

logger = logging.getLogger(__name__)

SYMBOLIC_CAP = 8
NUMERIC_CAP = 12
MAX_TRUNCATION_GROWTH = 8

Z = sympy.Symbol('z')
W = sympy.Symbol('w')


def _check_label(p: Any) -> int:
    if isinstance(p, bool) or not isinstance(p, int):
        raise UnsupportedLabelError(f'label must be an integer, got {p!r}')
    return p


# --- families ---------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebroidFamily:
    """One class of algebroid solutions, y ~ -a0 t^(1-4 rho) as t -> 0."""

    label: Optional[int]
    alpha: Any
    two_rho: Any

    def __post_init__(self):
        if not 0 < self.two_rho < 1:
            raise ValidationError('branching 2*rho must lie in (0, 1)', {'two_rho': str(self.two_rho)})

    @classmethod
    def from_pair(cls, n: int, m: int, label: Optional[int] = None) -> 'AlgebroidFamily':
        if n < 0 or m < 0:
            raise ValidationError('(n, m) must be nonnegative', {'n': n, 'm': m})
        return cls(label, QQ(m + 2 * n + 3, 4), QQ(m + 1, m + 1 + 2 * (n + 1)))

    @classmethod
    def from_label(cls, p: int) -> 'AlgebroidFamily':
        p = _check_label(p)
        if p >= 0:
            return cls.from_pair(p, 0, label=p)
        return cls.from_pair(0, -p, label=p)

    @property
    def q(self) -> Any:
        return q_from_rho(self.two_rho)

    def to_json(self) -> Dict[str, Any]:
        return {'label': self.label, 'alpha': str(self.alpha), 'two_rho': str(self.two_rho)}


def rho_from_q(q: Any) -> Any:
    """2 rho = 1 / (1 + 2 q)."""
    q = to_rat(q)
    if q <= 0:
        raise ValidationError('q must be a positive rational', {'q': str(q)})
    return QQ(1) / (1 + 2 * q)


def q_from_rho(two_rho: Any) -> Any:
    two_rho = to_rat(two_rho)
    return (1 / two_rho - 1) / 2


def group_law(two_rho1: Any, two_rho2: Any) -> Any:
    """2 rho_3 from 1/(2 rho_3) - 1 = (1/(2 rho_1) - 1)(1/(2 rho_2) - 1) / 2."""
    x1 = 1 / to_rat(two_rho1) - 1
    x2 = 1 / to_rat(two_rho2) - 1
    return QQ(1) / (1 + x1 * x2 / 2)


def group_law_q(q1: Any, q2: Any) -> Any:
    """Product of two families expressed through their q labels."""
    return q_from_rho(group_law(rho_from_q(q1), rho_from_q(q2)))


def branch_period(p: int) -> Tuple[int, int]:
    """
    Branch count P and the power k of t in the branch variable.

    n-series and H: P = 2n + 3, z ~ t^4. m-series: P depends on (m + 3) mod 4
    with P / k = (m + 3) / 4.
    """
    p = _check_label(p)
    if p >= 0:
        return 2 * p + 3, 4
    m3 = 3 - p
    if m3 % 2:
        return m3, 4
    if m3 % 4 == 2:
        return m3 // 2, 2
    return m3 // 4, 1


def branch_shift(p: int) -> int:
    return p + 1 if p >= 0 else 1


def scaling_constant(p: int, digits: Optional[int] = None) -> mpf:
    """
    Positive root c of alpha^2 c^((m+3)/3) = 2 (m-series) or
    alpha^2 c^((2n+3)/3) = 1 (n-series, H), alpha = (m + 2n + 3)/4.
    """
    p = _check_label(p)
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 10):
        if p >= 0:
            alpha = mpf(2 * p + 3) / 4
            return (1 / alpha ** 2) ** (mpf(3) / (2 * p + 3))
        m = -p
        alpha = mpf(m + 3) / 4
        return (2 / alpha ** 2) ** (mpf(3) / (m + 3))


# --- Taylor coefficients of H_p ----------------------------------------------------

def _rhs(label: int, cubes: List[Any], K: int, zero: Any) -> Any:
    if label < 0:
        out = 2 * cubes[K]
        if K == -label:
            out = out - 2
        return out
    out = cubes[K - label] if K >= label else zero
    if K == 0:
        out = out - 1
    return out


def _extend(label: int, h: List[Any], sq: List[Any], cubes: List[Any], N: int,
            zero: Any, divide) -> None:
    """Grow h (and the running H^2, H^3 coefficients) to index N."""
    while len(h) <= N:
        K = len(h) - 1
        rest = zero
        for j in range(K):
            rest = rest + (j + 1) ** 2 * (h[j + 1] * h[K - j])
        for a in range(1, K + 1):
            rest = rest - a * (K + 1 - a) * (h[a] * h[K + 1 - a])
        h.append(divide(_rhs(label, cubes, K, zero) - rest, K))
        K1 = K + 1
        s = zero
        for i in range(K1 + 1):
            s = s + h[i] * h[K1 - i]
        sq.append(s)
        c = zero
        for i in range(K1 + 1):
            c = c + h[i] * sq[K1 - i]
        cubes.append(c)


class _ExactLabelTable:
    def __init__(self, label: int):
        self.label = label
        self._lock = threading.Lock()
        h0 = LaurentRatPoly({1: -1})
        self.h: List[LaurentRatPoly] = [h0]
        self.sq: List[LaurentRatPoly] = [h0 * h0]
        self.cubes: List[LaurentRatPoly] = [h0 * h0 * h0]

    def extend(self, N: int) -> Tuple[LaurentRatPoly, ...]:
        with self._lock:
            def divide(x, K):
                return x.shift(-1).scale(QQ(-1, (K + 1) ** 2))

            _extend(self.label, self.h, self.sq, self.cubes, N, LaurentRatPoly(), divide)
            return tuple(self.h[:N + 1])


_EXACT_TABLES: Dict[int, _ExactLabelTable] = {}
_EXACT_LOCK = threading.Lock()


def _exact_table(label: int) -> _ExactLabelTable:
    with _EXACT_LOCK:
        if label not in _EXACT_TABLES:
            _EXACT_TABLES[label] = _ExactLabelTable(label)
        return _EXACT_TABLES[label]


def recurrence_coeffs(label: int, N: int, a0: Any = None, digits: Optional[int] = None) -> CoeffTable:
    """
    Taylor coefficients of H_label from the recurrence obtained by coefficient
    extraction in the polynomial form of the ODE.

    Works for every label, including 0, where it reproduces the table of
    modules.series.

    Args:
        label: family label p
        N: order
        a0: None for exact Laurent polynomials in a0, otherwise the numeric a0
        digits: working precision for numeric mode

    Returns:
        CoeffTable with a[0] = a0 and H_label(0) = -a0
    """
    label = _check_label(label)
    if not isinstance(N, int) or N < 1:
        raise ValidationError('order N must be a positive integer', {'N': N})
    if a0 is None:
        h = _exact_table(label).extend(N)
        return CoeffTable('exact', N, (LaurentRatPoly.a0(),) + tuple(h[1:]))
    a0hp = ComplexHP.of(a0, digits)
    if a0hp.is_zero():
        raise ZeroA0Error('a0 = -H_p(0) must be nonzero')
    d = a0hp.digits
    with mpmath.workdps(d + 10):
        h0 = -a0hp.value
        h: List[mpc] = [h0]
        sq: List[mpc] = [h0 * h0]
        cubes: List[mpc] = [h0 ** 3]
        _extend(label, h, sq, cubes, N, mpc(0), lambda x, K: x / ((K + 1) ** 2 * h0))
        values = (a0hp,) + tuple(ComplexHP(v, d) for v in h[1:])
    return CoeffTable('numeric', N, values, a0hp)


def hp_coeffs(p: int, a0_mode: Any, N: int, digits: Optional[int] = None) -> CoeffTable:
    """
    CoeffTable for H_p.

    a0_mode is 'exact' for Laurent polynomials in a0, or a numeric a0. In
    exact mode the structural form of the coefficients is verified. Label 0
    delegates to modules.series.

    Raises:
        ZeroA0Error: a0 = 0
        AnsatzMismatchError: exact coefficients violate the structural form
    """
    p = _check_label(p)
    exact = isinstance(a0_mode, str) and a0_mode == 'exact'
    if p == 0:
        if exact:
            return taylor_coeffs('exact', N)
        return taylor_coeffs('numeric', N, a0_mode, digits)
    if exact:
        table = recurrence_coeffs(p, N)
        report = verify_structure(p, table)
        if not report['valid']:
            raise AnsatzMismatchError(f'coefficients of H_{p} violate the structural form',
                                      {'errors': report['errors'][:10]})
        for anomaly in report['anomalies']:
            logger.warning('H_%d: %s', p, anomaly)
        return table
    return recurrence_coeffs(p, N, a0_mode, digits)


def ode_residual_series(p: int, table: CoeffTable) -> List[Any]:
    """
    Coefficients of H(xH')' - xH'^2 - RHS for the truncated series through
    x^(order-1); they vanish identically for a correct table.
    """
    p = _check_label(p)
    N = table.order
    if table.mode == 'exact':
        h = [-table.a[0]] + list(table.a[1:])
        zero: Any = LaurentRatPoly()
    else:
        h = [-table.a[0].value] + [c.value for c in table.a[1:]]
        zero = mpc(0)
    sq = []
    cubes = []
    for K in range(N):
        s = zero
        for i in range(K + 1):
            s = s + h[i] * h[K - i]
        sq.append(s)
        c = zero
        for i in range(K + 1):
            c = c + h[i] * sq[K - i]
        cubes.append(c)
    out = []
    for K in range(N):
        lhs = zero
        for j in range(K + 1):
            lhs = lhs + (j + 1) ** 2 * (h[j + 1] * h[K - j])
        for a in range(1, K + 1):
            lhs = lhs - a * (K + 1 - a) * (h[a] * h[K + 1 - a])
        out.append(lhs - _rhs(p, cubes, K, zero))
    return out


# --- coefficient structure -----------------------------------------------------------

def partition_set(k: int, n: int) -> Tuple[List[Tuple[int, int]], int]:
    """
    All pairs (m_j, l_j) with k = (n + 1) m_j + l_j and 0 <= l_j <= m_j + 1.

    Returns:
        (pairs ordered by decreasing m_j, number of pairs)
    """
    if k < 1 or n < 1:
        raise ValidationError('partition_set needs k >= 1 and n >= 1', {'k': k, 'n': n})
    pairs = []
    for m in range(k // (n + 1), -1, -1):
        l = k - (n + 1) * m
        if 0 <= l <= m + 1:
            pairs.append((m, l))
    return pairs, len(pairs)


def partition_cardinality(k: int, n: int) -> int:
    return (k + 2 * n + 2) // (n + 1) - (k + 2 * n + 2) // (n + 2)


def _expected_exponents(p: int, k: int) -> Tuple[Dict[int, Any], List[int]]:
    """(fixed exponent -> coefficient, free exponents) for a_k of H_p."""
    if p < 0:
        m = -p
        fixed = {k + 1: QQ((-1) ** (k + 1) * (k + 1))}
        free = [k + 1 - (m + 3) * l for l in range(1, (k + 1) // (m + 2) + 1)]
        return fixed, free
    pairs, _ = partition_set(k, p)
    return {}, [m + 1 - 2 * l for m, l in pairs]


def verify_structure(p: int, table: CoeffTable) -> Dict[str, Any]:
    """
    Check exact coefficients against the closed structural forms.

    m-series: a_k = (-1)^(k+1) (k+1) a0^(k+1) + sum_l r_l a0^(k+1-(m+3)l).
    n-series: a_k = sum over partitions gamma a0^(m_j+1-2l_j), gamma_{0,1} = 1.

    A structurally allowed term that comes out zero is reported as an
    anomaly, not an error.
    """
    p = _check_label(p)
    if p == 0:
        raise UnsupportedLabelError('label 0 is checked through series.identity_check')
    if table.mode != 'exact':
        raise ValidationError('structure verification needs an exact table')
    errors: List[str] = []
    anomalies: List[str] = []
    for k in range(1, table.order + 1):
        coeff = table.a[k]
        fixed, free = _expected_exponents(p, k)
        rest = dict(coeff.coeffs)
        for e, c in fixed.items():
            if rest.get(e) != c:
                errors.append(f'a_{k}: coefficient of a0^{e} is {rest.get(e)}, expected {c}')
            rest.pop(e, None)
        extra = sorted(set(rest) - set(free))
        if extra:
            errors.append(f'a_{k}: unexpected exponents {extra}')
        for e in free:
            if e not in rest:
                anomalies.append(f'a_{k}: vanishing coefficient at a0^{e}')
        if p > 0 and k == 1 and coeff != LaurentRatPoly({-1: 1}):
            errors.append('a_1 differs from 1/a0')
    return {'valid': not errors, 'errors': errors, 'anomalies': anomalies}


# --- branch functions ---------------------------------------------------------------

def _is_rational(x: Any) -> bool:
    return isinstance(x, (int, Fraction, sympy.Rational)) and not isinstance(x, bool) \
        or type(x) is type(QQ(1))


@dataclass(frozen=True)
class BranchVector:
    """
    Branch functions f_0..f_{P-1} of v = sum_q w^q f_q(w^P), each kept as
    L Taylor coefficients in z = w^P.

    mode is 'numeric' (mpc), 'rational' (QQ) or 'exact' (Laurent polynomials in a0).
    """

    p: int
    fhat: Tuple[Tuple[Any, ...], ...]
    order: int
    mode: str = 'numeric'
    label: Optional[int] = None
    a0: Optional[Any] = None
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if len(self.fhat) != self.p:
            raise ValidationError('one branch function per branch is required',
                                  {'p': self.p, 'count': len(self.fhat)})
        if any(len(f) != self.order for f in self.fhat):
            raise ValidationError('every branch function needs exactly L coefficients')

    @classmethod
    def from_series(cls, series: Sequence[Sequence[Any]], mode: str = 'numeric',
                    digits: Optional[int] = None) -> 'BranchVector':
        """Wrap hand-made series (lists of coefficients) as a BranchVector."""
        d = digits or DEFAULT_DIGITS
        L = min(len(s) for s in series)
        if mode == 'rational':
            fhat = tuple(tuple(to_rat(c) for c in s[:L]) for s in series)
        else:
            with mpmath.workdps(d + 10):
                fhat = tuple(tuple(mpc(c) if not isinstance(c, ComplexHP) else c.value
                                   for c in s[:L]) for s in series)
        return cls(len(series), fhat, L, mode, digits=d)

    def at_zero(self) -> Tuple[Any, ...]:
        return tuple(f[0] for f in self.fhat)

    def nonzero_at_zero(self, tol: Optional[Any] = None) -> List[int]:
        if self.mode == 'numeric':
            if tol is None:
                tol = mpf(10) ** (-(self.digits // 2))
            return [q for q, c in enumerate(self.at_zero()) if abs(c) > tol]
        return [q for q, c in enumerate(self.at_zero()) if c != 0]

    def evaluate(self, z: Any, branch: int = 0) -> mpc:
        """v on the given branch: w = |z|^(1/P) e^(i(arg z + 2 pi branch)/P)."""
        if self.mode == 'exact':
            raise ValidationError('evaluate needs numeric or rational branch functions')
        with mpmath.workdps(self.digits + 10):
            zz = mpmath.mpmathify(z)
            w = mpmath.root(abs(zz), self.p) * mpmath.expj((mpmath.arg(zz) + 2 * mpmath.pi * branch) / self.p)
            return mpmath.fsum(w ** q * _poly_eval(f, zz) for q, f in enumerate(self.fhat))

    def to_json(self) -> Dict[str, Any]:
        def enc(c):
            if self.mode == 'numeric':
                return ComplexHP(c, self.digits).to_json()
            if self.mode == 'rational':
                return str(c)
            return c.to_json()

        return {
            'p': self.p,
            'order': self.order,
            'mode': self.mode,
            'label': self.label,
            'digits': self.digits,
            'fhat': [[enc(c) for c in f] for f in self.fhat],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'BranchVector':
        mode = data['mode']
        if mode == 'numeric':
            fhat = tuple(tuple(ComplexHP.from_json(c).value for c in f) for f in data['fhat'])
        elif mode == 'rational':
            fhat = tuple(tuple(to_rat(c) for c in f) for f in data['fhat'])
        else:
            fhat = tuple(tuple(LaurentRatPoly.from_json(c) for c in f) for f in data['fhat'])
        return cls(int(data['p']), fhat, int(data['order']), mode, data.get('label'),
                   digits=int(data.get('digits', DEFAULT_DIGITS)))


def _poly_eval(coeffs: Sequence[Any], z: Any) -> Any:
    total = mpc(0)
    for c in reversed(coeffs):
        total = total * z + (mpf(int(c.numerator)) / int(c.denominator) if not isinstance(c, (mpc, mpf)) else c)
    return total


def expected_nonzero(p: int) -> List[int]:
    """Indices q with f_q(0) != 0 for generic a0."""
    P, _ = branch_period(p)
    if p >= 0:
        return sorted({p + 1, p + 2, 2 * p + 2})
    return list(range(1, P))


def branch_series(p: int, a0: Any, L: int, table: Optional[CoeffTable] = None,
                  strict: bool = True, digits: Optional[int] = None) -> BranchVector:
    """
    Regroup the Taylor series of H_p into branch functions.

    Args:
        p: family label
        a0: 'exact', a rational a0, or a numeric a0
        L: number of z-coefficients per branch function
        table: optional precomputed coefficients of H_p
        strict: raise when the zero pattern of f_q(0) differs from the
            generic one

    Raises:
        OrderTooShortError: table does not reach index P L - 1 - s
        AnsatzMismatchError: strict and the zero pattern is violated
    """
    p = _check_label(p)
    if L < 1:
        raise ValidationError('L must be positive', {'L': L})
    P, _ = branch_period(p)
    s = branch_shift(p)
    needed = P * L - 1 - s
    if table is not None and table.order < needed:
        raise OrderTooShortError(f'table of order {table.order} is too short for L={L}',
                                 {'order': table.order, 'needed': needed})
    exact = isinstance(a0, str) and a0 == 'exact'
    rational = not exact and _is_rational(a0)
    N = max(needed, 1)
    if table is None:
        table = hp_coeffs(p, 'exact', N) if (exact or rational) else hp_coeffs(p, a0, N, digits)
    if exact:
        mode = 'exact'
        h = [-table.a[0]] + list(table.a[1:])
        zero: Any = LaurentRatPoly()
        d = digits or DEFAULT_DIGITS
        a0_out = None
    elif rational:
        mode = 'rational'
        a0q = to_rat(a0)
        if a0q == 0:
            raise ZeroA0Error('a0 must be nonzero')
        h = [-a0q] + [c.evaluate_exact(a0q) for c in table.a[1:]]
        zero = QQ(0)
        d = digits or DEFAULT_DIGITS
        a0_out = str(a0q)
    else:
        mode = 'numeric'
        h = [-table.a[0].value] + [c.value for c in table.a[1:]]
        zero = mpc(0)
        d = table.a0.digits
        a0_out = table.a0

    def v(j: int) -> Any:
        return h[j - s] if j >= s else zero

    fhat = tuple(tuple(v(q + P * l) for l in range(L)) for q in range(P))
    bv = BranchVector(P, fhat, L, mode, p, a0_out, d)
    if mode != 'exact':
        found = bv.nonzero_at_zero()
        if found != expected_nonzero(p):
            msg = f'f_q(0) nonzero for q in {found}, expected {expected_nonzero(p)}'
            if strict:
                raise AnsatzMismatchError(msg, {'label': p})
            logger.info('branch_series(%d): %s', p, msg)
    return bv


# --- truncated series helpers --------------------------------------------------------

def _ser_mul(a: Sequence[Any], b: Sequence[Any], n: int, zero: Any) -> List[Any]:
    out = [zero] * n
    for i, x in enumerate(a[:n]):
        if _is_zero(x):
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] = out[i + j] + x * b[j]
    return out


def _is_zero(x: Any) -> bool:
    if isinstance(x, LaurentRatPoly):
        return x.is_zero()
    return x == 0


def _zero_like(mode: str) -> Any:
    return {'numeric': mpc(0), 'rational': QQ(0), 'exact': LaurentRatPoly()}[mode]


def _power_rows(bv: BranchVector, nu: int) -> List[List[List[Any]]]:
    """rows[k-1][q] = z-coefficients of f_q^k, from g(w)^k regrouped mod w^nu."""
    zero = _zero_like(bv.mode)
    n = nu * bv.order
    g = [bv.fhat[j % nu][j // nu] for j in range(n)]
    rows = []
    power = list(g)
    for k in range(1, nu + 1):
        if k > 1:
            power = _ser_mul(power, g, n, zero)
        rows.append([[power[q + nu * l] for l in range(bv.order)] for q in range(nu)])
    return rows


# --- F_nu matrices -------------------------------------------------------------------

@dataclass(frozen=True)
class FnuMatrix:
    """
    entries[k-1][q] holds f_q^k: z-coefficients (numeric/rational) or a sympy
    expression in z and the symbols f0..f_{nu-1} (symbolic).
    """

    nu: int
    entries: Tuple[Tuple[Any, ...], ...]
    mode: str
    order: int
    source: Optional[BranchVector] = None


def build_fnu(bv: BranchVector, nu: Optional[int] = None) -> FnuMatrix:
    nu = nu or bv.p
    if nu != bv.p:
        raise ValidationError('nu must equal the branch count of the series', {'nu': nu, 'p': bv.p})
    if nu > NUMERIC_CAP:
        raise DeterminantCapError(f'nu={nu} exceeds the cap {NUMERIC_CAP}')
    rows = _power_rows(bv, nu)
    entries = tuple(tuple(tuple(c) for c in row) for row in rows)
    return FnuMatrix(nu, entries, bv.mode, bv.order, bv)


def fnu_symbols(nu: int) -> Tuple[sympy.Symbol, ...]:
    return sympy.symbols(f'f0:{nu}')


def build_fnu_symbolic(nu: int) -> FnuMatrix:
    """F_nu with the branch functions as independent symbols."""
    if nu > SYMBOLIC_CAP:
        raise DeterminantCapError(f'symbolic determinants are capped at nu={SYMBOLIC_CAP}', {'nu': nu})
    f = fnu_symbols(nu)
    g = sum(W ** q * f[q] for q in range(nu))
    rows = []
    for k in range(1, nu + 1):
        cols = [sympy.Integer(0)] * nu
        for (j,), coeff in sympy.Poly(sympy.expand(g ** k), W).terms():
            cols[j % nu] += coeff * Z ** (j // nu)
        rows.append(tuple(sympy.expand(c) for c in cols))
    return FnuMatrix(nu, tuple(rows), 'symbolic', nu - 1)


def fnu_det_symbolic(nu: int) -> sympy.Poly:
    """det F_nu as a polynomial in z over Z[f0, ..., f_{nu-1}]."""
    F = build_fnu_symbolic(nu)
    dm = DomainMatrix.from_list_sympy(nu, nu, [list(r) for r in F.entries])
    det = dm.domain.to_sympy(dm.det())
    return sympy.Poly(sympy.expand(det), Z)


def _guard_digits(entries, digits: int) -> int:
    norm = mpf(1)
    for row in entries:
        for c in row:
            norm = max(norm, mpmath.fsum(abs(x) for x in c))
    return digits + 15 + int(len(entries) * mpmath.log10(norm))


def _interpolate(F: FnuMatrix, with_adjoint_row: bool = False) -> Tuple[List[mpc], List[List[mpc]]]:
    """
    Coefficients of det F (and of the first row of adj F) by sampling on the
    unit circle and an inverse discrete Fourier transform.
    """
    nu, L = F.nu, F.order
    digits = F.source.digits if F.source is not None else DEFAULT_DIGITS
    dps = _guard_digits(F.entries, digits)
    M = nu * (L - 1) + 1
    dets: List[mpc] = []
    adj: List[List[mpc]] = []
    with mpmath.workdps(dps):
        points = [mpmath.expj(2 * mpmath.pi * j / M) for j in range(M)]
        for z in points:
            A = mpmath.matrix(nu, nu)
            for k in range(nu):
                for q in range(nu):
                    A[k, q] = _poly_eval(F.entries[k][q], z)
            det = mpmath.det(A)
            dets.append(det)
            if with_adjoint_row:
                e0 = mpmath.matrix([1] + [0] * (nu - 1))
                row = mpmath.lu_solve(A.T, e0)
                adj.append([det * row[k] for k in range(nu)])

        def inverse_dft(values):
            return [mpmath.fsum(values[j] * mpmath.expj(-2 * mpmath.pi * j * c / M) for j in range(M)) / M
                    for c in range(M)]

        det_coeffs = inverse_dft(dets)
        adj_coeffs = [inverse_dft([a[k] for a in adj]) for k in range(nu)] if with_adjoint_row else []
    return det_coeffs, adj_coeffs


def _rational_det(F: FnuMatrix) -> List[Any]:
    rows = [[sum((sympy.Rational(int(c.numerator), int(c.denominator)) * Z ** l
                  for l, c in enumerate(F.entries[k][q])), sympy.Integer(0))
             for q in range(F.nu)] for k in range(F.nu)]
    dm = DomainMatrix.from_list_sympy(F.nu, F.nu, rows)
    det = sympy.Poly(sympy.expand(dm.domain.to_sympy(dm.det())), Z)
    return [to_rat(det.coeff_monomial(Z ** j)) for j in range(det.degree() + 1)] if not det.is_zero else [QQ(0)]


def fnu_det(bv: BranchVector, nu: Optional[int] = None, z_mode: str = 'truncated_poly',
            z: Any = None) -> Any:
    """
    Determinant of F_nu built from the branch functions of bv.

    Args:
        bv: branch functions
        nu: matrix size, defaults to (and must equal) bv.p
        z_mode: 'truncated_poly' returns the z-coefficients through z^(L-1);
            'numeric' returns the determinant at the point z
        z: evaluation point for numeric mode

    Raises:
        DeterminantCapError: nu >= 9 for truncated polynomials, nu > 12 numerically
    """
    nu = nu or bv.p
    if z_mode == 'truncated_poly' and nu > SYMBOLIC_CAP:
        raise DeterminantCapError(f'truncated determinants are capped at nu={SYMBOLIC_CAP}', {'nu': nu})
    F = build_fnu(bv, nu)
    if z_mode == 'numeric':
        if z is None:
            raise ValidationError('numeric determinant needs z')
        with mpmath.workdps(bv.digits + 10):
            zz = mpmath.mpmathify(z)
            A = mpmath.matrix(nu, nu)
            for k in range(nu):
                for q in range(nu):
                    A[k, q] = _poly_eval(F.entries[k][q], zz)
            return ComplexHP(mpmath.det(A), bv.digits)
    if z_mode != 'truncated_poly':
        raise ValidationError(f'unknown z_mode {z_mode!r}')
    if bv.mode == 'rational':
        coeffs = _rational_det(F)
    elif bv.mode == 'numeric':
        coeffs, _ = _interpolate(F)
    else:
        raise ValidationError('truncated determinants need numeric or rational branch functions')
    coeffs = list(coeffs[:bv.order])
    coeffs += [_zero_like(bv.mode)] * (bv.order - len(coeffs))
    return coeffs


def _close(a: Any, b: Any, tol: Any) -> bool:
    if isinstance(a, (mpc, mpf)) or isinstance(b, (mpc, mpf)):
        return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b)) <= tol * max(1, abs(mpmath.mpmathify(b)))
    return a == b


def fnu_checks(bv: BranchVector, det: Optional[List[Any]] = None) -> Dict[str, Any]:
    """
    Small-z statements about det F_nu: the value at z = 0 and, when the first
    branch functions vanish at 0, the leading power of z.
    """
    nu = bv.p
    det = det if det is not None else fnu_det(bv)
    f0 = bv.at_zero()
    tol = mpf(10) ** (-(bv.digits - 12)) if bv.mode == 'numeric' else 0
    checks: Dict[str, Dict[str, Any]] = {}
    rhs = f0[0] ** nu * (f0[1] ** (nu * (nu - 1) // 2) if nu > 1 else 1)
    checks['det_at_zero'] = {'lhs': det[0], 'rhs': rhs, 'valid': _close(det[0], rhs, tol)}
    f0_vanishes = _is_zero(f0[0]) or (bv.mode == 'numeric' and abs(f0[0]) <= tol)
    if f0_vanishes and nu > 1 and len(det) > 1:
        rhs = (-1) ** (nu + 1) * f0[1] ** (nu * (nu + 1) // 2)
        checks['first_order_when_f0_vanishes'] = {'lhs': det[1], 'rhs': rhs, 'valid': _close(det[1], rhs, tol)}
    if nu % 2 == 1 and nu >= 3:
        n = (nu - 3) // 2
        lead = (n + 1) ** 2
        vanish = all(_is_zero(c) or (bv.mode == 'numeric' and abs(c) <= tol) for c in f0[:n + 1])
        if vanish and lead < len(det):
            sign = (-1) ** ((n + 1) * (3 * n + 4) // 2)
            rhs = sign * f0[n + 1] ** ((n + 2) * (2 * n + 3))
            below = all(_close(c, 0, tol) for c in det[:lead]) if bv.mode == 'numeric' \
                else all(c == 0 for c in det[:lead])
            checks['leading_order_when_f0_to_fn_vanish'] = {
                'order': lead, 'lhs': det[lead], 'rhs': rhs,
                'valid': below and _close(det[lead], rhs, tol)}
    errors = [name for name, c in checks.items() if not c['valid']]
    return {'valid': not errors, 'errors': errors, 'checks': checks}


def fnu_symbolic_checks(nu: int) -> Dict[str, Any]:
    """Degree bound, large-z leading term, det F(0) and (nu = 3) the factorization."""
    f = fnu_symbols(nu)
    det = fnu_det_symbolic(nu)
    top = nu * (nu - 1) // 2
    errors: List[str] = []
    if det.degree() > top:
        errors.append(f'degree {det.degree()} exceeds {top}')
    lead = sympy.expand(det.coeff_monomial(Z ** top) - (-1) ** top * f[nu - 1] ** (nu * (nu + 1) // 2))
    if lead != 0:
        errors.append('large-z leading term differs')
    at0 = sympy.expand(det.coeff_monomial(1) - f[0] ** nu * f[1] ** top) if nu > 1 else 0
    if at0 != 0:
        errors.append('det F(0) differs')
    if nu == 3:
        f0, f1, f2 = f
        product = (f1 ** 3 - Z * f2 ** 3) * (f2 ** 3 * Z ** 2 + (f1 ** 3 - 3 * f0 * f1 * f2) * Z + f0 ** 3)
        if sympy.expand(det.as_expr() - product) != 0:
            errors.append('two-factor product differs')
    return {'valid': not errors, 'errors': errors, 'degree': det.degree(), 'nu': nu}


# --- algebraic equation ---------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicEquation:
    """
    sum_{k=1..nu} g_k(z) v^k - 1 = 0 with v = t y(t) in branch units.

    g[k-1] holds Laurent coefficients of g_k for z^(-valuation) .. z^valid_order.
    """

    nu: int
    g: Tuple[Tuple[mpc, ...], ...]
    valuation: int
    valid_order: int
    residual: mpf
    source: BranchVector

    def g_value(self, k: int, z: Any) -> mpc:
        zz = mpmath.mpmathify(z)
        return mpmath.fsum(c * zz ** (j - self.valuation) for j, c in enumerate(self.g[k - 1]))

    def polynomial_residual(self, z: Any, branch: int = 0) -> mpc:
        with mpmath.workdps(self.source.digits + 10):
            v = self.source.evaluate(z, branch)
            return mpmath.fsum(self.g_value(k, z) * v ** k for k in range(1, self.nu + 1)) - 1

    def to_json(self) -> Dict[str, Any]:
        d = self.source.digits
        return {
            'nu': self.nu,
            'valuation': self.valuation,
            'valid_order': self.valid_order,
            'residual': mpmath.nstr(self.residual, 10),
            'g': [[ComplexHP(c, d).to_json() for c in gk] for gk in self.g],
        }


def _series_inverse(d: Sequence[mpc], n: int) -> List[mpc]:
    inv = [1 / d[0]]
    for j in range(1, n):
        s = mpmath.fsum(d[i] * inv[j - i] for i in range(1, min(j, len(d) - 1) + 1))
        inv.append(-s / d[0])
    return inv


def _det_valuation(det: List[mpc], order: int, digits: int) -> Optional[int]:
    """Lowest z-order at which det F is nonzero within the truncation, or None."""
    scale = max(abs(c) for c in det)
    tol = scale * mpf(10) ** (-(digits - 5))
    nonzero = [j for j, c in enumerate(det[:order]) if abs(c) > tol]
    return nonzero[0] if nonzero else None


def algebraic_equation(p: int, a0: Any, L: int = 16, digits: Optional[int] = None,
                       bv: Optional[BranchVector] = None) -> AlgebraicEquation:
    """
    Solve F_nu(z) Omega = (v, v^2, ..., v^nu) for the first entry of Omega.

    The first row of F^{-1} gives the coefficients g_k; they are computed as
    adj(F)_{0k} / det F in Laurent series, valid through z^(L - 1 - 2 val).
    When the branch functions are built here, the truncation is raised by
    2 val so that the equation holds through z^(L - 1).

    Raises:
        SingularTruncationError: det F vanishes through the truncation order,
            or a supplied branch vector is too short for the valuation of det F
    """
    own = bv is None
    order = L
    while True:
        if own:
            bv = branch_series(p, a0, order, strict=False, digits=digits)
        if bv.mode != 'numeric':
            raise ValidationError('algebraic_equation works with numeric branch functions')
        nu = bv.p
        if nu > NUMERIC_CAP:
            raise DeterminantCapError(f'nu={nu} exceeds the cap {NUMERIC_CAP}')
        F = build_fnu(bv)
        det, adj = _interpolate(F, with_adjoint_row=True)
        with mpmath.workdps(bv.digits + 10):
            val = _det_valuation(det, bv.order, bv.digits)
        if val is None:
            if own and order < MAX_TRUNCATION_GROWTH * L:
                order *= 2
                continue
            raise SingularTruncationError('det F vanishes through the truncation order; raise L',
                                          {'L': bv.order})
        if own and bv.order < L + 2 * val:
            order = L + 2 * val
            logger.debug('det F has valuation %d; extending the truncation to %d', val, order)
            continue
        break
    valid = bv.order - 1 - 2 * val
    if valid < 0:
        raise SingularTruncationError('truncation too short for the valuation of det F; raise L',
                                      {'L': bv.order, 'valuation': val})
    with mpmath.workdps(bv.digits + 10):
        n_terms = valid + val + 1
        inv = _series_inverse(det[val:], n_terms)
        g = []
        for k in range(nu):
            g.append(tuple(_ser_mul(adj[k], inv, n_terms, mpc(0))))
        worst = mpf(0)
        for q in range(nu):
            total = [mpc(0)] * n_terms
            for k in range(nu):
                prod = _ser_mul(g[k], F.entries[k][q], n_terms, mpc(0))
                total = [a + b for a, b in zip(total, prod)]
            if q == 0:
                total[val] -= 1
            worst = max(worst, max(abs(c) for c in total))
    logger.info('algebraic equation for label %s: nu=%d valuation=%d valid through z^%d residual %s',
                bv.label, nu, val, valid, mpmath.nstr(worst, 5))
    return AlgebraicEquation(nu, tuple(g), val, valid, worst, bv)


# --- E_p systems -----------------------------------------------------------------------

def default_ep_scaling(p: int) -> Tuple[Any, Any, int]:
    """(c1, c2, e) such that v d^2 v - (dv)^2 = c2^2 (v^3 - z^e) with d = z d/dz."""
    P, k = branch_period(p)
    if p >= 0:
        return sympy.Integer(1), sympy.Rational(1, P), 1
    return sympy.Integer(1), sympy.sqrt(2) / P, 4 // k


def _square(c: Any, mode: str, digits: int) -> Any:
    """c^2 as QQ (exact modes) or mpmath number (numeric mode)."""
    if isinstance(c, (ComplexHP, mpf, mpc, float, complex)):
        if mode != 'numeric':
            raise ValidationError('exact residuals need symbolic or rational scalings')
        v = c.value if isinstance(c, ComplexHP) else mpmath.mpmathify(c)
        return v * v
    sq = sympy.nsimplify(sympy.sympify(c) ** 2)
    if sq.is_Rational:
        r = to_rat(sq)
        return r if mode != 'numeric' else mpf(int(r.numerator)) / int(r.denominator)
    if mode != 'numeric':
        raise ValidationError('exact residuals need rational squared scalings', {'value': str(sq)})
    val = sympy.N(sq, digits + 10)
    return mpc(mpf(str(sympy.re(val))), mpf(str(sympy.im(val))))


def ep_components(bv: BranchVector, scaling: Optional[Tuple[Any, Any]] = None,
                  e: Optional[int] = None) -> List[List[Any]]:
    """
    E_p^q for q = 0..P-1 as z-coefficient lists through z^(L-1).

    E^q = sum_{qi+qj = q mod P} z^((qi+qj-q)/P) (f_i D2_j f_j - D1_i f_i D1_j f_j)
          - c1^2 c2^2 sum_{qi+qj+qk = q mod P} z^(...) f_i f_j f_k
          + (c2^2 / c1^4) z^e [q = 0]

    where D1_j = j/P + d, D2_j = (j/P)^2 + 2 (j/P) d + d^2 and d = z d/dz.
    """
    P, L, mode = bv.p, bv.order, bv.mode
    label = bv.label if bv.label is not None else 0
    c1d, c2d, e_default = default_ep_scaling(label)
    c1, c2 = scaling if scaling is not None else (c1d, c2d)
    e = e if e is not None else e_default
    with mpmath.workdps(bv.digits + 10):
        c1sq = _square(c1, mode, bv.digits)
        c2sq = _square(c2, mode, bv.digits)
    zero = _zero_like(mode)

    def frac(a: int, b: int) -> Any:
        return QQ(a, b) if mode != 'numeric' else mpf(a) / b

    f = bv.fhat
    d1 = [[f[j][l] * (frac(j, P) + l) for l in range(L)] for j in range(P)]
    d2 = [[f[j][l] * (frac(j, P) + l) ** 2 for l in range(L)] for j in range(P)]
    ff = {}
    out = []
    for q in range(P):
        acc = [zero] * L
        for qi in range(P):
            for qj in range(P):
                if (qi + qj - q) % P:
                    continue
                s = (qi + qj - q) // P
                a = _ser_mul(f[qi], d2[qj], L, zero)
                b = _ser_mul(d1[qi], d1[qj], L, zero)
                for l in range(L - s):
                    acc[l + s] = acc[l + s] + a[l] - b[l]
        cube_coef = c1sq * c2sq
        for qi in range(P):
            for qj in range(P):
                key = (min(qi, qj), max(qi, qj))
                if key not in ff:
                    ff[key] = _ser_mul(f[key[0]], f[key[1]], L, zero)
                for qk in range(P):
                    if (qi + qj + qk - q) % P:
                        continue
                    s = (qi + qj + qk - q) // P
                    t = _ser_mul(ff[key], f[qk], L, zero)
                    for l in range(L - s):
                        acc[l + s] = acc[l + s] - t[l] * cube_coef
        if q == 0 and e < L:
            acc[e] = acc[e] + c2sq / (c1sq * c1sq)
        out.append(acc)
    return out


def ep_residual(p: int, bv: BranchVector, scaling: Optional[Tuple[Any, Any]] = None,
                order: Optional[int] = None) -> Dict[str, Any]:
    """
    Leading surviving z-order of every E_p^q on the truncated branch functions.

    Returns:
        {'valid': all vanish through the checked order, 'checked_through': int,
         'components': [{'q', 'leading_order', 'max_abs'}]}
    """
    p = _check_label(p)
    P, _ = branch_period(p)
    if P != bv.p:
        raise ValidationError('branch vector does not belong to this label', {'label': p, 'p': bv.p})
    through = bv.order - 1 if order is None else min(order, bv.order - 1)
    bv = bv if bv.label == p else BranchVector(bv.p, bv.fhat, bv.order, bv.mode, p, bv.a0, bv.digits)
    comps = ep_components(bv, scaling)
    if bv.mode == 'numeric':
        scale = 1 + max(abs(c) for fq in bv.fhat for c in fq) ** 3
        tol = scale * mpf(10) ** (-(bv.digits - 10))
    report = []
    for q, series in enumerate(comps):
        leading = None
        worst: Any = 0
        for l, c in enumerate(series[:through + 1]):
            nonzero = (abs(c) > tol) if bv.mode == 'numeric' else not _is_zero(c)
            if nonzero and leading is None:
                leading = l
            if bv.mode == 'numeric':
                worst = max(worst, abs(c))
        report.append({'q': q, 'leading_order': leading,
                       'max_abs': mpmath.nstr(worst, 5) if bv.mode == 'numeric' else None})
    valid = all(r['leading_order'] is None for r in report)
    return {'valid': valid, 'checked_through': through, 'components': report}


# --- symmetries --------------------------------------------------------------------------

def y_value(p: int, table: CoeffTable, t_abs: Any, t_arg: Any, digits: Optional[int] = None) -> mpc:
    """
    y_p(t) for t = t_abs e^(i t_arg), with fractional powers taken as
    |t|^a e^(i a t_arg) for the unreduced argument.
    """
    p = _check_label(p)
    d = digits or table.a0.digits
    with mpmath.workdps(d + 10):
        c = scaling_constant(p, d)
        t_abs, t_arg = mpf(t_abs), mpf(t_arg)
        if p >= 0:
            e1 = mpf(4) / (2 * p + 3)
            T1 = t_abs ** e1 * mpmath.expj(e1 * t_arg)
            H, _ = evaluate_series(table, T1 / c, digits=d)
            ty = c ** (-mpf(p) / 3) * T1 ** (p + 1) * H
        else:
            m = -p
            e1 = mpf(4) / (m + 3)
            T1 = t_abs ** e1 * mpmath.expj(e1 * t_arg)
            H, _ = evaluate_series(table, T1 / c, digits=d)
            ty = c ** (mpf(m) / 3) * T1 * H
        return ty / (t_abs * mpmath.expj(t_arg))


def symmetry_check(kind: str, label: int, q: int, l: int, a0: Any, order: int = 12,
                   t: Any = None, digits: Optional[int] = None) -> Dict[str, Any]:
    """
    Rotation symmetries of H_p and y_p.

    kind 'sym_m' (label -m): H(x e^(-2 pi i q/(m+3)); a0 eps) = eps H(x; a0),
    eps = e^(2 pi i q/(m+3)), and y(t; a0) = e^(i phi) y(t e^(i phi); a0 eps)
    with phi = (pi/2)(l (m+3) - q).
    kind 'sym_n' (label n >= 0): H(x e^(4 pi i q/(2n+3)); a0 eps) = eps H(x; a0),
    eps = e^(2 pi i q/(2n+3)), psi = pi q + (pi/2) l (2n+3).
    """
    label = _check_label(label)
    if kind == 'sym_m' and label >= 0 or kind == 'sym_n' and label < 0:
        raise ValidationError(f'{kind} does not apply to label {label}')
    a0hp = ComplexHP.of(a0, digits)
    d = a0hp.digits
    with mpmath.workdps(d + 10):
        if kind == 'sym_m':
            per = 3 - label
            eps = mpmath.expj(2 * mpmath.pi * q / per)
            rot = 1 / eps
            phase = mpmath.pi / 2 * (l * per - q)
        elif kind == 'sym_n':
            per = 2 * label + 3
            eps = mpmath.expj(2 * mpmath.pi * q / per)
            rot = eps ** 2
            phase = mpmath.pi * q + mpmath.pi / 2 * l * per
        else:
            raise ValidationError(f'unknown symmetry {kind!r}')
        base = hp_coeffs(label, a0hp, order)
        moved = hp_coeffs(label, ComplexHP(a0hp.value * eps, d), order)
        coeff_err = mpf(0)
        for k in range(order + 1):
            hk = -base.a[0].value if k == 0 else base.a[k].value
            mk = -moved.a[0].value if k == 0 else moved.a[k].value
            coeff_err = max(coeff_err, abs(mk * rot ** k - eps * hk) / max(1, abs(hk)))
        t_abs, t_arg = (mpf('0.2'), mpf('0.3')) if t is None else (abs(mpmath.mpmathify(t)), mpmath.arg(mpmath.mpmathify(t)))
        lhs = y_value(label, base, t_abs, t_arg, d)
        rhs = mpmath.expj(phase) * y_value(label, moved, t_abs, t_arg + phase, d)
        y_err = abs(lhs - rhs) / max(1, abs(lhs))
        tol = mpf(10) ** (-(d - 10))
    return {'valid': coeff_err < tol and y_err < tol, 'coefficient_error': mpmath.nstr(coeff_err, 5),
            'y_error': mpmath.nstr(y_err, 5), 'kind': kind, 'label': label, 'q': q, 'l': l}


def symmetry_y_level(label: int, a0: Any, t: Any = None, order: int = 12,
                     digits: Optional[int] = None) -> Dict[str, Any]:
    """y_p(t; a0 e^(2 pi i)) = y_p(t; a0): the coefficients are rational in a0."""
    a0hp = ComplexHP.of(a0, digits)
    d = a0hp.digits
    with mpmath.workdps(d + 10):
        turned = ComplexHP(a0hp.value * mpmath.expj(2 * mpmath.pi), d)
        t_abs, t_arg = (mpf('0.2'), mpf('0.3')) if t is None else (abs(mpmath.mpmathify(t)), mpmath.arg(mpmath.mpmathify(t)))
        y1 = y_value(label, hp_coeffs(label, a0hp, order), t_abs, t_arg, d)
        y2 = y_value(label, hp_coeffs(label, turned, order), t_abs, t_arg, d)
        err = abs(y1 - y2) / max(1, abs(y1))
    return {'valid': err < mpf(10) ** (-(d - 10)), 'error': mpmath.nstr(err, 5)}


def symmetry_and_group(check: str, **params: Any) -> Any:
    """
    Dispatcher: 'sym_m' and 'sym_n' take label, q, l, a0 (and optional
    order, t); 'group_law' takes two_rho1, two_rho2 and returns 2 rho_3.
    """
    if check in ('sym_m', 'sym_n'):
        return symmetry_check(check, params['label'], params.get('q', 1), params.get('l', 0),
                              params['a0'], params.get('order', 12), params.get('t'), params.get('digits'))
    if check == 'group_law':
        return group_law(params['two_rho1'], params['two_rho2'])
    raise ValidationError(f'unknown check {check!r}')


# --- branch reconstruction ---------------------------------------------------------------

def vandermonde_matrix(p: int, digits: Optional[int] = None) -> mpmath.matrix:
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 10):
        eps = mpmath.expj(2 * mpmath.pi / p)
        A = mpmath.matrix(p, p)
        for k in range(p):
            for q in range(p):
                A[k, q] = eps ** ((k * q) % p)
    return A


def vandermonde_det(p: int, digits: Optional[int] = None) -> Dict[str, Any]:
    """det A next to p^(p/2) e^(-pi i (p-1)(p-2)/4); the closed form holds for odd p."""
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 10):
        det = mpmath.det(vandermonde_matrix(p, d))
        formula = mpf(p) ** (mpf(p) / 2) * mpmath.expj(-mpmath.pi * (p - 1) * (p - 2) / 4)
        agree = abs(det - formula) <= mpf(10) ** (-(d - 5)) * abs(formula)
    return {'det': ComplexHP(det, d), 'formula': ComplexHP(formula, d), 'agree': bool(agree),
            'formula_applies': p % 2 == 1}


def vandermonde_reconstruct(p: int, branch_values: Sequence[Any], digits: Optional[int] = None) -> List[mpc]:
    """
    Recover (f_0, w f_1, ..., w^(p-1) f_{p-1}) at one z from the p branch
    values v_k = sum_q eps^(kq) w^q f_q.
    """
    if len(branch_values) != p:
        raise ValidationError('one value per branch is required', {'p': p, 'count': len(branch_values)})
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 10):
        A = vandermonde_matrix(p, d)
        sol = mpmath.lu_solve(A, mpmath.matrix([mpmath.mpmathify(v) for v in branch_values]))
        return [sol[q] for q in range(p)]
