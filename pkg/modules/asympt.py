"""
Asymptotic formulas for H(r), I(r) and the general-a solution u(tau).

Large-|r| families
------------------
regular   H = 1 - sqrt(6 nu1) cos(psi) / (-3r)^(1/4),          |Im nu1| < 1/6
singular  H = 1 - 3 / (2 sin^2(psi_hat / 2)),                   Im nu1 in (-1, 0)

The companion integral I(r) carries an explicit integer k in the singular
family; k is never guessed here, only fitted against a trajectory by fit_k.
All error terms of the formulas are evaluated as zero.

The tau-chart theorems (small tau, large tau, the singular large-tau suite)
work for general a and are parametrized by GeneralAParams.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf
import numpy as np

from modules.exceptions import (
    ConditionViolationError,
    NoZeroFoundError,
    StripViolationError,
    ValidationError,
    WindowTooShortError,
)
from modules.monodromy import (
    ManifoldPoint,
    MonodromyPoint,
    Nu1,
    from_H0,
    lift,
    membership_tol,
    nu1 as nu1_of,
    rho_from_s,
    tz3x3_data,
    varpi,
)
from modules.specfun import BranchTracker, ComplexHP, DEFAULT_DIGITS, continuous_log, gamma_mp

logger = logging.getLogger(__name__)

FAMILIES = ('regular', 'singular')
EVAL_FAMILIES = ('reg_H', 'reg_I', 'sing_H', 'sing_I', 'small_tau_u', 'small_tau_phi',
                 'large_tau_u', 'large_tau_phi', 'sing2010', 're_half', 'tzitzeica')
SUITE = ('u2010', 'phi2010', 'poles', 'zeros', 're_half_u', 're_half_expphi')
MAX_LEVEL = 10
PRINTED_LEVELS = 6
ARG_STEP = 1.0
MAX_REFINE_DEPTH = 20
MOLE_SAMPLES = 256
MOLE_HORIZON = (mpf(1), mpf(10) ** 30)
M_ADVISORY = 10


def _digits(*values: Any) -> int:
    for v in values:
        if isinstance(v, ComplexHP):
            return v.digits
        if isinstance(v, Nu1):
            return v.value.digits
        if isinstance(v, (MonodromyPoint, ManifoldPoint)):
            return v.digits
    return DEFAULT_DIGITS


def _c(value: Any, digits: int) -> mpc:
    return ComplexHP.of(value, digits).value


def _real(value: Any, digits: int) -> mpf:
    if isinstance(value, mpf):
        return value
    return mpf(ComplexHP.of(value, digits).re)


def _ln_2_sqrt3() -> mpf:
    return mpmath.log(2 + mpmath.sqrt(3))


def theta0() -> mpc:
    """-pi/2 + (i/2) ln(2 + sqrt 3); sin = -sqrt(3/2), cos = i/sqrt 2."""
    return mpc(-mpmath.pi / 2, _ln_2_sqrt3() / 2)


@dataclass(frozen=True)
class AsymptoticEval:
    """Value of one asymptotic formula at one point. The family tag keeps formula values apart from solution values."""

    r_or_tau: mpf
    value: ComplexHP
    phase: ComplexHP
    family: str
    k: Optional[int] = None
    branch_state: Optional[BranchTracker] = None
    flags: Tuple[str, ...] = ()
    aux: Dict[str, ComplexHP] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        d = self.value.digits
        return {
            'family': self.family,
            'x': mpmath.nstr(self.r_or_tau, d),
            'value': self.value.to_json(),
            'phase': self.phase.to_json(),
            'k': self.k,
            'branch_state': self.branch_state.to_json() if self.branch_state else None,
            'flags': list(self.flags),
            'aux': {name: v.to_json() for name, v in self.aux.items()},
        }


# --- nu1 normalization ---------------------------------------------------------

def normalize_nu1(nu1: Any, family: str, digits: Optional[int] = None) -> Tuple[mpc, Tuple[str, ...]]:
    """
    Move nu1 by a multiple of i into the family's strip.

    regular: Im nu1 in (-1/2, 1/2), flagged outside |Im nu1| < 1/6.
    singular: Im nu1 in (-1, 0), -1/2 excluded.

    Raises:
        StripViolationError: the branch lands on a strip boundary
    """
    if family not in FAMILIES:
        raise ValidationError(f'unknown family {family!r}', {'allowed': list(FAMILIES)})
    v = nu1.value if isinstance(nu1, Nu1) else ComplexHP.of(nu1, digits)
    d = v.digits
    tol = membership_tol(d)
    flags: List[str] = []
    with mpmath.workdps(d + 10):
        x = v.value
        if family == 'regular':
            shift = -int(mpmath.nint(x.imag))
            x = x + mpc(0, shift)
            if abs(abs(x.imag) - mpf(1) / 2) <= tol:
                raise StripViolationError('|Im nu1| = 1/2 is outside every regular branch', {'nu1': str(v)})
            if abs(x.imag) >= mpf(1) / 6:
                flags.append('outside_validity_strip')
                logger.warning(f'regular asymptotics evaluated with |Im nu1| = {mpmath.nstr(abs(x.imag), 6)} >= 1/6')
        else:
            shift = -int(mpmath.floor(x.imag)) - 1
            x = x + mpc(0, shift)
            if abs(x.imag + 1) <= tol or abs(x.imag) <= tol:
                raise StripViolationError('Im nu1 sits on the boundary of (-1, 0)', {'nu1': str(v)})
            if abs(x.imag + mpf(1) / 2) <= tol:
                raise StripViolationError('Im nu1 = -1/2 is the logarithmic case', {'nu1': str(v)})
        if shift:
            flags.append('renormalized')
    return x, tuple(flags)


def _g1_value(g1: Any, H0: Any, digits: int) -> mpc:
    if g1 is not None:
        return _c(g1, digits)
    return from_H0(H0, digits).g1.value


# --- phases ----------------------------------------------------------------------

def _regular_constant(nu: mpc, g1: mpc, d: int) -> mpc:
    j = mpc(0, 1)
    return (nu * mpmath.log(24) + 3 * mpmath.pi / 4 - 3 * mpmath.pi * j * nu / 2
            - j * mpmath.log(2 * mpmath.pi) / 2
            + j * mpmath.log(g1 * mpmath.sqrt(nu) * gamma_mp(j * nu, d)))


def _singular_constant(nu: mpc, g1: mpc, d: int) -> mpc:
    j = mpc(0, 1)
    return (-mpmath.pi / 4 - 3 * mpmath.pi * j * nu / 2 - j * mpmath.log(2 * mpmath.pi) / 2
            + j * mpmath.log(g1 * gamma_mp(j * nu, d)))


def psi_regular(r: Any, nu: mpc, g1: mpc, digits: int) -> mpc:
    """psi(r) = 2 sqrt(-3r) + (nu1/2) ln(-3r) + nu1 ln 24 + 3pi/4 - (3 pi i/2) nu1 - (i/2) ln 2pi + i ln(g1 sqrt(nu1) Gamma(i nu1))."""
    with mpmath.workdps(digits + 10):
        x = -3 * _real(r, digits)
        return 2 * mpmath.sqrt(x) + nu / 2 * mpmath.log(x) + _regular_constant(nu, g1, digits)


def psi_singular(r: Any, nu: mpc, g1: mpc, digits: int) -> mpc:
    """psi_hat(r) = 2t + (nu1 + i/2) ln(24 t) - pi/4 - (3 pi i/2) nu1 - (i/2) ln 2pi + i ln(g1 Gamma(i nu1)), t = sqrt(-3r)."""
    with mpmath.workdps(digits + 10):
        t = mpmath.sqrt(-3 * _real(r, digits))
        return 2 * t + (nu + mpc(0, 0.5)) * mpmath.log(24 * t) + _singular_constant(nu, g1, digits)


def _check_r(r: Any, digits: int) -> mpf:
    rr = _real(r, digits)
    if not rr < 0:
        raise ValidationError('large-|r| asymptotics live on r < 0', {'r': str(r)})
    return rr


def H_large(r: Any, nu1: Any, g1: Any, family: str, digits: Optional[int] = None) -> AsymptoticEval:
    """
    Leading-term asymptotics of H(r) as r -> -infinity.

    Args:
        r: negative abscissa
        nu1: Nu1 or value, moved into the family's strip
        g1: contracted monodromy coordinate g1
        family: 'regular' or 'singular'

    Returns:
        AsymptoticEval tagged reg_H or sing_H with psi (resp. psi_hat) as phase
    """
    d = digits or _digits(nu1, g1)
    rr = _check_r(r, d)
    nu, flags = normalize_nu1(nu1 if not isinstance(nu1, Nu1) else nu1.value, family, d)
    flags = list(flags)
    with mpmath.workdps(d + 10):
        if family == 'regular':
            if nu == 0:
                return AsymptoticEval(rr, ComplexHP(mpc(1), d), ComplexHP(mpc(0), d), 'reg_H', flags=('formal_constant',))
            gg = _c(g1, d)
            if gg == 0:
                raise ValidationError('g1 = 0 leaves the phase undefined')
            psi = psi_regular(rr, nu, gg, d)
            value = 1 - mpmath.sqrt(6) * mpmath.sqrt(nu) * mpmath.cos(psi) / (-3 * rr) ** (mpf(1) / 4)
            return AsymptoticEval(rr, ComplexHP(value, d), ComplexHP(psi, d), 'reg_H', flags=tuple(flags))
        gg = _c(g1, d)
        if gg == 0:
            raise ValidationError('g1 = 0 leaves the phase undefined')
        psi = psi_singular(rr, nu, gg, d)
        s2 = mpmath.sin(psi / 2) ** 2
        guard = mpf(10) ** (-(d // 2))
        if abs(s2) < guard:
            flags.append('pole_proximity')
            s2 = guard * (s2 / abs(s2)) if s2 != 0 else guard
        value = 1 - 3 / (2 * s2)
        return AsymptoticEval(rr, ComplexHP(value, d), ComplexHP(psi, d), 'sing_H', flags=tuple(flags))


# --- I(r) ------------------------------------------------------------------------

def _h0_log(H0: mpc) -> mpc:
    w = mpmath.expjpi(mpf(2) / 3)
    wb = mpmath.conj(w)
    return mpmath.log((w * H0 - wb) / (w - H0 * wb))


def _sine_ratio(psi: mpc) -> mpc:
    t0 = theta0()
    return mpmath.sin(psi / 2 + t0) / mpmath.sin(psi / 2 - t0)


@dataclass(frozen=True)
class _IntegralSetup:
    nu: mpc
    g1: mpc
    H0: mpc
    constant: mpc
    log_H0: mpc
    flags: Tuple[str, ...]
    family: str
    digits: int


def _integral_setup(nu1: Any, H0: Any, family: str, digits: Optional[int]) -> _IntegralSetup:
    h = ComplexHP.of(H0, digits)
    d = h.digits
    if nu1 is None:
        nu1 = nu1_of(h, family)
    nu, flags = normalize_nu1(nu1 if not isinstance(nu1, Nu1) else nu1.value, family, d)
    with mpmath.workdps(d + 10):
        if nu == 0 and family == 'regular':
            return _IntegralSetup(nu, mpc(0), h.value, mpc(0), _h0_log(h.value), flags + ('formal_constant',), family, d)
        g1 = from_H0(h).g1.value
        constant = _regular_constant(nu, g1, d) if family == 'regular' else _singular_constant(nu, g1, d)
        return _IntegralSetup(nu, g1, h.value, constant, _h0_log(h.value), flags, family, d)


def _phase(setup: _IntegralSetup, rr: mpf) -> mpc:
    if setup.family == 'regular':
        x = -3 * rr
        return 2 * mpmath.sqrt(x) + setup.nu / 2 * mpmath.log(x) + setup.constant
    t = mpmath.sqrt(-3 * rr)
    return 2 * t + (setup.nu + mpc(0, 0.5)) * mpmath.log(24 * t) + setup.constant


def _regular_integral(setup: _IntegralSetup, rr: mpf) -> AsymptoticEval:
    d = setup.digits
    with mpmath.workdps(d + 10):
        j = mpc(0, 1)
        base = 2 * mpmath.sqrt(-rr) + 2 * setup.nu * _ln_2_sqrt3() + j * setup.log_H0
        if setup.nu == 0:
            return AsymptoticEval(rr, ComplexHP(base, d), ComplexHP(mpc(0), d), 'reg_I', flags=setup.flags)
        psi = _phase(setup, rr)
        correction = mpmath.sqrt(6) * mpmath.sqrt(setup.nu) / 2 * mpmath.sin(psi) / (-3 * rr) ** (mpf(1) / 4)
        return AsymptoticEval(rr, ComplexHP(base + correction, d), ComplexHP(psi, d), 'reg_I',
                              flags=setup.flags, aux={'E': ComplexHP(correction, d)})


def _singular_integral(setup: _IntegralSetup, rr: mpf, k: int, tracker: BranchTracker) -> AsymptoticEval:
    d = setup.digits
    with mpmath.workdps(d + 10):
        j = mpc(0, 1)
        psi = _phase(setup, rr)
        correction = -j * tracker.current_value.value
        value = (2 * mpmath.sqrt(-rr) + (2 * setup.nu + j) * _ln_2_sqrt3() + mpmath.pi * (2 * k - 1)
                 + j * setup.log_H0 + correction)
        return AsymptoticEval(rr, ComplexHP(value, d), ComplexHP(psi, d), 'sing_I', k, tracker,
                              setup.flags, {'E': ComplexHP(correction, d)})


def I_large(r: Any, nu1: Any, H0: Any, family: str, k: int = 0,
            tracker: Optional[BranchTracker] = None, digits: Optional[int] = None) -> AsymptoticEval:
    """
    Asymptotics of I(r) = int_r^0 dr / (sqrt(-r) H(r)) at one point.

    The singular family continues the logarithm of the sine ratio from
    tracker; without one the principal branch is taken at r. Use I_sweep
    for whole grids.
    """
    setup = _integral_setup(nu1, H0, family, digits)
    rr = _check_r(r, setup.digits)
    if family == 'regular':
        return _regular_integral(setup, rr)
    with mpmath.workdps(setup.digits + 10):
        ratio = _sine_ratio(_phase(setup, rr))
    if tracker is None:
        tracker = BranchTracker.start(ComplexHP(ratio, setup.digits))
    else:
        tracker, _ = continuous_log(tracker, ComplexHP(ratio, setup.digits))
    return _singular_integral(setup, rr, k, tracker)


def _advance(setup: _IntegralSetup, tracker: BranchTracker, ra: mpf, za: mpc,
             rb: mpf, zb: mpc, depth: int) -> BranchTracker:
    step = abs(mpmath.arg(zb / za))
    if step > ARG_STEP and depth < MAX_REFINE_DEPTH:
        sm = (mpmath.sqrt(-ra) + mpmath.sqrt(-rb)) / 2
        rm = -sm ** 2
        zm = _sine_ratio(_phase(setup, rm))
        tracker = _advance(setup, tracker, ra, za, rm, zm, depth + 1)
        return _advance(setup, tracker, rm, zm, rb, zb, depth + 1)
    tracker, _ = continuous_log(tracker, ComplexHP(zb, setup.digits))
    return tracker


def I_sweep(r_values: Sequence[Any], nu1: Any, H0: Any, family: str = 'singular', k: int = 0,
            digits: Optional[int] = None) -> List[AsymptoticEval]:
    """
    I(r) asymptotics along a grid ordered by decreasing r.

    The sine-ratio logarithm starts on the principal branch at the first
    grid point and is continued with bisection in sqrt(-r) wherever two
    neighbours differ in argument by more than one radian.
    """
    setup = _integral_setup(nu1, H0, family, digits)
    rs = [_check_r(r, setup.digits) for r in r_values]
    if any(b >= a for a, b in zip(rs, rs[1:])):
        raise ValidationError('sweep grid must be strictly decreasing in r')
    if family == 'regular':
        return [_regular_integral(setup, rr) for rr in rs]
    out: List[AsymptoticEval] = []
    with mpmath.workdps(setup.digits + 10):
        prev_r, prev_z = None, None
        tracker = None
        for rr in rs:
            z = _sine_ratio(_phase(setup, rr))
            if tracker is None:
                tracker = BranchTracker.start(ComplexHP(z, setup.digits))
            else:
                tracker = _advance(setup, tracker, prev_r, prev_z, rr, z, 0)
            out.append(_singular_integral(setup, rr, k, tracker))
            prev_r, prev_z = rr, z
    return out


# --- k fitting ---------------------------------------------------------------------

@dataclass(frozen=True)
class KFit:
    k: int
    misfit: float
    median_shift: float
    samples: int
    family: str
    window: Tuple[float, float]

    def to_json(self) -> Dict[str, Any]:
        return {'k': self.k, 'misfit': self.misfit, 'median_shift': self.median_shift,
                'samples': self.samples, 'family': self.family, 'window': list(self.window)}


def fit_k(trajectory: Any, family: str = 'singular', window: Tuple[Any, Any] = (-600, -100),
          nu1: Any = None) -> KFit:
    """
    Integer k that best aligns Re I(r) of a trajectory with its asymptotics.

    Args:
        trajectory: odeint.Trajectory
        family: asymptotic family to compare against
        window: (r_lo, r_hi) with r_lo < r_hi < 0
        nu1: optional override of nu1

    Returns:
        KFit with k = round(median(Re I_num - Re I_asym(k=0)) / 2pi) and the
        largest residual after the 2 pi k shift

    Raises:
        WindowTooShortError: fewer than 5 samples in the window
    """
    lo, hi = (mpf(str(w)) for w in window)
    if not lo < hi:
        raise ValidationError('window must satisfy r_lo < r_hi', {'window': [str(w) for w in window]})
    samples = [p for p in trajectory.samples if p.r < 0 and p.r >= lo]
    inside = [i for i, p in enumerate(samples) if p.r <= hi]
    if len(inside) < 5:
        raise WindowTooShortError(f'{len(inside)} samples in the window, need at least 5',
                                  {'window': [str(lo), str(hi)]})
    evals = I_sweep([p.r for p in samples], nu1, trajectory.H0, family, 0)
    diffs = np.array([float(samples[i].I.re - evals[i].value.re) for i in inside])
    two_pi = 2 * np.pi
    median = float(np.median(diffs))
    k = int(round(median / two_pi))
    misfit = float(np.max(np.abs(diffs - two_pi * k)))
    logger.info(f'fit_k({family}) over [{lo}, {hi}]: k = {k}, misfit = {misfit:.3e}')
    return KFit(k, misfit, median, len(inside), family, (float(lo), float(hi)))


# --- landmarks -----------------------------------------------------------------------

@dataclass(frozen=True)
class Landmarks:
    """Stair-stringer constants and the last zero of Re H of the singular family."""

    nu1: ComplexHP
    k: int
    left_constant: mpf
    right_constant: mpf
    r0: Optional[mpf]
    y0: Optional[mpf]
    horizon: Optional[str] = None

    def stringer_left(self, r: Any) -> mpf:
        with mpmath.workdps(self.nu1.digits + 5):
            return 2 * mpmath.sqrt(-_real(r, self.nu1.digits)) + self.left_constant

    def stringer_right(self, r: Any) -> mpf:
        with mpmath.workdps(self.nu1.digits + 5):
            x = -_real(r, self.nu1.digits)
            return (-2 * (mpmath.sqrt(3) - 1) * mpmath.sqrt(x)
                    - self.nu1.re * mpmath.log(mpmath.sqrt(x)) + self.right_constant)

    def to_json(self) -> Dict[str, Any]:
        d = self.nu1.digits
        num = lambda x: None if x is None else mpmath.nstr(x, d)
        return {'nu1': self.nu1.to_json(), 'k': self.k, 'left_constant': num(self.left_constant),
                'right_constant': num(self.right_constant), 'r0': num(self.r0), 'y0': num(self.y0),
                'horizon': self.horizon}


def _mole_parts(nu: mpc, g1: mpc, d: int) -> Tuple[mpf, mpf, mpf]:
    lg = mpmath.log(g1 * gamma_mp(mpc(0, 1) * nu, d))
    slope = nu.imag + mpf(1) / 2
    y0 = -3 * mpmath.pi / 2 * nu.real - mpmath.log(2 * mpmath.pi) / 2 + lg.real
    pc = -mpmath.pi / 4 + 3 * mpmath.pi / 2 * nu.imag - lg.imag
    return slope, y0, pc


def last_zero(nu1: Any, g1: Any, digits: Optional[int] = None) -> mpf:
    """
    Last zero of Re H_singular on the negative axis.

    With psi_hat = P + iY, Re H = 1 - 3(1 - cos P cosh Y)/(cosh Y - cos P)^2,
    which dips below zero only while cosh Y < 2. Y is affine in ln sqrt(-r),
    so the crossing |Y| = ln(2 + sqrt 3) is found in closed form; the last zero
    is bracketed inside the phase period around it.

    Raises:
        NoZeroFoundError: the crossing falls outside 1 <= |r| <= 1e30
    """
    d = digits or _digits(nu1, g1)
    nu, _ = normalize_nu1(nu1 if not isinstance(nu1, Nu1) else nu1.value, 'singular', d)
    with mpmath.workdps(d + 10):
        gg = _c(g1, d)
        slope, y_const, p_const = _mole_parts(nu, gg, d)
        edge = _ln_2_sqrt3()
        sign = 1 if slope > 0 else -1
        t_c = mpmath.exp((sign * edge - y_const) / slope) / 24
        r_c = -t_c ** 2 / 3
        lo, hi = MOLE_HORIZON
        if not lo <= -r_c <= hi:
            raise NoZeroFoundError('cosh(Im psi_hat) = 2 outside the search horizon',
                                   f'[{mpmath.nstr(-hi, 3)}, {mpmath.nstr(-lo, 3)}]',
                                   {'r_crossing': mpmath.nstr(r_c, 15)})

        def P(t):
            return 2 * t + nu.real * mpmath.log(24 * t) + p_const

        def Y(t):
            return slope * mpmath.log(24 * t) + y_const

        def re_H(t):
            c, C = mpmath.cosh(Y(t)), mpmath.cos(P(t))
            return 1 - 3 * (1 - C * c) / (c - C) ** 2

        def phase_point(target, guess):
            return mpmath.findroot(lambda t: P(t) - target, max(guess, mpf(1) / 10))

        n = int(mpmath.floor((P(t_c) - mpmath.pi) / (2 * mpmath.pi)))
        for _ in range(3):
            target = mpmath.pi + 2 * mpmath.pi * n
            t_n = phase_point(target, t_c - (P(t_c) - target) / 2)
            if mpmath.cosh(Y(t_n)) < 2:
                break
            n -= 1
        else:
            raise NoZeroFoundError('no negative Re H near the crossing', str(r_c))
        t_next = phase_point(target + 2 * mpmath.pi, t_n + mpmath.pi)
        grid = [t_n + (t_next - t_n) * i / MOLE_SAMPLES for i in range(MOLE_SAMPLES + 1)]
        values = [re_H(t) for t in grid]
        bracket = None
        for i in range(MOLE_SAMPLES - 1, -1, -1):
            if values[i] < 0 <= values[i + 1]:
                bracket = (grid[i], grid[i + 1])
                break
        if bracket is None:
            raise NoZeroFoundError('no sign change of Re H in the last negative period', str(r_c))
        t0 = mpmath.findroot(re_H, bracket, solver='illinois')
        r0 = -t0 ** 2 / 3
    logger.info(f'last zero of Re H_singular at r0 = {mpmath.nstr(r0, 20)}')
    return r0


def landmarks(nu1: Any, g1: Any, H0: Any, k: int = 0, digits: Optional[int] = None) -> Landmarks:
    """
    Stringers, last zero r0 and dwelling depth y0 = -2(sqrt3 - 1) sqrt(-r0).

    The left stringer uses the real part of nu1 from the singular convention,
    matching the staircase that the singular I(r) draws.
    """
    h = ComplexHP.of(H0, digits)
    d = h.digits
    nu, _ = normalize_nu1(nu1 if not isinstance(nu1, Nu1) else nu1.value, 'singular', d)
    with mpmath.workdps(d + 10):
        gg = _c(g1, d)
        lnH = _h0_log(h.value)
        lg = mpmath.log(gg * gamma_mp(mpc(0, 1) * nu, d))
        ln_edge = _ln_2_sqrt3()
        left = 2 * nu.real * ln_edge + 2 * mpmath.pi * k - lnH.imag
        right = (nu.real * mpmath.log((2 + mpmath.sqrt(3)) ** 2 / (2 * mpmath.sqrt(3)) ** 3)
                 - 3 * mpmath.pi / 2 * nu.imag + mpmath.pi / 4 + 2 * mpmath.pi * (k - 1)
                 - lnH.imag + lg.imag)
    try:
        r0 = last_zero(nu, gg, d)
        with mpmath.workdps(d + 5):
            y0 = -2 * (mpmath.sqrt(3) - 1) * mpmath.sqrt(-r0)
        horizon = None
    except NoZeroFoundError as e:
        logger.warning(f'landmarks: {e}')
        r0 = y0 = None
        horizon = str(e.horizon)
    return Landmarks(ComplexHP(nu, d), k, left, right, r0, y0, horizon)


# --- general-a parameters ------------------------------------------------------------

@dataclass(frozen=True)
class GeneralAParams:
    """Parameters of the tau-chart theorems; b = eps * eps_b."""

    a: ComplexHP
    rho: ComplexHP
    monodromy: ManifoldPoint
    nu_plus_one: ComplexHP
    eps_b: mpf = mpf(1)
    eps: int = 1

    def __post_init__(self):
        if not self.eps_b > 0:
            raise ValidationError('eps*b must be positive', {'eps_b': str(self.eps_b)})
        if self.eps not in (1, -1):
            raise ValidationError('eps must be +1 or -1', {'eps': self.eps})

    @property
    def digits(self) -> int:
        return self.monodromy.digits

    @property
    def b(self) -> mpf:
        return self.eps * self.eps_b

    @classmethod
    def from_H0(cls, H0: Any, convention: str = 'regular', digits: Optional[int] = None) -> 'GeneralAParams':
        """a = 0 data of the solution with H(0) = H0, in the chart r = -(9/4) tau^(4/3), eps = eps_b = 1."""
        h = ComplexHP.of(H0, digits)
        d = h.digits
        point = from_H0(h)
        manifold = point.lifted or lift(point)
        nu = nu1_of(h, convention)
        rho = rho_from_s(point.s).rho
        return cls(ComplexHP(mpc(0), d), rho, manifold, nu.nu_tilde_plus_one)

    def small_tau_violations(self) -> List[str]:
        d = self.digits
        tol = membership_tol(d)
        out = []
        with mpmath.workdps(d + 10):
            a, rho = self.a.value, self.rho.value
            m = self.monodromy
            if not abs(a.imag) < 1:
                out.append('|Im a| < 1')
            if abs(rho) <= tol:
                out.append('rho != 0')
            if not abs(rho.real) < mpf(1) / 2:
                out.append('|Re rho| < 1/2')
            if abs(m.g11.value * m.g22.value) <= tol:
                out.append('g11 g22 != 0')
            lhs = mpmath.cos(2 * mpmath.pi * rho)
            mid = -mpc(0, 1) * m.s00.value / 2
            rhs = mpmath.cosh(mpmath.pi * a) + m.s0inf.value * m.s1inf.value * mpmath.exp(mpmath.pi * a) / 2
            if abs(lhs - mid) > tol or abs(mid - rhs) > tol:
                out.append('cos(2 pi rho) = -i s00/2 = cosh(pi a) + s0inf s1inf e^(pi a)/2')
        return out

    def large_tau_violations(self) -> List[str]:
        m = self.monodromy
        tol = membership_tol(self.digits)
        product = m.g11.value * m.g12.value * m.g21.value * m.g22.value
        return [] if abs(product) > tol else ['g11 g12 g21 g22 != 0']

    def to_json(self) -> Dict[str, Any]:
        return {'a': self.a.to_json(), 'rho': self.rho.to_json(), 'monodromy': self.monodromy.to_json(),
                'nu_plus_one': self.nu_plus_one.to_json(), 'eps_b': mpmath.nstr(self.eps_b, self.digits),
                'eps': self.eps}


def _require(violations: List[str], what: str) -> None:
    if violations:
        raise ConditionViolationError(f'{what}: conditions violated', violations)


def small_tau(tau: Any, params: GeneralAParams) -> Tuple[AsymptoticEval, AsymptoticEval]:
    """
    Leading terms of u(tau) and e^{i phi(tau)} as tau -> 0.

        u = tau b e^{pi a/2}/(16 pi) (w1(rho) tau^{2rho} + w1(-rho) tau^{-2rho})
                                     (w2(rho) tau^{2rho} + w2(-rho) tau^{-2rho})
        e^{i phi} = -2^{ia} tau^{2ia} (w2 sum)/(w1 sum)
    """
    _require(params.small_tau_violations(), 'small-tau asymptotics')
    d = params.digits
    tt = _real(tau, d)
    if not tt > 0:
        raise ValidationError('tau must be positive', {'tau': str(tau)})
    a, rho = params.a, params.rho
    w = {(k, sgn): varpi(k, rho.value * sgn, params.monodromy, params.eps_b, a.value).value
         for k in (1, 2) for sgn in (1, -1)}
    with mpmath.workdps(d + 10):
        up = tt ** (2 * rho.value)
        down = tt ** (-2 * rho.value)
        s1 = w[1, 1] * up + w[1, -1] * down
        s2 = w[2, 1] * up + w[2, -1] * down
        j = mpc(0, 1)
        u = tt * params.b * mpmath.exp(mpmath.pi * a.value / 2) / (16 * mpmath.pi) * s1 * s2
        e_phi = -mpmath.power(2, j * a.value) * mpmath.power(tt, 2 * j * a.value) * s2 / s1
        phase = ComplexHP(mpc(0), d)
        return (AsymptoticEval(tt, ComplexHP(u, d), phase, 'small_tau_u'),
                AsymptoticEval(tt, ComplexHP(e_phi, d), phase, 'small_tau_phi'))


def _kappa_z(params: GeneralAParams) -> Tuple[mpc, mpc]:
    d = params.digits
    j = mpc(0, 1)
    kappa = params.nu_plus_one.value
    m = params.monodromy
    z = (mpmath.log(2 * mpmath.pi) / 2 + mpmath.pi * j / 2 - 3 * mpmath.pi * j * kappa / 2
         + j * params.a.value * _ln_2_sqrt3() + kappa * mpmath.log(12)
         - mpmath.log(m.g11.value * m.g12.value * mpmath.sqrt(kappa) * gamma_mp(kappa, d)))
    return kappa, z


def large_tau_general(tau: Any, params: GeneralAParams, g11sq_branch: int = 0) -> Tuple[AsymptoticEval, AsymptoticEval]:
    """
    Regular large-tau asymptotics of u(tau) and phi(tau).

    Args:
        tau: positive abscissa
        params: GeneralAParams; |Re(nu+1)| < 1/6 is a validity flag, not an error
        g11sq_branch: integer n selecting ln(g11^2) + 2 pi i n

    Returns:
        (u, phi) evaluations; phi includes the leading sinh correction E_phi
    """
    _require(params.large_tau_violations(), 'large-tau asymptotics')
    d = params.digits
    tt = _real(tau, d)
    if not tt > 0:
        raise ValidationError('tau must be positive', {'tau': str(tau)})
    flags = []
    with mpmath.workdps(d + 10):
        j = mpc(0, 1)
        kappa, z = _kappa_z(params)
        if not abs(kappa.real) < mpf(1) / 6:
            flags.append('outside_validity_strip')
        eb, a = params.eps_b, params.a.value
        theta = 3 ** (mpf(3) / 2) * eb ** (mpf(1) / 3) * tt ** (mpf(2) / 3)
        arg = j * theta + kappa * mpmath.log(theta) + z
        root = mpmath.sqrt(kappa)
        scale = eb ** (mpf(1) / 6) * tt ** (mpf(1) / 3)
        c = params.eps * eb ** (mpf(2) / 3) / 2
        u = c * tt ** (mpf(1) / 3) * (1 + 2 * root * mpmath.expjpi(mpf(3) / 4) / (3 ** (mpf(1) / 4) * scale)
                                      * mpmath.cosh(arg))
        e_coeff = 2 * root * mpmath.expjpi(-mpf(3) / 4) / (3 ** (mpf(3) / 4) * scale)
        e_phi = e_coeff * mpmath.sinh(arg)
        g11 = params.monodromy.g11.value
        phi = (3 * eb ** (mpf(1) / 3) * tt ** (mpf(2) / 3) + 2 * a * mpmath.log(tt ** (mpf(2) / 3))
               - a * mpmath.log(eb ** (mpf(1) / 3) / 4) + mpmath.pi - 2 * mpmath.pi * kappa
               + j * (mpmath.log(g11 ** 2) + 2 * mpmath.pi * j * g11sq_branch)
               - 2 * j * kappa * _ln_2_sqrt3() + e_phi)
        aux = {'E_phi': ComplexHP(e_phi, d), 'E_phi_coefficient': ComplexHP(e_coeff, d),
               'theta': ComplexHP(mpc(theta), d), 'z': ComplexHP(z, d)}
        phase = ComplexHP(arg, d)
        return (AsymptoticEval(tt, ComplexHP(u, d), phase, 'large_tau_u', flags=tuple(flags), aux=aux),
                AsymptoticEval(tt, ComplexHP(phi, d), phase, 'large_tau_phi', g11sq_branch,
                               flags=tuple(flags), aux=aux))


# --- singular large-tau suite --------------------------------------------------------

def _singular_kappa(params: GeneralAParams) -> mpc:
    m = params.monodromy
    tol = membership_tol(params.digits)
    g = m.g11.value * m.g22.value
    violations = params.large_tau_violations()
    if abs(g.imag) <= tol * max(1, abs(g)) and g.real < 0:
        violations.append('|g11 g22| != -g11 g22')
    kappa = mpc(0, 1) / (2 * mpmath.pi) * mpmath.log(g)
    if kappa.real < 0:
        kappa += 1
    if abs(kappa.real) <= tol:
        violations.append('Re(nu+1) in (0, 1)')
    _require(violations, 'singular large-tau asymptotics')
    return kappa


def rho_pair(params: GeneralAParams) -> Tuple[mpf, mpc, mpc]:
    """
    (rho1, rho2, rho2 via the arg/modulus form) for Re(nu+1) = 1/2 data.

    rho1 = ln(-g11 g22)/(2 pi) is real; the two rho2 forms must agree.
    """
    m = params.monodromy
    d = params.digits
    tol = membership_tol(d)
    with mpmath.workdps(d + 10):
        g11, g12, g21, g22 = (x.value for x in (m.g11, m.g12, m.g21, m.g22))
        violations = params.large_tau_violations()
        prod = g11 * g22
        if not (abs(prod.imag) <= tol * max(1, abs(prod)) and prod.real < 0):
            violations.append('|g11 g22| = -g11 g22')
        _require(violations, 'poles/zeros asymptotics')
        j = mpc(0, 1)
        a = params.a.value
        rho1 = mpmath.log(-prod.real) / (2 * mpmath.pi)
        gam = gamma_mp(mpf(1) / 2 + j * rho1, d)
        common = rho1 * mpmath.log(24 * mpmath.pi) - 3 * mpmath.pi / 2 + a * _ln_2_sqrt3()
        rho2 = (common - 3 * mpmath.pi * j * rho1 / 2 - j * mpmath.log(2 * mpmath.pi) / 2
                + j * mpmath.log(g11 * g12 * gam))
        r_top = mpmath.sqrt(g11 * g12)
        r_bottom = mpmath.sqrt(g21 * g22)
        if (r_top * r_bottom).real < 0:
            r_bottom = -r_bottom
        rho2_arg = (common - mpmath.arg(gam * r_top / r_bottom)
                    + j / 2 * mpmath.log(abs(g11 * g12 / (g21 * g22))))
        return rho1, rho2, rho2_arg


@dataclass(frozen=True)
class PoleZeroEstimate:
    m: int
    kind: str
    tau: Tuple[ComplexHP, ...]
    flags: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {'m': self.m, 'kind': self.kind, 'tau': [t.to_json() for t in self.tau], 'flags': list(self.flags)}


def _vartheta(theta: mpf, kappa: mpc, params: GeneralAParams) -> mpc:
    d = params.digits
    j = mpc(0, 1)
    m = params.monodromy
    shifted = kappa - mpf(1) / 2
    return (theta - j * shifted * mpmath.log(theta) - 3 * mpmath.pi / 4 - 3 * mpmath.pi * kappa / 2
            - j * shifted * mpmath.log(12) - j * mpmath.log(2 * mpmath.pi) / 2
            + params.a.value * _ln_2_sqrt3() + j * mpmath.log(m.g11.value * m.g12.value * gamma_mp(kappa, d)))


def _big_theta(theta: mpf, rho1: mpf, params: GeneralAParams) -> mpc:
    d = params.digits
    j = mpc(0, 1)
    m = params.monodromy
    gam = gamma_mp(mpf(1) / 2 + j * rho1, d)
    return (theta + rho1 * mpmath.log(theta) - 3 * mpmath.pi / 2 + rho1 * mpmath.log(12)
            + params.a.value * _ln_2_sqrt3() - 3 * mpmath.pi * j * rho1 / 2 - j * mpmath.log(2 * mpmath.pi) / 2
            + j * mpmath.log(m.g11.value * m.g12.value * gam))


def singular_tau_suite(which: str, x: Any, params: GeneralAParams, g11sq_branch: int = 0,
                       tracker: Optional[BranchTracker] = None) -> Any:
    """
    Singular-type large-tau results.

    Args:
        which: one of u2010, phi2010, poles, zeros, re_half_u, re_half_expphi
        x: tau for the function values, the index m for poles and zeros
        params: GeneralAParams
        g11sq_branch: integer branch of ln(g11^2) for phi2010
        tracker: sine-ratio branch state for phi2010 sweeps

    Returns:
        AsymptoticEval for function values, PoleZeroEstimate for poles/zeros
    """
    if which not in SUITE:
        raise ValidationError(f'unknown suite entry {which!r}', {'allowed': list(SUITE)})
    d = params.digits
    j = mpc(0, 1)
    with mpmath.workdps(d + 10):
        eb = params.eps_b
        c = params.eps * eb ** (mpf(2) / 3) / 2
        t0 = theta0()
        if which in ('poles', 'zeros'):
            m = int(x)
            if m < 1:
                raise ValidationError('m must be a positive integer', {'m': x})
            flags = ('m_small',) if m < M_ADVISORY else ()
            rho1, rho2, _ = rho_pair(params)
            lead = (2 * mpmath.pi * m / (3 ** (mpf(3) / 2) * eb ** (mpf(1) / 3))) ** (mpf(3) / 2)
            drift = 1 - 3 * rho1 / (4 * mpmath.pi) * mpmath.log(m) / m

            def at(shift):
                return ComplexHP(lead * (drift - 3 / (4 * mpmath.pi) * (rho2 + shift) / m), d)

            if which == 'poles':
                return PoleZeroEstimate(m, 'pole', (at(0),), flags)
            return PoleZeroEstimate(m, 'zero', (at(2 * t0), at(-2 * t0)), flags)

        tt = _real(x, d)
        if not tt > 0:
            raise ValidationError('tau must be positive', {'tau': str(x)})
        theta = 3 ** (mpf(3) / 2) * eb ** (mpf(1) / 3) * tt ** (mpf(2) / 3)
        g11 = params.monodromy.g11.value
        a = params.a.value
        if which in ('u2010', 'phi2010'):
            kappa = _singular_kappa(params)
            vt = _vartheta(theta, kappa, params)
            half = vt / 2
            if which == 'u2010':
                u = c * tt ** (mpf(1) / 3) * (1 - 3 / (2 * mpmath.sin(half) ** 2))
                factored = (c * tt ** (mpf(1) / 3) * mpmath.sin(half - t0) * mpmath.sin(half + t0)
                            / mpmath.sin(half) ** 2)
                return AsymptoticEval(tt, ComplexHP(u, d), ComplexHP(vt, d), 'sing2010',
                                      aux={'factored': ComplexHP(factored, d)})
            ratio = ComplexHP(mpmath.sin(half + t0) / mpmath.sin(half - t0), d)
            if tracker is None:
                tracker = BranchTracker.start(ratio)
            else:
                tracker, _ = continuous_log(tracker, ratio)
            shifted = kappa - mpf(1) / 2
            phi = (3 * eb ** (mpf(1) / 3) * tt ** (mpf(2) / 3) + 2 * a * mpmath.log(tt ** (mpf(2) / 3))
                   - a * mpmath.log(eb ** (mpf(1) / 3) / 4) + mpmath.pi - 2 * mpmath.pi * shifted
                   + j * (mpmath.log(g11 ** 2) + 2 * mpmath.pi * j * g11sq_branch)
                   - 2 * j * shifted * _ln_2_sqrt3() - j * tracker.current_value.value)
            return AsymptoticEval(tt, ComplexHP(phi, d), ComplexHP(vt, d), 'sing2010', g11sq_branch, tracker)

        rho1, _, _ = rho_pair(params)
        big = _big_theta(theta, rho1, params)
        half = big / 2
        if which == 're_half_u':
            u = c * tt ** (mpf(1) / 3) * (1 - 3 / (2 * mpmath.sin(half) ** 2))
            return AsymptoticEval(tt, ComplexHP(u, d), ComplexHP(big, d), 're_half')
        Phi = (theta / mpmath.sqrt(3) + 4 * a / 3 * mpmath.log(tt) - 2 * j * mpmath.pi * rho1 + mpmath.pi
               + 2 * rho1 * _ln_2_sqrt3() - a * mpmath.log(eb ** (mpf(1) / 3) / 4))
        value = mpmath.exp(j * Phi) / g11 ** 2 * mpmath.sin(half + t0) / mpmath.sin(half - t0)
        return AsymptoticEval(tt, ComplexHP(value, d), ComplexHP(big, d), 're_half',
                              aux={'Phi': ComplexHP(Phi, d)})


# --- complete expansion at tau -> infinity -------------------------------------------

Key = Tuple[int, int]


@dataclass(frozen=True)
class ExpansionTable:
    """
    Coefficients of u = (eps (eps b)^(2/3)/2) tau^(1/3) (1 + sum_k tau^(-k/3) sum_j a_{k,j} w^j)
    with w = tau^(2(nu+1)/3) e^{i theta}, and of b/u = sum_k tau^(-k/3) sum_j b_{k,j} w^j.
    """

    K: int
    a: Dict[Key, ComplexHP]
    b: Dict[Key, ComplexHP]
    kappa: ComplexHP
    alpha: ComplexHP
    eps_b: mpf
    eps: int = 1
    checks: Dict[str, mpf] = field(default_factory=dict)
    flags: Tuple[str, ...] = ()

    def coefficient(self, k: int, j: int) -> mpc:
        entry = self.a.get((k, j))
        return entry.value if entry is not None else mpc(0)

    def to_json(self) -> Dict[str, Any]:
        d = self.kappa.digits
        key = lambda kj: f'{kj[0]},{kj[1]}'
        return {
            'K': self.K,
            'kappa': self.kappa.to_json(),
            'alpha': self.alpha.to_json(),
            'eps_b': mpmath.nstr(self.eps_b, d),
            'a': {key(kj): v.to_json() for kj, v in sorted(self.a.items())},
            'b': {key(kj): v.to_json() for kj, v in sorted(self.b.items())},
            'checks': {name: mpmath.nstr(v, 6) for name, v in self.checks.items()},
            'flags': list(self.flags),
        }


def _bump(target: Dict[Key, mpc], key: Key, value: mpc) -> None:
    target[key] = target.get(key, 0) + value


def _series_mul(p: Dict[Key, mpc], q: Dict[Key, mpc], N: int) -> Dict[Key, mpc]:
    out: Dict[Key, mpc] = {}
    for (k1, j1), c1 in p.items():
        for (k2, j2), c2 in q.items():
            if k1 + k2 <= N:
                _bump(out, (k1 + k2, j1 + j2), c1 * c2)
    return out


def _order_residual(coeffs: Dict[Key, mpc], kappa: mpc, a: mpc, e: mpf, N: int) -> Dict[Key, mpc]:
    """
    Coefficients of x^(4-n) w^j, n <= N, in

        D^2 ln(1 + V) - 4e^2 x^4 ((1 + V)^-2 - 1 - V) - 4 a e x^2 (1 + V)^-1

    where x = tau^(1/3), e = (eps b)^(1/3), V = sum a_{k,j} x^-k w^j and
    D = tau d/dtau. This is the u-equation divided by u^2 tau^0.
    """
    V = {key: c for key, c in coeffs.items() if key[0] <= N and c != 0}
    L: Dict[Key, mpc] = {}
    G: Dict[Key, mpc] = {(0, 0): mpc(1)}
    power: Dict[Key, mpc] = {(0, 0): mpc(1)}
    for m in range(1, N + 1):
        power = _series_mul(power, V, N)
        if not power:
            break
        for key, c in power.items():
            _bump(L, key, c * (1 if m % 2 else -1) / m)
            _bump(G, key, c * (-1 if m % 2 else 1))
    G2 = _series_mul(G, G, N)
    i_beta = mpc(0, 2) * mpmath.sqrt(3) * e
    E: Dict[Key, mpc] = {}
    for (k, j), c in L.items():
        lam = (2 * j * kappa - k) / 3
        _bump(E, (k, j), (i_beta * j) ** 2 * c)
        _bump(E, (k + 2, j), i_beta * j * (mpf(2) / 3 + 2 * lam) * c)
        _bump(E, (k + 4, j), lam ** 2 * c)
    four_e2 = 4 * e ** 2
    for key, c in G2.items():
        _bump(E, key, -four_e2 * c)
    _bump(E, (0, 0), four_e2)
    for key, c in V.items():
        _bump(E, key, four_e2 * c)
    for (k, j), c in G.items():
        _bump(E, (k + 2, j), -4 * a * e * c)
    return {key: v for key, v in E.items() if key[0] <= N}


def _generate(K: int, A: mpc, B: mpc, kappa: mpc, a: mpc, e: mpf) -> Tuple[Dict[Key, mpc], mpf]:
    """
    Order-by-order solution: stage n fixes a_{n,j} (j != +-1) from order n
    and a_{n-1,+-1} from order n + 1. Returns levels <= K and the order-3
    residual that the product a_{1,1} a_{1,-1} must cancel.
    """
    coeffs: Dict[Key, mpc] = {(1, 1): A, (1, -1): B, (1, 0): mpc(0)}
    consistency = mpf(0)
    for n in range(2, K + 2):
        unknowns = [(n, j) for j in range(-n, n + 1) if abs(j) != 1]
        equations = list(unknowns)
        if n >= 3:
            unknowns += [(n - 1, 1), (n - 1, -1)]
            equations += [(n + 1, 1), (n + 1, -1)]
        base = dict(coeffs)
        for key in unknowns:
            base[key] = mpc(0)
        r0 = _order_residual(base, kappa, a, e, n + 1)
        J = mpmath.matrix(len(equations), len(unknowns))
        for col, key in enumerate(unknowns):
            trial = dict(base)
            trial[key] = mpc(1)
            r1 = _order_residual(trial, kappa, a, e, n + 1)
            for row, eq in enumerate(equations):
                J[row, col] = r1.get(eq, 0) - r0.get(eq, 0)
        rhs = mpmath.matrix([-r0.get(eq, 0) for eq in equations])
        solution = mpmath.lu_solve(J, rhs)
        for idx, key in enumerate(unknowns):
            base[key] = solution[idx]
        coeffs = base
        if n == 2:
            check = _order_residual(coeffs, kappa, a, e, 3)
            consistency = max(abs(check.get((3, 1), 0)), abs(check.get((3, -1), 0)))
    return {key: v for key, v in coeffs.items() if key[0] <= K}, consistency


def _printed_levels(A: mpc, B: mpc, kappa: mpc, alpha: mpc, e: mpf) -> Dict[Key, mpc]:
    """Closed forms of levels 1..6."""
    r3 = mpmath.sqrt(3)
    i3 = mpc(0, 1) * r3
    Q = alpha ** 2 + 8 * kappa * alpha + 10 * kappa ** 2
    out: Dict[Key, mpc] = {(1, 1): A, (1, -1): B, (1, 0): mpc(0)}
    for sgn, a1 in ((1, A), (-1, B)):
        out[2, 2 * sgn] = a1 ** 2 / 3
        out[2, sgn] = mpc(0)
        out[3, 3 * sgn] = a1 ** 3 / 12
        out[3, 2 * sgn] = mpc(0)
        out[3, sgn] = sgn * i3 * a1 / (216 * e) * (3 * Q - 3 - sgn * 12 * alpha - sgn * 80 * kappa)
        out[4, 4 * sgn] = a1 ** 4 / 54
        out[4, 3 * sgn] = out[4, sgn] = mpc(0)
        out[4, 2 * sgn] = sgn * i3 * a1 ** 2 / (4 * 81 * e) * (3 * Q + 1 - sgn * 12 * alpha - sgn * 54 * kappa)
        out[5, 5 * sgn] = 5 * a1 ** 5 / 1296
        out[5, 4 * sgn] = out[5, 2 * sgn] = mpc(0)
        out[5, 3 * sgn] = sgn * i3 * a1 ** 3 / (32 * 81 * e) * (9 * Q + 1 - sgn * 36 * alpha - sgn * 138 * kappa)
        out[5, sgn] = -a1 / (128 * 243 * e ** 2) * (
            9 * Q ** 2 - sgn * (24 * alpha ** 3 + 48 * alpha ** 2 * kappa - 912 * alpha * kappa ** 2
                                - 3440 * kappa ** 3)
            - 90 * alpha ** 2 - 1296 * kappa * alpha - 4168 * kappa ** 2 + sgn * (216 * alpha + 240 * kappa) + 81)
        out[6, 6 * sgn] = a1 ** 6 / 1296
        out[6, 5 * sgn] = out[6, 3 * sgn] = out[6, sgn] = mpc(0)
        out[6, 4 * sgn] = sgn * i3 * a1 ** 4 / (8 * 729 * e) * (6 * Q - 1 - sgn * 24 * alpha - sgn * 84 * kappa)
        out[6, 2 * sgn] = -a1 ** 2 / (32 * 729 * e ** 2) * (
            9 * Q ** 2 - 171 - sgn * (48 * alpha ** 3 + 396 * alpha ** 2 * kappa + 576 * alpha * kappa ** 2
                                      - 880 * kappa ** 3)
            - 30 * alpha ** 2 - 816 * kappa * alpha - 2770 * kappa ** 2 + sgn * (384 * alpha + 1408 * kappa))
    out[2, 0] = (alpha + 12 * kappa) / (6 * i3 * e)
    out[3, 0] = out[4, 0] = out[5, 0] = mpc(0)
    out[6, 0] = -i3 / (8 * 729 * e ** 3) * (alpha ** 3 + 18 * alpha ** 2 * kappa + 72 * alpha * kappa ** 2
                                           + 60 * kappa ** 3 - 12 * alpha - 90 * kappa)
    return out


def _reciprocal_levels(coeffs: Dict[Key, mpc], K: int, e: mpf) -> Dict[Key, mpc]:
    """b_{k,j} = 2e [(1 + V)^-1]_{k-1,j}, so b/u = sum b_{k,j} tau^(-k/3) w^j."""
    V = {key: c for key, c in coeffs.items() if c != 0}
    G: Dict[Key, mpc] = {(0, 0): mpc(1)}
    power: Dict[Key, mpc] = {(0, 0): mpc(1)}
    for m in range(1, K + 1):
        power = _series_mul(power, V, K)
        for key, c in power.items():
            _bump(G, key, c * (-1 if m % 2 else 1))
    return {(k + 1, j): 2 * e * c for (k, j), c in G.items()}


def _diagonal_conjecture(k: int, a1: mpc) -> mpc:
    return k * a1 ** k / mpf(6) ** (k - 1)


def _off_diagonal_conjecture(k: int, sgn: int, a1: mpc, kappa: mpc, alpha: mpc, e: mpf) -> mpc:
    m = k - 2
    Q = alpha ** 2 + 8 * kappa * alpha + 10 * kappa ** 2
    i3 = mpc(0, 1) * mpmath.sqrt(3)
    return sgn * i3 * a1 ** m / (mpf(6) ** k * e) * (
        3 * m ** 2 * Q - 5 * m ** 2 + 24 * m - 24 - sgn * 12 * m ** 2 * alpha - sgn * 6 * (5 * m ** 2 + 8 * m) * kappa)


def expansion_from_leading(K: int, a11: Any, kappa: Any, a: Any = 0, eps_b: Any = 1, eps: int = 1,
                           digits: Optional[int] = None) -> ExpansionTable:
    """
    Expansion table from a_{1,1}, nu+1 and a; a_{1,-1} follows from the product relation.

    Levels up to 6 are the closed forms; higher levels come from order
    matching. Generated levels are compared with the closed forms and with
    the diagonal and next-to-diagonal conjectures.
    """
    if not 1 <= K <= MAX_LEVEL:
        raise ValidationError(f'K must lie in 1..{MAX_LEVEL}', {'K': K})
    A_hp = ComplexHP.of(a11, digits)
    d = A_hp.digits
    with mpmath.workdps(d + 10):
        A = A_hp.value
        kap = _c(kappa, d)
        aa = _c(a, d)
        eb = _real(eps_b, d)
        e = eb ** (mpf(1) / 3)
        alpha = 2 * mpc(0, 1) * mpmath.sqrt(3) * aa
        B = -mpc(0, 1) * kap / (mpmath.sqrt(3) * e * A)
        printed = _printed_levels(A, B, kap, alpha, e)
        generated, consistency = _generate(K, A, B, kap, aa, e)
        table = {key: v for key, v in printed.items() if key[0] <= min(K, PRINTED_LEVELS)}
        for key, v in generated.items():
            if key[0] > PRINTED_LEVELS:
                table[key] = v
        for k in range(1, K + 1):
            for jj in range(-k, k + 1):
                table.setdefault((k, jj), mpc(0))
        scale = max(1, abs(A), abs(B))
        checks: Dict[str, mpf] = {'product_relation': consistency}
        checks['printed_vs_generated'] = max(
            (abs(printed[key] - generated.get(key, 0)) / scale ** key[0]
             for key in printed if key[0] <= min(K, PRINTED_LEVELS)), default=mpf(0))
        checks['parity'] = max((abs(v) for (k, jj), v in generated.items() if (k - jj) % 2), default=mpf(0))
        checks['diagonal'] = max(
            max(abs(generated[k, k] - _diagonal_conjecture(k, A)), abs(generated[k, -k] - _diagonal_conjecture(k, B)))
            / scale ** k for k in range(1, K + 1))
        checks['next_to_diagonal'] = max(
            (max(abs(generated[k, k - 2] - _off_diagonal_conjecture(k, 1, A, kap, alpha, e)),
                 abs(generated[k, 2 - k] - _off_diagonal_conjecture(k, -1, B, kap, alpha, e))) / scale ** k
             for k in range(4, K + 1)), default=mpf(0))
        b = _reciprocal_levels(table, K, e)
        if K >= 3:
            Q = alpha ** 2 + 8 * kap * alpha + 10 * kap ** 2
            i3 = mpc(0, 1) * mpmath.sqrt(3)
            printed_b4 = {(4, 0): mpc(0), (4, 2): mpc(0), (4, -2): mpc(0),
                          (4, 3): -mpf(5) / 6 * e * A ** 3, (4, -3): -mpf(5) / 6 * e * B ** 3}
            for sgn, a1 in ((1, A), (-1, B)):
                printed_b4[4, sgn] = -sgn * i3 * a1 / 108 * (3 * (Q - 1) + sgn * 12 * alpha + sgn * 40 * kap)
            checks['b4_printed'] = max(abs(b.get(key, 0) - v) / scale ** 4 for key, v in printed_b4.items())
        tol = mpf(10) ** (10 - d)
        flags = tuple(f'check_failed:{name}' for name, v in checks.items() if v > tol)
        for flag in flags:
            logger.warning(f'expansion table: {flag}')
        logger.info(f'expansion table to level {K} built')
        return ExpansionTable(K, {key: ComplexHP(v, d) for key, v in table.items()},
                              {key: ComplexHP(v, d) for key, v in b.items()},
                              ComplexHP(kap, d), ComplexHP(alpha, d), eb, eps, checks, flags)


def expansion_coeffs(K: int, params: GeneralAParams) -> ExpansionTable:
    """Expansion table of the solution described by params (a_{1,+-1} from the large-tau phase z)."""
    d = params.digits
    with mpmath.workdps(d + 10):
        kappa, z = _kappa_z(params)
        e = params.eps_b ** (mpf(1) / 3)
        a11 = (mpmath.sqrt(kappa) * mpmath.expjpi(mpf(3) / 4) / (3 ** (mpf(1) / 4) * mpmath.sqrt(e))
               * mpmath.exp(kappa * mpmath.log(3 ** (mpf(3) / 2) * e) + z))
    return expansion_from_leading(K, ComplexHP(a11, d), params.nu_plus_one, params.a, params.eps_b, params.eps)


def expansion_residual(table: ExpansionTable, tau: Any, levels: Optional[int] = None) -> mpf:
    """
    Relative residual of the truncated expansion in u D^2 u - (Du)^2 = tau(-8 eps u^3 + 2abu) + b^2 tau^2,
    D = tau d/dtau, evaluated numerically at tau.
    """
    d = table.kappa.digits
    K = levels or table.K
    with mpmath.workdps(d + 10):
        tt = _real(tau, d)
        kappa = table.kappa.value
        a = table.alpha.value / (2 * mpc(0, 1) * mpmath.sqrt(3))
        eb = table.eps_b
        e = eb ** (mpf(1) / 3)
        b = table.eps * eb
        x = tt ** (mpf(1) / 3)
        theta = 3 ** (mpf(3) / 2) * e * x ** 2
        w = mpmath.power(tt, 2 * kappa / 3) * mpmath.expj(theta)
        i_beta = mpc(0, 2) * mpmath.sqrt(3) * e
        V = DV = D2V = mpc(0)
        for (k, j), coeff in table.a.items():
            if k > K or coeff.value == 0:
                continue
            term = coeff.value * x ** (-k) * w ** j
            lam = (2 * j * kappa - k) / 3 + i_beta * j * x ** 2
            V += term
            DV += lam * term
            D2V += (lam ** 2 + mpf(2) / 3 * i_beta * j * x ** 2) * term
        c = table.eps * e ** 2 / 2
        u = c * x * (1 + V)
        Du = c * (x / 3 * (1 + V) + x * DV)
        D2u = c * (x / 9 * (1 + V) + 2 * x / 3 * DV + x * D2V)
        lhs = u * D2u - Du ** 2
        rhs = tt * (-8 * table.eps * u ** 3 + 2 * a * b * u) + b ** 2 * tt ** 2
        return abs(lhs - rhs) / abs(b ** 2 * tt ** 2)


# --- real solutions, H(0) > 0 ------------------------------------------------------------

@dataclass(frozen=True)
class TzitzeicaData:
    H0: ComplexHP
    amplitude: mpf
    phase: mpf

    def to_json(self) -> Dict[str, Any]:
        d = self.H0.digits
        return {'H0': self.H0.to_json(), 'amplitude': mpmath.nstr(self.amplitude, d),
                'phase': mpmath.nstr(self.phase, d)}


def tzitzeica_parameters(H0: Any, digits: Optional[int] = None) -> TzitzeicaData:
    """
    a = sqrt(ln g3 / 2 pi), phi = a^2 ln 24 + arg Gamma(-i a^2) + arg g2 from the 3x3 data.

    Raises:
        ConditionViolationError: H0 is not real and positive
    """
    h = ComplexHP.of(H0, digits)
    d = h.digits
    tol = membership_tol(d)
    if abs(h.im) > tol or not h.re > 0:
        raise ConditionViolationError('the real-solution asymptotics needs real H(0) > 0', ['H0 real, H0 > 0'],
                                      {'H0': str(h)})
    with mpmath.workdps(d + 10):
        if abs(h.value - 1) <= tol:
            return TzitzeicaData(h, mpf(0), mpf(0))
        data = tz3x3_data(h)['data']
        g3 = data.g3.re
        amp = mpmath.sqrt(mpmath.log(g3) / (2 * mpmath.pi))
        a2 = amp ** 2
        phase = a2 * mpmath.log(24) + mpmath.arg(gamma_mp(mpc(0, -a2), d)) + mpmath.arg(data.g2.value)
    return TzitzeicaData(h, amp, phase)


def _tz_phase(x: mpf, data: TzitzeicaData) -> mpf:
    return 2 * x + data.amplitude ** 2 * mpmath.log(x) + data.phase - mpmath.pi / 4


def tzitzeica_real(r: Any, H0: Any, digits: Optional[int] = None) -> AsymptoticEval:
    """
    H(r) = 1 + a sqrt6 cos(2 sqrt(-3r) + a^2 ln sqrt(-3r) + phi - pi/4) / (-3r)^(1/4) for H(0) > 0.
    """
    data = tzitzeica_parameters(H0, digits)
    d = data.H0.digits
    rr = _check_r(r, d)
    with mpmath.workdps(d + 10):
        if data.amplitude == 0:
            return AsymptoticEval(rr, ComplexHP(mpc(1), d), ComplexHP(mpc(0), d), 'tzitzeica',
                                  flags=('formal_constant',))
        x = mpmath.sqrt(-3 * rr)
        phase = _tz_phase(x, data)
        value = 1 + data.amplitude * mpmath.sqrt(6) * mpmath.cos(phase) / mpmath.sqrt(x)
        return AsymptoticEval(rr, ComplexHP(mpc(value), d), ComplexHP(mpc(phase), d), 'tzitzeica')


def tzitzeica_first_minimum(H0: Any, digits: Optional[int] = None) -> Tuple[mpf, mpf]:
    """
    The minimum of the real-solution asymptotics whose phase lies in (0, 2 pi).

    Returns:
        (r_m, H_as(r_m))
    """
    data = tzitzeica_parameters(H0, digits)
    d = data.H0.digits
    if data.amplitude == 0:
        raise ValidationError('H(0) = 1 has constant asymptotics without minima')
    with mpmath.workdps(d + 10):
        a2 = data.amplitude ** 2
        x_pi = mpmath.findroot(lambda x: _tz_phase(x, data) - mpmath.pi, mpf(1))

        def slope(x):
            p = _tz_phase(x, data)
            return 2 * x * (2 + a2 / x) * mpmath.sin(p) + mpmath.cos(p)

        x_m = mpmath.findroot(slope, x_pi)
        r_m = -x_m ** 2 / 3
        value = tzitzeica_real(r_m, data.H0).value.re
    logger.info(f'first minimum of the real-solution asymptotics at r = {mpmath.nstr(r_m, 12)}')
    return r_m, value


def b_coeffs(table: ExpansionTable) -> Dict[Key, ComplexHP]:
    """Coefficients b_{k,j} of b/u carried by the table."""
    return dict(table.b)
