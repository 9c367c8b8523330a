"""
Numerical solution of the H(r) equation on the negative semi-axis.

H(r) is holomorphic at r = 0 but the equation is singular there, so the
state is bootstrapped from the Taylor series at a small r1 < 0 and then
propagated with an embedded Cash-Karp (5,4) pair. The independent variable
of the stepper is s = sqrt(-r): the solution oscillates with a constant
period in s, and the 1/sqrt(-r) weight of the companion integral I(r)
becomes the smooth factor 2/H.

State components are (H, dH/dr, I) with

    dH/ds  = -2 s H'
    dH'/ds = -2 s H'^2 / H + 2 (H^2 - 1/H - H') / s
    dI/ds  = 2 / H
"""

import logging
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import mpmath
from mpmath import mpc, mpf

from modules.exceptions import (
    ChartDomainError,
    RadiusViolationError,
    SingularityApproachError,
    StepUnderflowError,
    ValidationError,
    ZeroA0Error,
)
from modules.series import evaluate_series, radius_bound, taylor_coeffs
from modules.specfun import DEFAULT_DIGITS, MIN_DIGITS, ComplexHP, _decimal

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_COUNT = 1837
DEFAULT_R1 = '-1e-8'
CSV_HEADER = ['r', 're_H', 'im_H', 're_dH', 'im_dH', 're_I', 'im_I']
CHARTS = ('to_u', 'to_y')

# Cash-Karp tableau: stage coefficients, fifth-order weights and the
# difference between the fifth- and fourth-order weights.
_F = Fraction
_STAGES = (
    (_F(1, 5),),
    (_F(3, 40), _F(9, 40)),
    (_F(3, 10), _F(-9, 10), _F(6, 5)),
    (_F(-11, 54), _F(5, 2), _F(-70, 27), _F(35, 27)),
    (_F(1631, 55296), _F(175, 512), _F(575, 13824), _F(44275, 110592), _F(253, 4096)),
)
_NODES = (_F(0), _F(1, 5), _F(3, 10), _F(3, 5), _F(1), _F(7, 8))
_WEIGHTS = (_F(37, 378), _F(0), _F(250, 621), _F(125, 594), _F(0), _F(512, 1771))
_ERROR = (_F(-277, 64512), _F(0), _F(6925, 370944), _F(-6925, 202752),
          _F(-277, 14336), _F(277, 7084))


@lru_cache(maxsize=16)
def _tableau(dps: int) -> Dict[str, Any]:
    with mpmath.workdps(dps):
        def conv(fr: Fraction) -> mpf:
            return mpf(fr.numerator) / fr.denominator

        return {
            'stages': tuple(tuple(conv(c) for c in row) for row in _STAGES),
            'nodes': tuple(conv(c) for c in _NODES),
            'weights': tuple(conv(c) for c in _WEIGHTS),
            'error': tuple(conv(c) for c in _ERROR),
        }


@dataclass(frozen=True)
class SolveConfig:
    """
    Integration settings.

    Attributes:
        digits: decimal working precision
        r1: bootstrap point, negative
        series_order: Taylor order used at r1
        rel_tol: relative local error target (default max(1e-12, 10^(8-digits)))
        abs_tol: absolute local error target (default max(1e-14, 10^(8-digits)))
        max_step: largest step in s = sqrt(-r)
        sample_count: number of output samples on the uniform r grid
        max_steps: accepted plus rejected step attempts before giving up
    """

    digits: int = DEFAULT_DIGITS
    r1: str = DEFAULT_R1
    series_order: int = 8
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None
    max_step: float = 0.25
    sample_count: int = DEFAULT_SAMPLE_COUNT
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValidationError(f'digits must be an integer >= {MIN_DIGITS}', {'digits': self.digits})
        object.__setattr__(self, 'r1', str(self.r1))
        if not self.r1_value() < 0:
            raise ValidationError('bootstrap point r1 must be negative', {'r1': self.r1})
        if self.series_order < 1:
            raise ValidationError('series_order must be positive', {'series_order': self.series_order})
        if self.sample_count < 2:
            raise ValidationError('sample_count must be at least 2', {'sample_count': self.sample_count})
        if not self.max_step > 0:
            raise ValidationError('max_step must be positive', {'max_step': self.max_step})
        floor = 10.0 ** (8 - self.digits)
        for name in ('rel_tol', 'abs_tol'):
            value = getattr(self, name)
            if value is not None and not floor <= value < 1:
                raise ValidationError(f'{name} must lie in [10^(8-digits), 1)',
                                      {name: value, 'digits': self.digits})

    def r1_value(self) -> mpf:
        with mpmath.workdps(self.digits + 5):
            return mpf(self.r1)

    def tolerances(self) -> Tuple[float, float]:
        floor = 10.0 ** (8 - self.digits)
        rel = self.rel_tol if self.rel_tol is not None else max(1e-12, floor)
        abs_ = self.abs_tol if self.abs_tol is not None else max(1e-14, floor)
        return rel, abs_

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        data['rel_tol'], data['abs_tol'] = self.tolerances()
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'SolveConfig':
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True)
class Sample:
    r: mpf
    H: ComplexHP
    dH: ComplexHP
    I: ComplexHP

    def row(self) -> List[str]:
        d = self.H.digits
        return [_decimal(self.r, d),
                _decimal(self.H.re, d), _decimal(self.H.im, d),
                _decimal(self.dH.re, d), _decimal(self.dH.im, d),
                _decimal(self.I.re, d), _decimal(self.I.im, d)]


@dataclass
class Trajectory:
    """Samples ordered by strictly decreasing r, starting at the bootstrap point."""

    samples: List[Sample]
    config: SolveConfig
    H0: ComplexHP
    stats: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def r_values(self) -> List[mpf]:
        return [p.r for p in self.samples]

    def endpoint(self) -> Sample:
        return self.samples[-1]

    def rows(self) -> List[List[str]]:
        return [p.row() for p in self.samples]

    def metadata(self) -> Dict[str, Any]:
        return {
            'H0': self.H0.to_json(),
            'config': self.config.to_json(),
            'r_end': _decimal(self.samples[-1].r, self.H0.digits),
            'sample_count': len(self.samples),
            'stats': dict(self.stats),
        }

    @classmethod
    def from_rows(cls, rows: List[List[str]], metadata: Dict[str, Any]) -> 'Trajectory':
        config = SolveConfig.from_json(metadata['config'])
        d = config.digits
        samples = []
        with mpmath.workdps(d + 5):
            for row in rows:
                r, hr, hi, dr, di, ir, ii = row
                samples.append(Sample(mpf(r), ComplexHP(mpc(mpf(hr), mpf(hi)), d),
                                      ComplexHP(mpc(mpf(dr), mpf(di)), d),
                                      ComplexHP(mpc(mpf(ir), mpf(ii)), d)))
        return cls(samples, config, ComplexHP.from_json(metadata['H0']), metadata.get('stats', {}))


# --- bootstrap -------------------------------------------------------------------

def _reciprocal_series(h: List[mpc]) -> List[mpc]:
    beta = [1 / h[0]]
    for j in range(1, len(h)):
        acc = mpc(0)
        for i in range(1, j + 1):
            acc += h[i] * beta[j - i]
        beta.append(-acc / h[0])
    return beta


def bootstrap(H0: Any, cfg: SolveConfig) -> Tuple[ComplexHP, ComplexHP, ComplexHP]:
    """
    Initial state at r1 from the truncated Taylor series.

    Args:
        H0: H(0)
        cfg: solver configuration

    Returns:
        (H(r1), H'(r1), I(r1)); I is the termwise integral of the
        reciprocal series of H against 1/sqrt(-r) over [r1, 0]

    Raises:
        ZeroA0Error: H0 = 0
        RadiusViolationError: |r1| outside the certified convergence disc
    """
    d = cfg.digits
    h0 = ComplexHP.of(H0, d)
    if h0.is_zero():
        raise ZeroA0Error('H(0) must be nonzero')
    a0 = -h0
    _, R = radius_bound(a0)
    r1 = cfg.r1_value()
    with mpmath.workdps(d + 5):
        if not abs(r1) < 1 / (2 * R):
            raise RadiusViolationError('bootstrap point lies outside the certified radius',
                                       {'r1': cfg.r1, 'limit': mpmath.nstr(1 / (2 * R), 10)})
    table = taylor_coeffs('numeric', cfg.series_order, a0, d)
    H, dH = evaluate_series(table, r1)
    with mpmath.workdps(d + 10):
        h = [h0.value] + [c.value for c in table.a[1:]]
        beta = _reciprocal_series(h)
        t = -r1
        I = mpc(0)
        for k, b in enumerate(beta):
            I += b * (-1) ** k * t ** (k + mpf(1) / 2) / (k + mpf(1) / 2)
    return ComplexHP(H, d), ComplexHP(dH, d), ComplexHP(I, d)


# --- stepping --------------------------------------------------------------------

def _rhs(s: mpf, y: Tuple[mpc, mpc, mpc]) -> Tuple[mpc, mpc, mpc]:
    H, dH, _ = y
    if H == 0:
        raise SingularityApproachError('H vanished inside a step', -s * s, H)
    inv = 1 / H
    return (-2 * s * dH,
            -2 * s * dH * dH * inv + 2 * (H * H - inv - dH) / s,
            2 * inv)


def _cash_karp(s: mpf, y: Tuple[mpc, ...], h: mpf, tab: Dict[str, Any]):
    k = [_rhs(s, y)]
    for i, row in enumerate(tab['stages']):
        yi = tuple(y[c] + h * sum(b * k[j][c] for j, b in enumerate(row)) for c in range(3))
        k.append(_rhs(s + tab['nodes'][i + 1] * h, yi))
    y5 = tuple(y[c] + h * sum(w * k[j][c] for j, w in enumerate(tab['weights']) if w)
               for c in range(3))
    err = tuple(h * sum(e * k[j][c] for j, e in enumerate(tab['error']) if e) for c in range(3))
    return y5, err


def _guard(s: mpf, H: mpc, abs_tol: mpf) -> None:
    m = abs(H)
    if m < 10 * abs_tol or m > 1 / abs_tol:
        raise SingularityApproachError('integration approached a zero or pole of H', -s * s, H,
                                       {'abs_H': mpmath.nstr(m, 10)})


def _sample_grid(r1: mpf, r_end: mpf, count: int) -> List[mpf]:
    step = (r_end - r1) / (count - 1)
    grid = [r1 + j * step for j in range(count)]
    grid[-1] = r_end
    return grid


def integrate(H0: Any, r_end: Any, cfg: Optional[SolveConfig] = None) -> Trajectory:
    """
    Propagate (H, H', I) from r1 down to r_end.

    Args:
        H0: H(0)
        r_end: final point, r_end < r1 < 0
        cfg: solver configuration

    Returns:
        Trajectory with cfg.sample_count samples on a uniform r grid

    Raises:
        ValidationError: r_end not below r1
        SingularityApproachError: |H| left [10 abs_tol, 1/abs_tol]
        StepUnderflowError: step size collapsed or the step budget ran out
    """
    cfg = cfg or SolveConfig()
    d = cfg.digits
    h0 = ComplexHP.of(H0, d)
    H1, dH1, I1 = bootstrap(h0, cfg)
    dps = d + 5
    rel_f, abs_f = cfg.tolerances()
    tab = _tableau(dps)
    with mpmath.workdps(dps):
        r1 = cfg.r1_value()
        rend = ComplexHP.of(r_end, d).re if not isinstance(r_end, mpf) else r_end
        if not rend < r1:
            raise ValidationError('r_end must lie below the bootstrap point',
                                  {'r_end': str(r_end), 'r1': cfg.r1})
        rel, abs_ = mpf(rel_f), mpf(abs_f)
        grid = _sample_grid(r1, rend, cfg.sample_count)
        targets = [mpmath.sqrt(-r) for r in grid]
        s = targets[0]
        y = (H1.value, dH1.value, I1.value)
        h = min(mpf(cfg.max_step), s / 10)
        underflow = mpf(10) ** (5 - d)
        accepted = rejected = 0
        samples = [Sample(grid[0], H1, dH1, I1)]
        logger.info(f'Integrating H0={h0} from r1={cfg.r1} to {mpmath.nstr(rend, 8)}'
                    f' (rel_tol={rel_f:g}, abs_tol={abs_f:g})')
        for idx in range(1, len(targets)):
            target = targets[idx]
            while s < target:
                if accepted + rejected >= cfg.max_steps:
                    raise StepUnderflowError('step budget exhausted',
                                             {'r': mpmath.nstr(-s * s, 12), 'steps': accepted + rejected})
                landing = target - s <= h
                trial = target - s if landing else h
                if trial < underflow * max(1, s):
                    raise StepUnderflowError('step size underflow',
                                             {'r': mpmath.nstr(-s * s, 12), 'h': mpmath.nstr(trial, 5)})
                y_new, e = _cash_karp(s, y, trial, tab)
                err = max(abs(e[c]) / (abs_ + rel * max(abs(y[c]), abs(y_new[c]))) for c in range(3))
                factor = mpf(5) if err == 0 else min(mpf(5), max(mpf('0.2'), mpf('0.9') * err ** (-mpf(1) / 5)))
                if err <= 1:
                    accepted += 1
                    s = target if landing else s + trial
                    y = y_new
                    _guard(s, y[0], abs_)
                    if not landing:
                        h = min(trial * factor, mpf(cfg.max_step))
                    else:
                        h = min(max(h, trial * factor), mpf(cfg.max_step))
                else:
                    rejected += 1
                    h = trial * factor
            samples.append(Sample(grid[idx], ComplexHP(y[0], d), ComplexHP(y[1], d), ComplexHP(y[2], d)))
    stats = {'accepted_steps': accepted, 'rejected_steps': rejected}
    logger.info(f'Integration finished: {accepted} accepted, {rejected} rejected steps')
    return Trajectory(samples, cfg, h0, stats)


# --- charts ----------------------------------------------------------------------

def chart_point(view: str, r: Any, H: Any, digits: Optional[int] = None) -> Tuple[mpf, ComplexHP]:
    """
    Map (r, H) to (tau, u) for 'to_u' or (t, y) for 'to_y'.

    to_u uses r = -(3/2)^2 tau^(4/3), u = tau^(1/3) H / 2 and needs r < 0;
    to_y uses r = (3/4)^2 t^(4/3), y = t^(1/3) H and needs r > 0.
    """
    Hh = ComplexHP.of(H, digits)
    d = Hh.digits
    with mpmath.workdps(d + 5):
        rr = mpf(r) if isinstance(r, (mpf, str)) else mpf(ComplexHP.of(r, d).re)
        if view == 'to_u':
            if not rr < 0:
                raise ChartDomainError('the u chart needs r < 0', {'r': str(r)})
            tau = (-4 * rr / 9) ** (mpf(3) / 4)
            return tau, ComplexHP(tau ** (mpf(1) / 3) * Hh.value / 2, d)
        if view == 'to_y':
            if not rr > 0:
                raise ChartDomainError('the y chart needs r > 0', {'r': str(r)})
            t = (16 * rr / 9) ** (mpf(3) / 4)
            return t, ComplexHP(t ** (mpf(1) / 3) * Hh.value, d)
    raise ValidationError(f'unknown chart {view!r}', {'allowed': list(CHARTS)})


def chart_inverse(view: str, x: Any, value: Any, digits: Optional[int] = None) -> Tuple[mpf, ComplexHP]:
    """Inverse of chart_point: (tau, u) or (t, y) back to (r, H)."""
    v = ComplexHP.of(value, digits)
    d = v.digits
    with mpmath.workdps(d + 5):
        xx = mpf(x)
        if not xx > 0:
            raise ChartDomainError('chart variable must be positive', {'x': str(x)})
        if view == 'to_u':
            return -mpf(9) / 4 * xx ** (mpf(4) / 3), ComplexHP(2 * v.value / xx ** (mpf(1) / 3), d)
        if view == 'to_y':
            return mpf(9) / 16 * xx ** (mpf(4) / 3), ComplexHP(v.value / xx ** (mpf(1) / 3), d)
    raise ValidationError(f'unknown chart {view!r}', {'allowed': list(CHARTS)})


def transform(view: str, trajectory: Trajectory) -> List[Tuple[mpf, ComplexHP]]:
    """Chart every sample of a trajectory."""
    if view not in CHARTS:
        raise ValidationError(f'unknown chart {view!r}', {'allowed': list(CHARTS)})
    return [chart_point(view, p.r, p.H) for p in trajectory.samples]


# --- independent verification ---------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    max_residual: mpf
    index: int
    r: mpf
    integral_residual: mpf

    def to_json(self) -> Dict[str, Any]:
        return {
            'max_residual': mpmath.nstr(self.max_residual, 6),
            'index': self.index,
            'r': mpmath.nstr(self.r, 12),
            'integral_residual': mpmath.nstr(self.integral_residual, 6),
        }


def residual_check(trajectory: Trajectory, stride: int = 1) -> ResidualReport:
    """
    Scaled residual of H (r H')' - r H'^2 - H^3 + 1 on the samples.

    H'' is the centered difference of the stored H' over +-stride samples.
    The companion integral is checked the same way against -1/(sqrt(-r) H).

    Args:
        trajectory: integrated samples
        stride: half-width of the difference stencil

    Returns:
        ResidualReport with the largest scaled residual and where it occurs
    """
    n = len(trajectory.samples)
    if stride < 1 or n < 3 * stride:
        raise ValidationError('residual check needs at least 3*stride samples',
                              {'samples': n, 'stride': stride})
    d = trajectory.H0.digits
    worst, where, worst_int = mpf(-1), stride, mpf(0)
    with mpmath.workdps(d + 5):
        pts = trajectory.samples
        for i in range(stride, n - stride):
            lo, mid, hi = pts[i - stride], pts[i], pts[i + stride]
            span = hi.r - lo.r
            r = mid.r
            H, dH = mid.H.value, mid.dH.value
            d2H = (hi.dH.value - lo.dH.value) / span
            lhs = H * (dH + r * d2H) - r * dH * dH - H ** 3 + 1
            scale = 1 + abs(H) * abs(dH) + abs(r) * abs(H) * abs(d2H) + abs(r) * abs(dH) ** 2 + abs(H) ** 3
            res = abs(lhs) / scale
            if res > worst:
                worst, where = res, i
            if r < 0:
                exact = -1 / (mpmath.sqrt(-r) * H)
                fd = (hi.I.value - lo.I.value) / span
                worst_int = max(worst_int, abs(fd - exact) / abs(exact))
    logger.info(f'Residual check: max {mpmath.nstr(worst, 4)} at index {where}')
    return ResidualReport(worst, where, trajectory.samples[where].r, worst_int)
