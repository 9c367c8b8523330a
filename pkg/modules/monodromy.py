"""
Monodromy data of the a = 0 solutions.

A solution holomorphic at the origin is fixed by H(0); its monodromy data
lives on the seven-coordinate manifold (s00, s0inf, s1inf, g11, g12, g21,
g22). Only the contracted coordinates (s, g1..g4) matter for the
asymptotics, so MonodromyPoint is the working type and ManifoldPoint is an
optional gauge-fixed lift.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import mpmath
from mpmath import mpc, mpf

from modules.exceptions import (
    BoundaryError,
    ConventionUnreachableError,
    ExcludedValueError,
    ValidationError,
    ZeroA0Error,
)
from modules.specfun import ComplexHP, DEFAULT_DIGITS, gamma_mp

logger = logging.getLogger(__name__)

CONVENTIONS = ('regular', 'singular')
VARIANTS = ('sym_g2neg', 'sym_g2g1', 'tz3x3')


def membership_tol(digits: int) -> mpf:
    return mpf(10) ** (8 - digits)


def _omega(digits: int) -> mpc:
    with mpmath.workdps(digits + 5):
        return mpmath.expjpi(mpf(2) / 3)


def _hp(values: List[mpc], digits: int) -> List[ComplexHP]:
    return [ComplexHP(v, digits) for v in values]


@dataclass(frozen=True)
class ManifoldPoint:
    s00: ComplexHP
    s0inf: ComplexHP
    s1inf: ComplexHP
    g11: ComplexHP
    g12: ComplexHP
    g21: ComplexHP
    g22: ComplexHP

    @property
    def digits(self) -> int:
        return self.g11.digits

    def contract(self) -> 'MonodromyPoint':
        d = self.digits
        with mpmath.workdps(d + 5):
            j = mpc(0, 1)
            g11, g12, g21, g22 = self.g11.value, self.g12.value, self.g21.value, self.g22.value
            s, g1, g2, g3, g4 = _hp([1 + j * self.s00.value, j * g12 * g11, j * g21 * g22,
                                     g11 * g22, g12 * g21], d)
        return MonodromyPoint(s, g1, g2, g3, g4, self)

    def to_json(self) -> Dict[str, Any]:
        return {name: getattr(self, name).to_json()
                for name in ('s00', 's0inf', 's1inf', 'g11', 'g12', 'g21', 'g22')}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'ManifoldPoint':
        return cls(*(ComplexHP.from_json(data[name])
                     for name in ('s00', 's0inf', 's1inf', 'g11', 'g12', 'g21', 'g22')))


@dataclass(frozen=True)
class MonodromyPoint:
    """Contracted data: s = 1 + i s00, g1 = i g12 g11, g2 = i g21 g22, g3 = g11 g22, g4 = g12 g21."""

    s: ComplexHP
    g1: ComplexHP
    g2: ComplexHP
    g3: ComplexHP
    g4: ComplexHP
    lifted: Optional[ManifoldPoint] = None

    @property
    def digits(self) -> int:
        return self.g3.digits

    def values(self) -> Tuple[mpc, mpc, mpc, mpc, mpc]:
        return self.s.value, self.g1.value, self.g2.value, self.g3.value, self.g4.value

    def to_json(self) -> Dict[str, Any]:
        data = {name: getattr(self, name).to_json() for name in ('s', 'g1', 'g2', 'g3', 'g4')}
        if self.lifted is not None:
            data['lift'] = self.lifted.to_json()
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'MonodromyPoint':
        lifted = ManifoldPoint.from_json(data['lift']) if data.get('lift') else None
        return cls(*(ComplexHP.from_json(data[name]) for name in ('s', 'g1', 'g2', 'g3', 'g4')), lifted)


@dataclass(frozen=True)
class Manifold87Point:
    """Target of the contraction symmetries: g1 + g2(1 - s) + g3 = 1, g2(g2 - 1) = g1 g3."""

    s: ComplexHP
    g1: ComplexHP
    g2: ComplexHP
    g3: ComplexHP

    def to_json(self) -> Dict[str, Any]:
        return {name: getattr(self, name).to_json() for name in ('s', 'g1', 'g2', 'g3')}


@dataclass(frozen=True)
class Tz3x3Data:
    """Monodromy data (g1, g2, g3, s = 0) of the 3x3 system of the Tzitzeica reduction."""

    g1: ComplexHP
    g2: ComplexHP
    g3: ComplexHP
    s: ComplexHP

    def to_json(self) -> Dict[str, Any]:
        return {name: getattr(self, name).to_json() for name in ('g1', 'g2', 'g3', 's')}


@dataclass(frozen=True)
class Nu1:
    value: ComplexHP
    convention: str

    @property
    def nu_tilde_plus_one(self) -> ComplexHP:
        """The large-tau parameter nu+1 = i nu1."""
        return self.value * ComplexHP.of('i', self.value.digits)

    def to_json(self) -> Dict[str, Any]:
        return {'value': self.value.to_json(), 'convention': self.convention}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'Nu1':
        return cls(ComplexHP.from_json(data['value']), data['convention'])


# --- lifts -----------------------------------------------------------------------

def _stokes_from_g(s00: mpc, g11: mpc, g12: mpc, g21: mpc, g22: mpc) -> Tuple[mpc, mpc]:
    j = mpc(0, 1)
    s0inf = -j * (g11 ** 2 - g21 ** 2 - s00 * g11 * g21)
    s1inf = -j * (g22 ** 2 - g12 ** 2 + s00 * g12 * g22)
    return s0inf, s1inf


def lift(point: MonodromyPoint) -> ManifoldPoint:
    """
    Gauge-fixed lift of contracted data to the seven-coordinate manifold.

    The gauge is g11 = 1 whenever g3 != 0. At g3 = 0 either g21 = 1 with
    g11 = 0, or g11 = 1 with g22 = 0, depending on which of g1, g2 vanishes.
    """
    d = point.digits
    with mpmath.workdps(d + 5):
        j = mpc(0, 1)
        s, g1, g2, g3, g4 = point.values()
        s00 = j * (1 - s)
        if g3 != 0:
            g11, g22 = mpc(1), g3
            g12 = -j * g1
            g21 = -j * g2 / g3
        elif g2 != 0:
            g11, g21 = mpc(0), mpc(1)
            g22 = -j * g2
            g12 = g4
        elif g1 != 0:
            g11, g22 = mpc(1), mpc(0)
            g12 = -j * g1
            g21 = g4 / g12
        else:
            raise ValidationError('contracted data with g1 = g2 = g3 = 0 is not on the manifold')
        s0inf, s1inf = _stokes_from_g(s00, g11, g12, g21, g22)
        return ManifoldPoint(*_hp([s00, s0inf, s1inf, g11, g12, g21, g22], d))


def _with_lift(point: MonodromyPoint) -> MonodromyPoint:
    return MonodromyPoint(point.s, point.g1, point.g2, point.g3, point.g4, lift(point))


# --- H(0) -> monodromy -------------------------------------------------------------

def _excluded_case(h: mpc, digits: int) -> Optional[int]:
    tol = membership_tol(digits)
    w = _omega(digits)
    if abs(h - 1) <= tol:
        return 1
    if abs(h - w) <= tol:
        return 2
    if abs(h - mpmath.conj(w)) <= tol:
        return 3
    return None


def from_H0(H0: Any, digits: Optional[int] = None) -> MonodromyPoint:
    """
    Contracted monodromy data of the solution with H(0) = H0.

    Args:
        H0: value at the origin
        digits: precision override

    Returns:
        MonodromyPoint with s = 0, carrying the g11 = 1 lift. H0 = 1 returns
        the algebraic point g3 = 1, g1 = g2 = g4 = 0.

    Raises:
        ZeroA0Error: H0 = 0
        ExcludedValueError: H0 = exp(+-2 pi i/3); the error names the algebraic case
    """
    h = ComplexHP.of(H0, digits)
    d = h.digits
    if h.is_zero():
        raise ZeroA0Error('H(0) must be nonzero')
    case = _excluded_case(h.value, d)
    if case == 1:
        return algebraic_cases(d)[0]['point']
    if case is not None:
        raise ExcludedValueError(f'H(0) = {h} is an algebraic solution; use algebraic case ({case})',
                                 case, {'H0': str(h)})
    with mpmath.workdps(d + 5):
        x = h.value
        w = _omega(d)
        wb = mpmath.conj(w)
        den = 3 * x
        g4 = (x - 1) ** 2 / den
        g3 = (x - w) * (x - wb) / den
        g2 = -wb * (x - 1) * (x - wb) / den
        g1 = w * (x - 1) * (x - w) / den
        point = MonodromyPoint(*_hp([mpc(0), g1, g2, g3, g4], d))
    return _with_lift(point)


# --- residuals ---------------------------------------------------------------------

def _contracted_residuals(point: MonodromyPoint) -> 'OrderedDict[str, mpf]':
    s, g1, g2, g3, g4 = point.values()
    out = OrderedDict()
    out['det'] = abs(g3 - g4 - 1)
    out['product'] = abs(g3 * g4 + g1 * g2)
    out['contr_linear'] = abs(g1 - g2 + g3 * (1 - s) - 1)
    out['contr_quadratic'] = abs(g3 * (g3 - 1) + g2 * g1)
    out['contr_reduced'] = abs(g1 ** 2 + g1 * g3 * (1 - s) + g3 ** 2 - g1 - g3)
    return out


def manifold_residuals(point: Any) -> 'OrderedDict[str, mpf]':
    """
    |LHS - RHS| of every defining equation of the point's manifold.

    ManifoldPoint: the five monodromy relations, the product of the two
    Stokes-multiplier relations (implied by the rest) and the residuals of
    its contraction. MonodromyPoint: the contracted relations, plus the
    lift's residuals when a lift is attached. Manifold87Point: the two
    target-manifold equations.
    """
    if isinstance(point, ManifoldPoint):
        with mpmath.workdps(point.digits + 5):
            j = mpc(0, 1)
            s00, s0, s1 = point.s00.value, point.s0inf.value, point.s1inf.value
            g11, g12, g21, g22 = point.g11.value, point.g12.value, point.g21.value, point.g22.value
            left4 = g11 ** 2 - g21 ** 2 - s00 * g11 * g21
            left5 = g22 ** 2 - g12 ** 2 + s00 * g12 * g22
            out = OrderedDict()
            out['mdta2'] = abs(s0 * s1 + 2 + j * s00)
            out['mdta3'] = abs(g21 * g22 - g11 * g12 + s00 * g11 * g22 - j)
            out['mdta4'] = abs(left4 - j * s0)
            out['mdta5'] = abs(left5 - j * s1)
            out['mdta6'] = abs(g11 * g22 - g12 * g21 - 1)
            out['mdta4x5'] = abs(left4 * left5 - 2 - j * s00)
            for name, value in _contracted_residuals(point.contract()).items():
                out[name] = value
        return out
    if isinstance(point, MonodromyPoint):
        with mpmath.workdps(point.digits + 5):
            out = _contracted_residuals(point)
        if point.lifted is not None:
            for name, value in manifold_residuals(point.lifted).items():
                out.setdefault(name, value)
        return out
    if isinstance(point, Manifold87Point):
        with mpmath.workdps(point.g3.digits + 5):
            s, g1, g2, g3 = point.s.value, point.g1.value, point.g2.value, point.g3.value
            out = OrderedDict()
            out['m87_linear'] = abs(g1 + g2 * (1 - s) + g3 - 1)
            out['m87_quadratic'] = abs(g2 * (g2 - 1) - g1 * g3)
        return out
    raise ValidationError(f'no manifold equations for {type(point).__name__}')


def membership(point: Any, tol: Any = None) -> Dict[str, Any]:
    """Result dict {'valid', 'errors', 'max_residual'} for manifold membership."""
    digits = point.g3.digits if hasattr(point, 'g3') else point.digits
    limit = mpf(tol) if tol is not None else membership_tol(digits)
    residuals = manifold_residuals(point)
    errors = [f'{name}: {mpmath.nstr(value, 5)}' for name, value in residuals.items() if value > limit]
    return {
        'valid': not errors,
        'errors': errors or None,
        'max_residual': mpmath.nstr(max(residuals.values()), 5),
    }


# --- nu1 -----------------------------------------------------------------------------

def nu1_from_point(point: MonodromyPoint, convention: str) -> Nu1:
    """nu1 = ln(g3)/(2 pi), shifted by a multiple of i into the convention's strip."""
    if convention not in CONVENTIONS:
        raise ValidationError(f'unknown convention {convention!r}', {'allowed': list(CONVENTIONS)})
    d = point.digits
    if point.g3.is_zero():
        raise ConventionUnreachableError('nu1 is undefined where g3 = 0')
    with mpmath.workdps(d + 5):
        nu = mpmath.log(point.g3.value) / (2 * mpmath.pi)
        im = nu.imag
        sixth = mpf(1) / 6
        if convention == 'regular':
            if not abs(im) < sixth:
                raise ConventionUnreachableError('arg g3 is outside (-pi/3, pi/3); regular nu1 unreachable',
                                                 {'im_nu1': mpmath.nstr(im, 12)})
        else:
            if im > 0:
                nu -= mpc(0, 1)
            im = nu.imag
            if not -1 < im < 0 or im == -mpf(1) / 2:
                raise ConventionUnreachableError('Im nu1 cannot be placed in (-1, 0) minus {-1/2}',
                                                 {'im_nu1': mpmath.nstr(im, 12)})
    return Nu1(ComplexHP(nu, d), convention)


def nu1(H0: Any, convention: str, digits: Optional[int] = None) -> Nu1:
    """
    The parameter nu1 of the large-|r| asymptotics.

    Args:
        H0: value at the origin
        convention: 'regular' (|Im nu1| < 1/6) or 'singular' (Im nu1 in (-1, 0), not -1/2)
        digits: precision override

    Returns:
        Nu1; its nu_tilde_plus_one is i nu1

    Raises:
        ConventionUnreachableError: no shift by a multiple of i lands in the strip
    """
    h = ComplexHP.of(H0, digits)
    if _excluded_case(h.value, h.digits) in (2, 3):
        raise ConventionUnreachableError('g3 vanishes at H(0) = exp(+-2 pi i/3)', {'H0': str(h)})
    result = nu1_from_point(from_H0(h), convention)
    logger.info(f'nu1({h}, {convention}) = {result.value}')
    return result


# --- algebraic solutions --------------------------------------------------------

def algebraic_cases(digits: Optional[int] = None) -> List[Dict[str, Any]]:
    """
    The three algebraic solutions H = 1, exp(2 pi i/3), exp(-2 pi i/3).

    Each record has the case number, H0, the contracted point with its
    lift, and the g-level relations that characterize it.
    """
    d = digits or DEFAULT_DIGITS
    with mpmath.workdps(d + 5):
        j = mpc(0, 1)
        w = _omega(d)
        zero, one = mpc(0), mpc(1)
        s00 = j
        lifts = [
            (zero, one, zero, zero, one),
            (w, zero, -one, one, j),
            (mpmath.conj(w), one, -j, -j, zero),
        ]
        records = []
        relations = [
            {'g12': '0', 'g21': '0', 'g11*g22': '1', 's0inf': '-i*g11^2', 's1inf': '-i*g22^2'},
            {'g11': '0', 'g12*g21': '-1', 'g21*g22': 'i', 's0inf': 'i*g21^2', 's1inf': 'i*g12^2'},
            {'g22': '0', 'g12*g21': '-1', 'g11*g12': '-i', 's0inf': '-i*g11^2', 's1inf': '-i*g22^2'},
        ]
        for case, (h0, g11, g12, g21, g22) in enumerate(lifts, start=1):
            s0inf, s1inf = _stokes_from_g(s00, g11, g12, g21, g22)
            manifold = ManifoldPoint(*_hp([s00, s0inf, s1inf, g11, g12, g21, g22], d))
            records.append({
                'case': case,
                'H0': ComplexHP(h0, d),
                'point': manifold.contract(),
                'relations': relations[case - 1],
            })
    return records


# --- cross-manifold maps ---------------------------------------------------------

def map_variants(point: MonodromyPoint, which: str) -> Any:
    """
    Transport contracted data to another chart of the monodromy manifold.

    Args:
        point: contracted data
        which: 'sym_g2neg', 'sym_g2g1' (targets on the g1 + g2(1-s) + g3 = 1
            manifold) or 'tz3x3' (s = 0 only)

    Returns:
        Manifold87Point or Tz3x3Data
    """
    d = point.digits
    with mpmath.workdps(d + 5):
        s, g1, g2, g3, _ = point.values()
        if which == 'sym_g2neg':
            return Manifold87Point(*_hp([s, g1 - s * (g2 + g3), -g2, g3], d))
        if which == 'sym_g2g1':
            return Manifold87Point(*_hp([s, -g2 + s * (g1 - g3), g1, g3], d))
        if which == 'tz3x3':
            if abs(s) > membership_tol(d):
                raise ValidationError('the 3x3 identification needs s = 0', {'s': str(point.s)})
            return Tz3x3Data(*_hp([g1, -g2, g3, mpc(0)], d))
    raise ValidationError(f'unknown variant {which!r}', {'allowed': list(VARIANTS)})


def unmap_variant(target: Manifold87Point, which: str) -> MonodromyPoint:
    """Inverse of the two contraction symmetries."""
    d = target.g3.digits
    with mpmath.workdps(d + 5):
        s, g1, g2, g3 = target.s.value, target.g1.value, target.g2.value, target.g3.value
        if which == 'sym_g2neg':
            t1, t2 = g1 + s * (-g2 + g3), -g2
        elif which == 'sym_g2g1':
            t1, t2 = g2, -g1 + s * (g2 - g3)
        else:
            raise ValidationError(f'no inverse for variant {which!r}')
        return MonodromyPoint(*_hp([s, t1, t2, g3, g3 - 1], d))


def tz3x3_data(H0: Any, digits: Optional[int] = None) -> Dict[str, Any]:
    """3x3-system data of H0 together with the direct form g3 = (H0 + 1 + 1/H0)/3."""
    h = ComplexHP.of(H0, digits)
    data = map_variants(from_H0(h), 'tz3x3')
    with mpmath.workdps(h.digits + 5):
        direct = (h.value + 1 + 1 / h.value) / 3
        agreement = abs(direct - data.g3.value)
    return {'data': data, 'g3_direct': ComplexHP(direct, h.digits), 'agreement': agreement}


# --- rho ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RhoData:
    two_rho: ComplexHP
    rho: ComplexHP
    rho1: ComplexHP

    def to_json(self) -> Dict[str, Any]:
        return {'two_rho': self.two_rho.to_json(), 'rho': self.rho.to_json(), 'rho1': self.rho1.to_json()}


def rho_from_s(s: Any, digits: Optional[int] = None) -> RhoData:
    """
    rho with cos(2 pi rho) = (1 - s)/2 on the principal arccos branch.

    Raises:
        BoundaryError: s = -1 or s = 3, where 2 rho hits 0 or 1
    """
    ss = ComplexHP.of(s, digits)
    d = ss.digits
    tol = membership_tol(d)
    if abs(ss.value + 1) <= tol or abs(ss.value - 3) <= tol:
        raise BoundaryError('s = -1 and s = 3 are the logarithmic boundary cases', {'s': str(ss)})
    with mpmath.workdps(d + 5):
        two_rho = mpmath.acos((1 - ss.value) / 2) / mpmath.pi
        rho = two_rho / 2
        rho1 = mpf(1) / 2 - rho
        return RhoData(*_hp([mpc(two_rho), mpc(rho), mpc(rho1)], d))


# --- varpi -------------------------------------------------------------------------

def pk(k: int, lam: Any, eps_b: Any = 1, a: Any = 0, digits: Optional[int] = None) -> ComplexHP:
    """
    p_k(lambda) = e^{-(-1)^k i pi lambda/2} (eps b/2)^lambda
    Gamma(1 - 2 lambda)/Gamma(1 + 2 lambda) Gamma(1 + lambda - (-1)^k i a/2)/lambda.
    """
    if k not in (1, 2):
        raise ValidationError('k must be 1 or 2', {'k': k})
    l = ComplexHP.of(lam, digits)
    d = l.digits
    with mpmath.workdps(d + 10):
        x = l.value
        if x == 0:
            raise ValidationError('p_k is singular at lambda = 0')
        sign = (-1) ** k
        eb = ComplexHP.of(eps_b, d).value
        aa = ComplexHP.of(a, d).value
        j = mpc(0, 1)
        value = (mpmath.exp(-sign * j * mpmath.pi * x / 2) * (eb / 2) ** x
                 * gamma_mp(1 - 2 * x, d) / gamma_mp(1 + 2 * x, d)
                 * gamma_mp(1 + x - sign * j * aa / 2, d) / x)
    return ComplexHP(value, d)


def varpi(k: int, lam: Any, point: Any, eps_b: Any = 1, a: Any = 0) -> ComplexHP:
    """varpi_k(lambda) = p_k(lambda) (g1k e^{i pi (lambda + 1/4)} + g2k e^{-i pi (lambda + 1/4)})."""
    manifold = point if isinstance(point, ManifoldPoint) else (point.lifted or lift(point))
    d = manifold.digits
    g_top, g_bottom = (manifold.g11, manifold.g21) if k == 1 else (manifold.g12, manifold.g22)
    p = pk(k, lam, eps_b, a, d)
    with mpmath.workdps(d + 5):
        phase = mpmath.expjpi(ComplexHP.of(lam, d).value + mpf(1) / 4)
        chi = g_top.value * phase + g_bottom.value / phase
        return ComplexHP(p.value * chi, d)


def varpi_identities(point: MonodromyPoint, H0: Any) -> 'OrderedDict[str, mpf]':
    """
    Residuals of the s = 0 varpi identities at lambda = +-1/6.

    p1(1/6) p1(-1/6) = -12 pi; varpi1(-1/6) varpi2(1/6) + varpi1(1/6) varpi2(-1/6) = 0;
    the product of all four values is 144 pi^2; varpi1(-1/6) varpi2(-1/6)/(16 pi) = H0/2.
    """
    d = point.digits
    h = ComplexHP.of(H0, d)
    with mpmath.workdps(d + 5):
        sixth = mpf(1) / 6
        plus = ComplexHP(mpc(sixth), d)
        minus = ComplexHP(mpc(-sixth), d)
        w1p, w1m = varpi(1, plus, point).value, varpi(1, minus, point).value
        w2p, w2m = varpi(2, plus, point).value, varpi(2, minus, point).value
        out = OrderedDict()
        out['p1_product'] = abs(pk(1, plus).value * pk(1, minus).value + 12 * mpmath.pi)
        out['cross_sum'] = abs(w1m * w2p + w1p * w2m)
        out['fourfold'] = abs(w1p * w1m * w2p * w2m - 144 * mpmath.pi ** 2)
        out['H0_product'] = abs(w1m * w2m / (16 * mpmath.pi) - h.value / 2)
    return out


def linear_identities(point: MonodromyPoint, H0: Any) -> 'OrderedDict[str, mpf]':
    """
    Residuals of the two linear relations between the contracted data and H0:

        g1 e^{-pi i/3} + 2(g3 - 1) - g2 e^{pi i/3} = H0 - 1
        g1 e^{pi i/3} + 2(g3 - 1) - g2 e^{-pi i/3} = 1/H0 - 1
    """
    d = point.digits
    h = ComplexHP.of(H0, d)
    with mpmath.workdps(d + 5):
        _, g1, g2, g3, _ = point.values()
        e = mpmath.expjpi(mpf(1) / 3)
        x = h.value
        out = OrderedDict()
        out['H0'] = abs(g1 / e + 2 * (g3 - 1) - g2 * e - (x - 1))
        out['inverse_H0'] = abs(g1 * e + 2 * (g3 - 1) - g2 / e - (1 / x - 1))
    return out


def solve_linear_identities(H0: Any, digits: Optional[int] = None) -> Tuple[ComplexHP, ComplexHP, ComplexHP]:
    """(g1, g2, g3) from the two linear relations and g1 - g2 + g3 = 1."""
    h = ComplexHP.of(H0, digits)
    d = h.digits
    if h.is_zero():
        raise ZeroA0Error('H(0) must be nonzero')
    with mpmath.workdps(d + 10):
        e = mpmath.expjpi(mpf(1) / 3)
        x = h.value
        A = mpmath.matrix([[1 / e, -e, 2], [e, -1 / e, 2], [1, -1, 1]])
        b = mpmath.matrix([x + 1, 1 / x + 1, 1])
        sol = mpmath.lu_solve(A, b)
        return ComplexHP(sol[0], d), ComplexHP(sol[1], d), ComplexHP(sol[2], d)
