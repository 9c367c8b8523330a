"""
Bundled acceptance criteria run by the `report` subcommand.

Every criterion returns a result dict
{'criterion', 'title', 'valid', 'errors', 'details', 'elapsed', 'budget'}
and never raises: numerical failures inside a criterion are reported as
errors. quick=True shrinks orders, ranges and precision so the suite can
run inside unit tests.
"""

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import mpmath
from mpmath import mpc, mpf
import numpy as np
import sympy
from sympy import QQ

from modules import algebroid, asympt, coxeter, monodromy, odeint, series
from modules.exceptions import Dp3Error
from modules.specfun import ComplexHP

logger = logging.getLogger(__name__)

SEED = 20240611

# nu1 of the worked examples, printed to six significant figures
EXAMPLES: Dict[str, Dict[str, Any]] = {
    'ex1': {'H0': '-1/30-1i', 'convention': 'regular', 'nu1': (-0.185823, -0.0001892)},
    'ex2': {'H0': '60-100i', 'convention': 'regular', 'nu1': (0.5832543, -0.162814)},
    'ex3': {'H0': '-0.148+0.191i', 'convention': 'singular', 'nu1': (0.0249933, -0.329580)},
    'ex4': {'H0': '-100-300i', 'convention': 'singular', 'nu1': (0.741160, -0.300731)},
    'ex5': {'H0': '-300i', 'convention': 'singular', 'nu1': (0.732934, -0.249469)},
    'ex6': {'H0': '-0.2+0.045i', 'convention': 'singular', 'nu1': (0.049319, -0.459650)},
}

EX6_R0 = '-2.6279340765216450944920718115e24'
EX6_Y0 = '-2.373441069e12'

# first minimum of the numeric solution and of its real-solution asymptotics
REAL_MINIMA = {
    '15': {'numeric': ('-0.887801', '0.439959'), 'asymptotic': ('-0.8181156', '-0.000621907')},
    '100': {'numeric': ('-0.4622134', '0.289185'), 'asymptotic': ('-0.3936948', '-0.7291378246')},
}

A0 = sympy.Symbol('a0')
PRINTED_A = {
    1: (A0 ** 3 + 1) / A0,
    2: -sympy.Rational(3, 4) * (A0 ** 3 + 1),
    3: (A0 ** 3 + 1) * (2 * A0 ** 3 + 1) / (4 * A0 ** 2),
    4: -(A0 ** 3 + 1) * (20 * A0 ** 3 + 17) / (64 * A0),
    5: 3 * (A0 ** 3 + 1) * (100 * A0 ** 6 + 122 * A0 ** 3 + 25) / (1600 * A0 ** 3),
    6: -(A0 ** 3 + 1) * (700 * A0 ** 6 + 1113 * A0 ** 3 + 416) / (6400 * A0 ** 2),
}

X = series.X
PRINTED_P = {
    1: 1,
    2: 1,
    3: 2 * X + 1,
    4: 20 * X + 17,
    5: 100 * X ** 2 + 122 * X + 25,
    6: 700 * X ** 2 + 1113 * X + 416,
    7: 19600 * X ** 3 + 38416 * X ** 2 + 21275 * X + 2450,
    8: 78400 * X ** 3 + 182672 * X ** 2 + 134227 * X + 29952,
}

S = coxeter.S
PRINTED_Q = {
    1: S - 3, 2: S + 1, 3: S, 4: S - 1, 5: S ** 2 - S - 1, 6: S - 2,
    7: S ** 3 - 2 * S ** 2 - S + 1, 8: S ** 2 - 2 * S - 1, 9: S ** 3 - 3 * S ** 2 + 3,
    10: S ** 2 - 3 * S + 1, 11: S ** 5 - 4 * S ** 4 + 2 * S ** 3 + 5 * S ** 2 - 2 * S - 1,
    12: S ** 2 - 2 * S - 2, 13: S ** 6 - 5 * S ** 5 + 5 * S ** 4 + 6 * S ** 3 - 7 * S ** 2 - 2 * S + 1,
    14: S ** 3 - 4 * S ** 2 + 3 * S + 1, 15: S ** 4 - 5 * S ** 3 + 5 * S ** 2 + 5 * S - 5,
    16: S ** 4 - 4 * S ** 3 + 2 * S ** 2 + 4 * S - 1,
    17: S ** 8 - 7 * S ** 7 + 14 * S ** 6 + S ** 5 - 25 * S ** 4 + 9 * S ** 3 + 12 * S ** 2 - 3 * S - 1,
    18: S ** 3 - 3 * S ** 2 + 1,
}

CRITERIA: Dict[int, Tuple[str, float, Callable[[bool], Tuple[List[str], Dict[str, Any]]]]] = {}


def criterion(number: int, title: str, budget: float):
    """Register a check returning (errors, details) under a criterion number and time budget in seconds."""
    def register(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return register


def _nstr(x: Any, n: int = 12) -> str:
    return mpmath.nstr(x, n)


def _rng() -> random.Random:
    return random.Random(SEED)


# --- series ----------------------------------------------------------------------------

@criterion(1, 'exact coefficients a1..a6', 1)
def _coefficient_table(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    table = series.taylor_coeffs('exact', 6)
    errors = []
    for n, printed in PRINTED_A.items():
        if sympy.simplify(table.a[n].to_sympy(A0) - printed) != 0:
            errors.append(f'a_{n} differs from its closed form')
    return errors, {'checked': sorted(PRINTED_A)}


@criterion(2, 'ansatz reconstruction of a_n', 60)
def _ansatz(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    N = 20 if quick else 60
    table = series.taylor_coeffs('exact', N)
    errors = []
    for n in range(1, N + 1):
        try:
            ansatz = series.extract_Pn(n, table)
        except Dp3Error as e:
            errors.append(f'n={n}: {e}')
            continue
        if ansatz.kappa != series.kappa(n):
            errors.append(f'n={n}: kappa {ansatz.kappa} != {series.kappa(n)}')
        if ansatz.content != 1:
            errors.append(f'n={n}: P_n is not primitive (content {ansatz.content})')
        if series.reconstruct_an(n, ansatz.kappa, ansatz.poly) != table.a[n]:
            errors.append(f'n={n}: reconstructed a_n differs')
    return errors, {'N': N}


@criterion(3, 'kappa identity and P_34(-1)', 10)
def _kappa_identity(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    N = 20 if quick else 60
    table = series.taylor_coeffs('exact', max(N, 34))
    errors = []
    g1 = series.genfun_crosscheck('g1', N, table)
    if not g1['valid']:
        errors.append(f'(n!)^2 f_n = -3^(n-1) fails: {g1["errors"][:3]}')
    for n in range(1, N + 1):
        if not series.identity_check('kappa', n, table)['valid']:
            errors.append(f'kappa_n P_n(-1) identity fails at n={n}')
    p34 = int(series.extract_Pn(34, table).poly.eval(-1))
    if p34 != 27:
        errors.append(f'P_34(-1) = {p34}, expected 27')
    return errors, {'N': N, 'P34_at_minus1': p34}


@criterion(4, 'listed P_n and q_m', 10)
def _listed_polynomials(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    table = series.taylor_coeffs('exact', 8)
    errors = []
    for n, printed in PRINTED_P.items():
        if series.extract_Pn(n, table).poly != sympy.Poly(printed, X, domain=sympy.ZZ):
            errors.append(f'P_{n} differs')
    tower = coxeter.qk_tower(18)
    for m, printed in PRINTED_Q.items():
        if tower[m] != sympy.Poly(printed, S, domain=sympy.ZZ):
            errors.append(f'q_{m} differs')
    return errors, {'P': len(PRINTED_P), 'q': len(PRINTED_Q)}


@criterion(5, 'generating functions', 30)
def _generating_functions(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    N2, Np = (12, 10) if quick else (40, 30)
    table = series.taylor_coeffs('exact', max(N2, Np))
    errors = []
    g2 = series.genfun_crosscheck('g2', N2, table)
    if not g2['valid']:
        errors.append(f'g2 closed form or recurrence disagrees: {g2["errors"][:3]}')
    for n in range(1, Np + 1):
        if not series.identity_check('Pn_prime_minus1', n, table)['valid']:
            errors.append(f"P_n'(-1) formula fails at n={n}")
    return errors, {'N_g2': N2, 'N_derivative': Np}


# --- monodromy -------------------------------------------------------------------------

def _nu1_errors(digits: int) -> Tuple[List[str], Dict[str, Any]]:
    errors = []
    found = {}
    for name, ex in EXAMPLES.items():
        value = monodromy.nu1(ex['H0'], ex['convention'], digits).value
        found[name] = str(ComplexHP(value.value, 16))
        want = mpc(*ex['nu1'])
        if abs(value.re - want.real) > 1e-6 or abs(value.im - want.imag) > 1e-6:
            errors.append(f'{name}: nu1 = {_nstr(value.value, 8)}, expected {ex["nu1"]}')
    return errors, found


@criterion(6, 'monodromy manifold and nu1 of the examples', 5)
def _monodromy(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 30 if quick else 50
    rng = _rng()
    count = 20 if quick else 100
    errors = []
    worst = mpf(0)
    for _ in range(count):
        H0 = mpc(rng.uniform(-10, 10), rng.uniform(-10, 10))
        point = monodromy.from_H0(ComplexHP(H0, digits))
        check = monodromy.membership(point, monodromy.membership_tol(digits))
        worst = max(worst, mpf(check['max_residual']))
        if not check['valid']:
            errors.append(f'H0={_nstr(H0, 8)}: {check["errors"]}')
    nu_errors, found = _nu1_errors(digits)
    return errors + nu_errors, {'points': count, 'max_residual': _nstr(worst, 5), 'nu1': found}


# --- integration -------------------------------------------------------------------------

def _solve(H0: Any, r_end: str, digits: int, samples: int, rel_tol: Optional[float] = None) -> odeint.Trajectory:
    cfg = odeint.SolveConfig(digits=digits, sample_count=samples, rel_tol=rel_tol)
    return odeint.integrate(ComplexHP.of(H0, digits), r_end, cfg)


@criterion(7, 'constant solutions and self-convergence', 300)
def _integration(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 20 if quick else 50
    r_const, r_conv = ('-10', '-30') if quick else ('-100', '-300')
    errors = []
    details: Dict[str, Any] = {}
    with mpmath.workdps(digits + 5):
        constants = {'1': mpc(1), 'omega': mpmath.expjpi(mpf(2) / 3), 'omega_bar': mpmath.expjpi(-mpf(2) / 3)}
    for name, H0 in constants.items():
        traj = _solve(ComplexHP(H0, digits), r_const, digits, 101)
        rel, _ = traj.config.tolerances()
        drift = max(abs(p.H.value - H0) for p in traj.samples)
        details[f'drift_{name}'] = _nstr(drift, 5)
        if drift > 10 * rel:
            errors.append(f'H0={name} drifts by {_nstr(drift, 5)}')
    coarse, fine = 1e-10, 5e-11
    H0 = EXAMPLES['ex1']['H0']
    a = _solve(H0, r_conv, 30, 301, coarse)
    b = _solve(H0, r_conv, 30, 301, fine)
    gap = max(abs(p.H.value - q.H.value) / max(1, abs(q.H.value)) for p, q in zip(a.samples, b.samples))
    details['self_convergence'] = _nstr(gap, 5)
    if gap > 100 * fine:
        errors.append(f'tolerance halving moved H by {_nstr(gap, 5)}')
    return errors, details


def _example_setup(name: str, digits: int) -> Dict[str, Any]:
    ex = EXAMPLES[name]
    h = ComplexHP.of(ex['H0'], digits)
    return {'H0': h, 'nu1': monodromy.nu1(h, ex['convention']), 'g1': monodromy.from_H0(h).g1,
            'family': ex['convention']}


@criterion(8, 'regular asymptotics on example 1', 300)
def _regular_asymptotics(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 20 if quick else 50
    setup = _example_setup('ex1', digits)
    traj = _solve(setup['H0'], '-300', digits, 600 if quick else 1837)
    errs = []
    for p in traj.samples:
        if p.r > -10:
            continue
        model = asympt.H_large(p.r, setup['nu1'], setup['g1'], 'regular')
        errs.append((float(p.r), float(abs(p.H.value - model.value.value))))
    errors = []
    nu = setup['nu1'].value.value
    r_check = min((e for e in errs if e[0] >= -100), key=lambda e: e[0])
    amplitude = float(abs(mpmath.sqrt(6 * nu))) / (-3 * r_check[0]) ** 0.25
    if r_check[1] > 0.05 * amplitude:
        errors.append(f'error {r_check[1]:.3e} at r={r_check[0]:.4g} exceeds 5% of the amplitude {amplitude:.3e}')
    near = max(e for r, e in errs if -100 <= r <= -10)
    far = max(e for r, e in errs if -300 <= r < -100)
    if not far < near:
        errors.append(f'max error does not decrease: [-100,-10] {near:.3e}, [-300,-100] {far:.3e}')
    return errors, {'error_at_check': r_check[1], 'amplitude': amplitude,
                    'max_error_decade_1': near, 'max_error_decade_2': far}


@criterion(9, 'singular asymptotics and k fitting', 600)
def _singular_asymptotics(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 20 if quick else 40
    samples = 800 if quick else 3000
    errors = []
    ex3 = _example_setup('ex3', digits)
    traj = _solve(ex3['H0'], '-600', digits, samples)
    window = [p for p in traj.samples if p.r <= -10]
    evals = asympt.I_sweep([p.r for p in window], ex3['nu1'], ex3['H0'], 'singular', 0)
    diffs = np.array([float(p.I.re - e.value.re) for p, e in zip(window, evals)])
    median = float(np.median(diffs))
    if not abs(median) < 0.5:
        errors.append(f'median Re I difference {median:.3f} on [-600, -10]')
    fit3 = asympt.fit_k(traj, 'singular', (-600, -100), ex3['nu1'])
    if fit3.k != 0:
        errors.append(f'fit_k on example 3 gave {fit3.k}, expected 0')
    ex4 = _example_setup('ex4', digits)
    tail = _solve(ex4['H0'], '-560', digits, samples)
    fit4 = asympt.fit_k(tail, 'singular', (-560, -200), ex4['nu1'])
    if fit4.k != 3:
        errors.append(f'fit_k on the example-4 tail gave {fit4.k}, expected 3')
    return errors, {'median': median, 'fit_ex3': fit3.to_json(), 'fit_ex4': fit4.to_json()}


@criterion(10, 'last zero and dwelling depth of example 6', 60)
def _landmarks(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 40 if quick else 50
    ex6 = _example_setup('ex6', digits)
    marks = asympt.landmarks(ex6['nu1'], ex6['g1'], ex6['H0'], 0, digits)
    errors = []
    if marks.r0 is None:
        return [f'no last zero found (horizon {marks.horizon})'], marks.to_json()
    with mpmath.workdps(digits):
        for name, got, want in (('r0', marks.r0, mpf(EX6_R0)), ('y0', marks.y0, mpf(EX6_Y0))):
            if abs(got - want) / abs(want) > mpf('1e-9'):
                errors.append(f'{name} = {_nstr(got, 15)}, expected {_nstr(want, 15)}')
    return errors, marks.to_json()


# --- real solutions --------------------------------------------------------------------

def _numeric_first_minimum(H0: str, digits: int, r_end: str, samples: int) -> Tuple[mpf, mpf]:
    """First local minimum of H on the negative axis, polished by Newton steps on H' = 0."""
    traj = _solve(H0, r_end, digits, samples)
    pts = traj.samples
    # H' > 0 while H falls towards the minimum as r decreases
    index = next((i for i in range(1, len(pts)) if pts[i - 1].dH.re > 0 >= pts[i].dH.re), None)
    if index is None:
        raise ValueError(f'no sign change of dH/dr down to r = {r_end}')
    lo, hi = pts[index - 1], pts[index]
    with mpmath.workdps(digits + 5):
        r = lo.r + (hi.r - lo.r) * lo.dH.re / (lo.dH.re - hi.dH.re)
        for _ in range(3):
            end = _solve(H0, mpmath.nstr(r, digits), digits, 2).endpoint()
            H, dH = end.H.value.real, end.dH.value.real
            d2H = (r * dH ** 2 / H + (H ** 3 - 1) / H - dH) / r
            r = r - dH / d2H
        value = _solve(H0, mpmath.nstr(r, digits), digits, 2).endpoint().H.re
    return r, value


@criterion(11, 'first minima of real solutions', 120)
def _real_solutions(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    digits = 20 if quick else 30
    errors = []
    details: Dict[str, Any] = {}
    for H0, refs in REAL_MINIMA.items():
        r_num, v_num = _numeric_first_minimum(H0, digits, '-3', 300 if quick else 3000)
        r_ref, v_ref = (mpf(x) for x in refs['numeric'])
        details[f'numeric_{H0}'] = [_nstr(r_num), _nstr(v_num)]
        if abs(r_num - r_ref) > mpf('5e-6') * abs(r_ref) or abs(v_num - v_ref) > mpf('5e-6') * abs(v_ref):
            errors.append(f'H0={H0}: numeric minimum H({_nstr(r_num, 8)}) = {_nstr(v_num, 8)}')
        r_as, v_as = asympt.tzitzeica_first_minimum(H0, digits)
        details[f'asymptotic_{H0}'] = [_nstr(r_as), _nstr(v_as)]
        if 'asymptotic' in refs:
            r_ref, v_ref = (mpf(x) for x in refs['asymptotic'])
            if abs(r_as - r_ref) > mpf('1e-4') * abs(r_ref) or abs(v_as - v_ref) > mpf('1e-4') * abs(v_ref):
                errors.append(f'H0={H0}: asymptotic minimum H({_nstr(r_as, 8)}) = {_nstr(v_as, 8)}')
    return errors, details


# --- algebroid -------------------------------------------------------------------------

def _degenerate_vector(nu: int, vanishing: int, L: int, rng: random.Random) -> algebroid.BranchVector:
    """Random rational branch functions with f_0(0) = ... = f_{vanishing-1}(0) = 0."""
    series_list = []
    for q in range(nu):
        coeffs = [QQ(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(L)]
        if q < vanishing:
            coeffs[0] = QQ(0)
        elif coeffs[0] == 0:
            coeffs[0] = QQ(1)
        series_list.append(coeffs)
    return algebroid.BranchVector.from_series(series_list, mode='rational')


@criterion(12, 'F_nu determinants', 120)
def _determinants(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    rng = _rng()
    errors = []
    details: Dict[str, Any] = {}
    sym = algebroid.fnu_symbolic_checks(3)
    if not sym['valid']:
        errors.append(f'nu=3 symbolic checks: {sym["errors"]}')
    for nu in ((3, 4) if quick else (3, 4, 5, 7)):
        patterns = [1] + ([(nu - 3) // 2 + 1] if nu % 2 and nu > 3 else [])
        for vanishing in patterns:
            L = ((nu - 3) // 2 + 1) ** 2 + 3
            bv = _degenerate_vector(nu, vanishing, L, rng)
            result = algebroid.fnu_checks(bv)
            details[f'nu{nu}_vanishing{vanishing}'] = sorted(result['checks'])
            if not result['valid']:
                errors.append(f'nu={nu}, {vanishing} vanishing: {result["errors"]}')
    return errors, details


@criterion(13, 'algebraic equations and E_3 residuals', 120)
def _algebraic_equations(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    rng = _rng()
    digits = 30
    L = 8 if quick else 16
    errors = []
    details: Dict[str, Any] = {}
    for p in (0, 1):
        for _ in range(1 if quick else 3):
            a0 = ComplexHP(mpc(rng.uniform(0.5, 2), rng.uniform(-1, 1)), digits)
            eq = algebroid.algebraic_equation(p, a0, L, digits)
            scale = max([mpf(1)] + [abs(c) for gk in eq.g for c in gk])
            details[f'p{p}_{_nstr(a0.value, 6)}'] = {'valid_order': eq.valid_order, 'residual': _nstr(eq.residual, 5)}
            if eq.residual > scale * mpf(10) ** (12 - digits):
                errors.append(f'p={p}, a0={_nstr(a0.value, 6)}: residual {_nstr(eq.residual, 5)}')
    for a0 in (sympy.Rational(2, 3), sympy.Rational(-5, 4)):
        bv = algebroid.branch_series(0, a0, L)
        result = algebroid.ep_residual(0, bv)
        if not result['valid']:
            errors.append(f'E_3 residual survives at a0={a0}: {result["components"]}')
    return errors, details


# --- group ---------------------------------------------------------------------------------

@criterion(14, 'reflection group suite', 60)
def _group(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    rng = _rng()
    digits = 30
    errors = []
    details: Dict[str, Any] = {}
    count = 20 if quick else 100
    skipped = 0
    for _ in range(count):
        s = rng.uniform(-0.9, 2.9)
        kappa = mpc(rng.uniform(-3, 3), rng.uniform(-3, 3))
        p = coxeter.parametrize_cubic(ComplexHP(kappa, digits), ComplexHP(mpc(s), digits), digits)
        result = coxeter.relation_checks(p)
        skipped += len(result['skipped'])
        if not result['valid']:
            errors.append(f's={s:.6f}: {result["errors"]}')
    details['sampled_points'] = count
    details['skipped_words'] = skipped
    for s0, expected in ((0, 3), (1, 4)):
        field = coxeter.QuotientField.rational(s0)
        p = coxeter.parametrize_cubic(sympy.Rational(2, 5), field.generator())
        length = coxeter.orbit(p, 'r1r2', 20).length
        details[f'orbit_length_s{s0}'] = length
        if length != expected:
            errors.append(f'orbit length at s={s0} is {length}, expected {expected}')
    n_max = 20 if quick else 50
    for s0 in (-1, 3):
        field = coxeter.QuotientField.rational(s0)
        p0 = coxeter.parametrize_cubic(sympy.Rational(3, 7), field.generator())
        current = p0
        for n in range(n_max + 1):
            if not current.same_as(coxeter.closed_form_orbit(s0, p0, n)):
                errors.append(f'closed-form orbit at s={s0} differs at n={n}')
                break
            current = coxeter.apply_word('r1r2', current)
    checks = coxeter.tower_checks(coxeter.qk_tower(20))
    if not checks['valid']:
        errors.append(f'Chebyshev product identities: {checks["errors"]}')
    return errors, details


# --- expansion -----------------------------------------------------------------------------

def _residual_order(table: asympt.ExpansionTable, tau: mpf) -> Tuple[mpf, mpf, float]:
    """Largest residual in two windows a decade apart in tau^(1/3), and the decay order between them."""
    def worst(t0: mpf) -> mpf:
        return max(asympt.expansion_residual(table, t0 * (1 + mpf(j) / 7)) for j in range(7))

    near, far = worst(tau), worst(tau * 1000)
    order = float(mpmath.log10(near / far)) if far > 0 else float('inf')
    return near, far, order


@criterion(15, 'expansion coefficients of the general-a asymptotics', 300)
def _expansion(quick: bool) -> Tuple[List[str], Dict[str, Any]]:
    rng = _rng()
    digits = 40
    K = 6 if quick else 10
    errors = []
    details: Dict[str, Any] = {}
    tol = mpf(10) ** (10 - digits)
    points = 2 if quick else 5
    for i in range(points):
        kappa = mpc(rng.uniform(-0.1, 0.1), rng.uniform(-1, 1))
        a11 = mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        a = rng.uniform(-0.5, 0.5)
        eps_b = rng.uniform(0.5, 2)
        eps = rng.choice((1, -1))
        table = asympt.expansion_from_leading(K, ComplexHP(a11, digits), ComplexHP(kappa, digits), a, eps_b, eps, digits)
        for name, value in table.checks.items():
            if value > tol:
                errors.append(f'point {i}: {name} check off by {_nstr(value, 5)}')
        near, far, order = _residual_order(table, mpf(10) ** 6)
        expected = (K + 1) * (1 - 2 * abs(kappa.real))
        details[f'point_{i}'] = {'residual_near': _nstr(near, 5), 'residual_far': _nstr(far, 5),
                                 'order': order, 'expected_order': expected}
        if order < expected / 2:
            errors.append(f'point {i}: residual decays with order {order:.2f}, expected about {expected:.2f}')
    return errors, details


# --- runner --------------------------------------------------------------------------------

def run_criterion(number: int, quick: bool = False) -> Dict[str, Any]:
    """Run one criterion; failures of any kind land in 'errors'."""
    if number not in CRITERIA:
        return {'criterion': number, 'title': None, 'valid': False,
                'errors': [f'unknown criterion {number}'], 'details': {}, 'elapsed': 0.0, 'budget': None,
                'within_budget': True}
    title, budget, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        errors, details = fn(quick)
    except (Dp3Error, ArithmeticError, ValueError, ZeroDivisionError) as e:
        logger.error(f'criterion {number} aborted: {e}')
        errors, details = [f'{type(e).__name__}: {e}'], {}
    elapsed = time.perf_counter() - start
    if elapsed > budget and not quick:
        logger.warning(f'criterion {number} took {elapsed:.1f}s, budget {budget:.0f}s')
    valid = not errors
    logger.info(f'criterion {number} ({title}): {"PASS" if valid else "FAIL"} in {elapsed:.2f}s')
    return {'criterion': number, 'title': title, 'valid': valid, 'errors': errors or None,
            'details': details, 'elapsed': round(elapsed, 3), 'budget': budget,
            'within_budget': elapsed <= budget}


def _run_quick(number: int) -> Dict[str, Any]:
    return run_criterion(number, True)


def _run_full(number: int) -> Dict[str, Any]:
    return run_criterion(number, False)


def run_suite(criteria: Optional[Iterable[int]] = None, quick: bool = False, jobs: int = 1) -> Dict[str, Any]:
    """
    Run the selected criteria, in worker processes when jobs > 1.

    Returns:
        {'valid': all passed, 'results': [...] ordered by criterion number}
    """
    numbers = sorted(set(criteria)) if criteria else sorted(CRITERIA)
    runner = _run_quick if quick else _run_full
    if jobs > 1 and len(numbers) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(runner, numbers))
    else:
        results = [runner(n) for n in numbers]
    passed = sum(1 for r in results if r['valid'])
    logger.info(f'acceptance: {passed}/{len(results)} criteria passed')
    return {'valid': passed == len(results), 'passed': passed, 'total': len(results), 'results': results}
