"""
Command-line front-end.

Every subcommand reads a RunConfig (flags > --config file > defaults),
writes its artifacts into output_dir as CSV/JSON with decimal strings and
finishes with a <name>.manifest.json carrying the config and checksums.
Exit status: 0 success, 2 validation failure, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf
import sympy

from modules import acceptance, algebroid, asympt, coxeter, monodromy, odeint, series
from modules.config_validator import ConfigValidator, load_config, load_figures
from modules.exceptions import (
    EXIT_OK, EXIT_VALIDATION, Dp3Error, UnknownFigureError, ValidationError, exit_code_for,
)
from modules.exporter import export_json, export_manifest, export_rows
from modules.logging_manager import RunLogger, setup_logging
from modules.specfun import ComplexHP, _decimal, default_digits

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('coeffs', 'polys', 'genfun', 'solve', 'monodromy', 'asympt', 'compare',
               'qpoly', 'orbit', 'det', 'algebroid', 'report', 'figures')

REQUIRED: Dict[str, Tuple[str, ...]] = {
    'solve': ('H0', 'r_end'),
    'monodromy': ('H0',),
    'asympt': ('H0', 'r_end', 'family'),
    'compare': ('H0', 'r_end', 'family'),
    'orbit': ('s', 'kappa'),
}

IDENTITIES = ('kappa', 'Pn_minus1', 'leading', 'odd0', 'even0', 'relations', 'Pn_prime_minus1')


@dataclass
class RunConfig:
    """One run; None means 'not given' so that later layers can fill it in."""

    subcommand: str
    H0: Optional[str] = None
    digits: Optional[int] = None
    r_end: Optional[str] = None
    r_start: Optional[str] = None
    sample_count: int = 500
    rel_tol: Optional[float] = None
    family: Optional[str] = None
    k: Optional[int] = None
    window: Optional[List[str]] = None
    output_dir: str = 'output'
    format: str = 'csv'
    N: int = 20
    which: Optional[str] = None
    K: int = 10
    s: Optional[str] = None
    kappa: Optional[str] = None
    generator: str = 'r1r2'
    max_iter: int = 200
    nu: int = 3
    p: int = 0
    a0: Optional[str] = None
    L: int = 16
    figure: Optional[str] = None
    criteria: Optional[List[int]] = None
    jobs: int = 1
    quick: bool = False

    @property
    def precision(self) -> int:
        return self.digits if self.digits is not None else default_digits()

    def to_json(self) -> Dict[str, Any]:
        data = {k: v for k, v in asdict(self).items() if v is not None}
        data['digits'] = self.precision
        return data

    @classmethod
    def layered(cls, subcommand: str, file_values: Optional[Dict[str, Any]] = None,
                flag_values: Optional[Dict[str, Any]] = None) -> 'RunConfig':
        """Defaults, overridden by the config file, overridden by flags."""
        known = {f.name for f in fields(cls)}
        merged: Dict[str, Any] = {}
        for layer in (file_values or {}, flag_values or {}):
            merged.update({k: v for k, v in layer.items() if k in known and v is not None})
        file_sub = (file_values or {}).get('subcommand')
        if file_sub is not None and file_sub != subcommand:
            raise ValidationError(f'config file is for {file_sub!r}, not {subcommand!r}')
        merged['subcommand'] = subcommand
        return cls(**merged)

    def validate(self, validator: Optional[ConfigValidator] = None) -> None:
        """Schema check plus the per-subcommand required fields."""
        validator = validator or ConfigValidator()
        result = validator.validate(self.to_json())
        if not result['valid']:
            raise ValidationError('invalid run configuration', {'errors': result['errors']})
        missing = [name for name in REQUIRED.get(self.subcommand, ()) if getattr(self, name) is None]
        if missing:
            raise ValidationError(f'{self.subcommand} needs {", ".join(missing)}', {'missing': missing})


# --- helpers -------------------------------------------------------------------------------

class _Run:
    """Artifacts written by one subcommand."""

    def __init__(self, config: RunConfig, run_logger: Optional[RunLogger]):
        self.config = config
        self.run_logger = run_logger
        self.artifacts: List[str] = []

    def rows(self, header: Sequence[str], rows: List[Sequence[str]], name: str) -> str:
        result = export_rows(header, rows, name, self.config.format, self.config.output_dir)
        return self._record(result['output_file'], 'table', {'rows': result['row_count']})

    def json(self, data: Dict[str, Any], name: str) -> str:
        return self._record(export_json(data, name, self.config.output_dir)['output_file'], 'json')

    def _record(self, path: str, kind: str, details: Optional[Dict[str, Any]] = None) -> str:
        self.artifacts.append(path)
        if self.run_logger:
            self.run_logger.log_artifact(Path(path), kind, details)
        print(f"{Path(path).name} written to {self.config.output_dir}")
        return path


def _num(x: Any, digits: int) -> str:
    return _decimal(mpf(x), digits)


def _grid(r_start: str, r_end: str, count: int, digits: int) -> List[mpf]:
    with mpmath.workdps(digits + 5):
        lo, hi = mpf(r_end), mpf(r_start)
        if not lo < hi < 0:
            raise ValidationError('grid needs r_end < r_start < 0', {'r_start': r_start, 'r_end': r_end})
        return list(mpmath.linspace(hi, lo, count))


def _rational_or_none(text: str) -> Optional[sympy.Rational]:
    """Exact rational when the literal has no imaginary part."""
    if 'i' in text or 'j' in text:
        return None
    try:
        return sympy.Rational(text)
    except (TypeError, ValueError, SyntaxError, sympy.SympifyError):
        return None


def _solve_config(cfg: RunConfig, samples: Optional[int] = None) -> odeint.SolveConfig:
    extra = {'r1': cfg.r_start} if cfg.subcommand == 'solve' and cfg.r_start else {}
    return odeint.SolveConfig(digits=cfg.precision, rel_tol=cfg.rel_tol,
                              sample_count=samples or cfg.sample_count, **extra)


# --- series subcommands ----------------------------------------------------------------------

def _cmd_coeffs(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    d = cfg.precision
    if cfg.a0 is None:
        table = series.taylor_coeffs('exact', cfg.N)
        suite = []
        names = (cfg.which,) if cfg.which else IDENTITIES
        for which in names:
            for n in range(1, cfg.N + 1):
                try:
                    check = series.identity_check(which, n, table)
                except ValidationError as e:
                    suite.append({'which': which, 'n': n, 'valid': None, 'skipped': str(e)})
                    continue
                suite.append({'which': which, 'n': n, 'valid': check['valid']})
        failed = [c for c in suite if c['valid'] is False]
        run.json({'table': table.to_json(), 'identities': suite}, 'coeffs')
        if failed:
            raise Dp3Error(f'{len(failed)} coefficient identities fail',
                           {'failed': [(c['which'], c['n']) for c in failed][:20]})
        return {'mode': 'exact', 'N': cfg.N, 'identities_checked': len(suite), 'identities_failed': len(failed)}
    table = series.taylor_coeffs('numeric', cfg.N, ComplexHP.of(cfg.a0, d), d)
    bound = series.bound_holds(table)
    rows = []
    for n in range(cfg.N + 1):
        c = ComplexHP.of(table.value_at(n), d)
        rows.append([str(n), _num(c.re, d), _num(c.im, d)])
    run.rows(['n', 're_a', 'im_a'], rows, 'coeffs')
    run.json({'table': table.to_json(), 'radius_bound': bound}, 'coeffs.table')
    return {'mode': 'numeric', 'N': cfg.N, 'bound_holds': bound['valid']}


def _cmd_polys(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    table = series.taylor_coeffs('exact', cfg.N)
    rows, entries = [], []
    for n in range(1, cfg.N + 1):
        ansatz = series.extract_Pn(n, table)
        entries.append(ansatz.to_json())
        rows.append([str(n), str(ansatz.kappa), str(ansatz.poly.degree()), str(ansatz.content),
                     str(ansatz.poly.eval(-1)), ' '.join(series.int_poly_to_json(ansatz.poly))])
    run.rows(['n', 'kappa', 'degree', 'content', 'P_at_minus1', 'coefficients'], rows, 'polys')
    run.json({'polynomials': entries}, 'polys.detail')
    return {'N': cfg.N}


def _cmd_genfun(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    which = cfg.which or 'g1'
    coeffs = series.genfun_coeffs(which, cfg.N)
    check = series.genfun_crosscheck(which, cfg.N)
    run.rows(['n', 'coefficient'], [[str(n), str(c)] for n, c in enumerate(coeffs)], f'genfun_{which}')
    run.json(check, f'genfun_{which}.check')
    if not check['valid']:
        raise Dp3Error(f'generating function {which} disagrees with the coefficient table',
                       {'errors': check['errors'][:10]})
    return {'which': which, 'N': cfg.N, 'valid': check['valid']}


# --- integration and monodromy ---------------------------------------------------------------

def _cmd_solve(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    d = cfg.precision
    traj = odeint.integrate(ComplexHP.of(cfg.H0, d), cfg.r_end, _solve_config(cfg))
    report = odeint.residual_check(traj)
    run.rows(odeint.CSV_HEADER, traj.rows(), 'trajectory')
    meta = traj.metadata()
    meta['residual'] = report.to_json()
    run.json(meta, 'trajectory.meta')
    return {'samples': len(traj), 'residual': report.to_json()}


def _nu1_or_reason(h: ComplexHP, convention: str) -> Dict[str, Any]:
    try:
        return monodromy.nu1(h, convention).to_json()
    except ValidationError as e:
        return {'convention': convention, 'unreachable': str(e)}


def _cmd_monodromy(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    h = ComplexHP.of(cfg.H0, cfg.precision)
    point = monodromy.from_H0(h)
    check = monodromy.membership(point, monodromy.membership_tol(h.digits))
    data = {
        'H0': h.to_json(),
        'point': point.to_json(),
        'membership': check,
        'nu1': {c: _nu1_or_reason(h, c) for c in ('regular', 'singular')},
    }
    run.json(data, 'monodromy')
    if not check['valid']:
        raise Dp3Error('monodromy data misses the manifold', {'errors': check['errors']})
    return {'max_residual': check['max_residual']}


# --- asymptotics ---------------------------------------------------------------------------

def _asymptotic_inputs(H0: Any, family: str, digits: int) -> Tuple[ComplexHP, Any, ComplexHP]:
    h = ComplexHP.of(H0, digits)
    return h, monodromy.nu1(h, family), monodromy.from_H0(h).g1


def _cmd_asympt(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    d = cfg.precision
    h, nu1, g1 = _asymptotic_inputs(cfg.H0, cfg.family, d)
    grid = _grid(cfg.r_start or '-1', cfg.r_end, cfg.sample_count, d)
    integrals = asympt.I_sweep(grid, nu1, h, cfg.family, cfg.k or 0)
    rows = []
    for r, I in zip(grid, integrals):
        H = asympt.H_large(r, nu1, g1, cfg.family).value
        rows.append([_num(r, d), _num(H.re, d), _num(H.im, d), _num(I.value.re, d), _num(I.value.im, d)])
    run.rows(['r', 're_H', 'im_H', 're_I', 'im_I'], rows, f'asympt_{cfg.family}')
    return {'family': cfg.family, 'nu1': nu1.to_json(), 'points': len(rows)}


def _default_window(r_end: str) -> Tuple[str, str]:
    lo = mpf(r_end)
    return str(lo), str(lo / 6)


def _cmd_compare(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    d = cfg.precision
    h, nu1, g1 = _asymptotic_inputs(cfg.H0, cfg.family, d)
    traj = odeint.integrate(h, cfg.r_end, _solve_config(cfg))
    summary: Dict[str, Any] = {'family': cfg.family, 'nu1': nu1.to_json()}
    k = cfg.k
    if k is None and cfg.family == 'singular':
        fit = asympt.fit_k(traj, 'singular', tuple(cfg.window or _default_window(cfg.r_end)), nu1)
        k = fit.k
        summary['fit_k'] = fit.to_json()
    plot_max = mpf(cfg.r_start) if cfg.r_start else mpf('-0.1')
    pts = [p for p in traj.samples if p.r <= plot_max]
    integrals = asympt.I_sweep([p.r for p in pts], nu1, h, cfg.family, k or 0)
    rows = []
    for p, I in zip(pts, integrals):
        H = asympt.H_large(p.r, nu1, g1, cfg.family).value
        rows.append([_num(p.r, d),
                     _num(p.H.re, d), _num(p.H.im, d), _num(H.re, d), _num(H.im, d),
                     _num(p.I.re, d), _num(p.I.im, d), _num(I.value.re, d), _num(I.value.im, d),
                     _num(abs(p.H.value - H.value), d)])
    run.rows(['r', 're_H_num', 'im_H_num', 're_H_asym', 'im_H_asym',
              're_I_num', 'im_I_num', 're_I_asym', 'im_I_asym', 'abs_err_H'], rows, f'compare_{cfg.family}')
    if cfg.family == 'singular':
        marks = asympt.landmarks(nu1, g1, h, k or 0, d)
        run.json(marks.to_json(), 'landmarks')
        summary['landmarks'] = marks.to_json()
    summary['k'] = k
    return summary


# --- figures -------------------------------------------------------------------------------

_COMPONENT: Dict[str, Callable[[Any], mpf]] = {
    'ReH': lambda s: s.H.re, 'ImH': lambda s: s.H.im, 'ReI': lambda s: s.I.re, 'ImI': lambda s: s.I.im,
    'expu': lambda s: s.H.re,
}


def _figure_asymptotics(entry: Dict[str, Any], pts: List[odeint.Sample], h: ComplexHP,
                        k: int) -> Tuple[List[mpf], Optional[Any], Optional[Any]]:
    """Asymptotic curve of the figure's component; also the nu1 and g1 it used."""
    kind, family = entry['kind'], entry.get('family', 'regular')
    if family == 'tzitzeica':
        return [asympt.tzitzeica_real(p.r, h).value.re for p in pts], None, None
    nu1 = monodromy.nu1(h, family)
    g1 = monodromy.from_H0(h).g1
    if kind in ('ReH', 'ImH'):
        values = [asympt.H_large(p.r, nu1, g1, family).value for p in pts]
        return [v.re if kind == 'ReH' else v.im for v in values], nu1, g1
    values = [e.value for e in asympt.I_sweep([p.r for p in pts], nu1, h, family, k)]
    return [v.re if kind == 'ReI' else v.im for v in values], nu1, g1


def emit_figure_data(figure_id: str, config: RunConfig,
                     registry: Optional[Dict[str, Dict[str, Any]]] = None,
                     run_logger: Optional[RunLogger] = None) -> Dict[str, Any]:
    """
    Numeric and asymptotic curves of one registered figure.

    Writes <figure_id>.csv with columns r, numeric, asymptotic, abs_err (the
    asymptotic columns stay empty above the caption's plot range), the stair
    stringers and landmarks for singular Re I figures, and
    <figure_id>.manifest.json naming the figure.

    Raises:
        UnknownFigureError: figure_id is not in the registry
    """
    registry = registry if registry is not None else load_figures()
    if figure_id not in registry:
        raise UnknownFigureError(f'unknown figure {figure_id!r}', {'known': len(registry)})
    entry = registry[figure_id]
    d = config.precision
    run = _Run(config, run_logger)
    h = ComplexHP.of(entry['H0'], d)
    k = entry.get('k', 0)
    samples = entry.get('sample_count', config.sample_count)
    traj = odeint.integrate(h, entry['r_end'], odeint.SolveConfig(digits=d, rel_tol=config.rel_tol,
                                                                 sample_count=samples))
    plot_max = mpf(entry.get('r_plot_max', '0'))
    pts = [p for p in traj.samples if p.r <= plot_max] if plot_max < 0 else list(traj.samples)
    asym, nu1, g1 = _figure_asymptotics(entry, pts, h, k)
    by_r = {id(p): a for p, a in zip(pts, asym)}
    component = _COMPONENT[entry['kind']]
    stringers = entry['kind'] == 'ReI' and entry.get('family') == 'singular'
    marks = asympt.landmarks(nu1, g1, h, k, d) if stringers else None
    header = ['r', 'numeric', 'asymptotic', 'abs_err'] + (['stringer_left', 'stringer_right'] if stringers else [])
    rows = []
    for p in traj.samples:
        num = component(p)
        row = [_num(p.r, d), _num(num, d)]
        if id(p) in by_r:
            row += [_num(by_r[id(p)], d), _num(abs(num - by_r[id(p)]), d)]
        else:
            row += ['', '']
        if marks is not None:
            row += [_num(marks.stringer_left(p.r), d), _num(marks.stringer_right(p.r), d)]
        rows.append(row)
    run.rows(header, rows, figure_id)
    extra: Dict[str, Any] = {'figure': entry}
    if marks is not None:
        run.json(marks.to_json(), f'{figure_id}.landmarks')
        extra['landmarks'] = marks.to_json()
    if 'window' in entry:
        fit = asympt.fit_k(traj, entry.get('family', 'singular'), tuple(entry['window']), nu1)
        extra['fit_k'] = fit.to_json()
    manifest = export_manifest(figure_id, config.to_json(), run.artifacts, config.output_dir, extra)
    logger.info(f'figure {figure_id}: {len(rows)} rows, {len(pts)} with asymptotics')
    return {'figure': figure_id, 'artifacts': run.artifacts, 'manifest': manifest['output_file'],
            'rows': len(rows)}


def _cmd_figures(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    registry = load_figures()
    if cfg.figure:
        result = emit_figure_data(cfg.figure, cfg, registry, run.run_logger)
        run.artifacts.extend(result['artifacts'])
        return result
    listing = [{'id': fid, 'caption': e['caption'], 'kind': e['kind'], 'H0': e['H0']} for fid, e in registry.items()]
    for item in listing:
        print(f"{item['id']}: {item['caption']}")
    run.json({'figures': listing}, 'figures')
    return {'figures': len(listing)}


# --- group and algebroid --------------------------------------------------------------------

def _start_point(cfg: RunConfig) -> coxeter.Point4:
    s_exact, kappa_exact = _rational_or_none(cfg.s), _rational_or_none(cfg.kappa)
    if s_exact is not None and kappa_exact is not None:
        field_ = coxeter.QuotientField.rational(s_exact)
        return coxeter.parametrize_cubic(kappa_exact, field_.generator())
    d = cfg.precision
    return coxeter.parametrize_cubic(ComplexHP.of(cfg.kappa, d), ComplexHP.of(cfg.s, d), d)


def _cmd_orbit(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    start = _start_point(cfg)
    result = coxeter.orbit(start, cfg.generator, cfg.max_iter)
    data: Dict[str, Any] = {'generator': cfg.generator, 'orbit': result.to_json(),
                            'relations': coxeter.relation_checks(start)}
    try:
        data['prediction'] = coxeter.orbit_length_from_s(cfg.s, digits=cfg.precision)
    except ValidationError as e:
        data['prediction'] = {'verdict': 'not applicable', 'reason': str(e)}
    run.json(data, 'orbit')
    return {'verdict': result.verdict}


def _cmd_qpoly(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    tower = coxeter.qk_tower(cfg.K)
    checks = coxeter.tower_checks(tower)
    rows = [[str(m), str(tower[m].degree()), ' '.join(series.int_poly_to_json(tower[m]))]
            for m in range(1, tower.K + 1)]
    run.rows(['m', 'degree', 'coefficients'], rows, 'qpoly')
    run.json({'q': tower.to_json(), 'checks': checks}, 'qpoly.checks')
    if not checks['valid']:
        raise Dp3Error('Chebyshev product identities fail', {'errors': checks['errors']})
    return {'K': tower.K, 'valid': checks['valid']}


def _cmd_det(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    data: Dict[str, Any] = {'symbolic': algebroid.fnu_symbolic_checks(cfg.nu)}
    if cfg.a0 is not None:
        a0 = _rational_or_none(cfg.a0)
        bv = algebroid.branch_series(cfg.p, a0 if a0 is not None else ComplexHP.of(cfg.a0, cfg.precision),
                                     cfg.L, digits=cfg.precision)
        data['branch_vector'] = algebroid.fnu_checks(bv)
    run.json(data, f'det_nu{cfg.nu}')
    failed = [name for name, part in data.items() if not part['valid']]
    if failed:
        raise Dp3Error('determinant checks fail', {'failed': failed})
    return {'nu': cfg.nu, 'checked': sorted(data)}


def _cmd_algebroid(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    d = cfg.precision
    summary: Dict[str, Any] = {'p': cfg.p}
    if cfg.a0 is None:
        table = algebroid.hp_coeffs(cfg.p, 'exact', cfg.N)
        structure = algebroid.verify_structure(cfg.p, table) if cfg.p else {'valid': True, 'errors': None}
        run.json({'table': table.to_json(), 'structure': structure}, f'algebroid_p{cfg.p}')
        summary['structure_valid'] = structure['valid']
        return summary
    a0 = ComplexHP.of(cfg.a0, d)
    eq = algebroid.algebraic_equation(cfg.p, a0, cfg.L, d)
    ep = algebroid.ep_residual(cfg.p, eq.source)
    run.json({'equation': eq.to_json(), 'ep_residual': ep}, f'algebroid_p{cfg.p}')
    summary.update({'nu': eq.nu, 'valid_order': eq.valid_order, 'residual': mpmath.nstr(eq.residual, 6),
                    'ep_valid': ep['valid']})
    return summary


# --- acceptance ------------------------------------------------------------------------------

def _cmd_report(cfg: RunConfig, run: _Run) -> Dict[str, Any]:
    result = acceptance.run_suite(cfg.criteria, cfg.quick, cfg.jobs)
    run.json(result, 'acceptance.report')
    for item in result['results']:
        print(f"[{'PASS' if item['valid'] else 'FAIL'}] {item['criterion']:2d} {item['title']}")
    if not result['valid']:
        failed = [r['criterion'] for r in result['results'] if not r['valid']]
        raise Dp3Error(f'{len(failed)} acceptance criteria failed', {'failed': failed})
    return {'passed': result['passed'], 'total': result['total']}


HANDLERS: Dict[str, Callable[[RunConfig, _Run], Dict[str, Any]]] = {
    'coeffs': _cmd_coeffs, 'polys': _cmd_polys, 'genfun': _cmd_genfun, 'solve': _cmd_solve,
    'monodromy': _cmd_monodromy, 'asympt': _cmd_asympt, 'compare': _cmd_compare, 'qpoly': _cmd_qpoly,
    'orbit': _cmd_orbit, 'det': _cmd_det, 'algebroid': _cmd_algebroid, 'report': _cmd_report,
    'figures': _cmd_figures,
}


def _error_report(cfg: RunConfig, error: BaseException, code: int) -> None:
    details = error.to_dict() if isinstance(error, Dp3Error) else {'error': type(error).__name__,
                                                                 'message': str(error), 'exit_code': code}
    details['config'] = cfg.to_json()
    try:
        export_json(details, 'error.report', cfg.output_dir)
    except OSError as e:
        logger.error(f'could not write error report: {e}')


def execute(config: RunConfig) -> int:
    """
    Run one subcommand.

    Returns:
        Exit status: 0 on success, 2 on validation failure, 3 on numerical
        failure. On 2 and 3 an error.report.json lands in output_dir.
    """
    run_logger = RunLogger(str(Path(config.output_dir) / 'logs'))
    run = _Run(config, run_logger)
    try:
        if config.subcommand not in HANDLERS:
            raise ValidationError(f'unknown subcommand {config.subcommand!r}', {'allowed': list(SUBCOMMANDS)})
        config.validate()
        run_logger.log_run_event('RUN_START', config.subcommand, config.to_json())
        with mpmath.workdps(config.precision):
            summary = HANDLERS[config.subcommand](config, run)
        if config.subcommand != 'figures' or not config.figure:
            export_manifest(config.subcommand, config.to_json(), run.artifacts, config.output_dir,
                            {'summary': summary})
        run_logger.log_run_event('RUN_FINISH', config.subcommand, summary)
        return EXIT_OK
    except (Dp3Error, ValueError, KeyError, ArithmeticError) as e:
        code = exit_code_for(e)
        if code == EXIT_VALIDATION:
            run_logger.log_validation_failure(config.subcommand, config.to_json(), str(e))
        else:
            run_logger.log_numerical_failure(e, config.to_json())
        logger.error(f'{config.subcommand} failed ({type(e).__name__}): {e}')
        _error_report(config, e, code)
        return code
    finally:
        run_logger.close()


# --- argument parsing ----------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON run configuration; flags override its values')
    common.add_argument('--digits', type=int, help='decimal working precision (default DP3_DIGITS or 50)')
    common.add_argument('--output-dir', dest='output_dir', help='directory for artifacts (default output)')
    common.add_argument('--format', choices=['csv', 'json'], help='table format (default csv)')
    common.add_argument('-v', '--verbose', action='count', default=0, help='more logging')
    common.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    return common


def _add(sub, name: str, help_text: str, common: argparse.ArgumentParser, options: Sequence[str]):
    p = sub.add_parser(name, help=help_text, parents=[common])
    spec = {
        'H0': dict(help='H(0), e.g. --H0=-0.148+0.191i'),
        'r_end': dict(flag='--r-end', help='last r (negative)'),
        'r_start': dict(flag='--r-start', help='first r of the grid or upper plot limit'),
        'sample_count': dict(flag='--sample-count', type=int, help='number of output samples'),
        'rel_tol': dict(flag='--rel-tol', type=float, help='relative local error target'),
        'family': dict(choices=['regular', 'singular'], help='asymptotic family'),
        'k': dict(type=int, help='branch index of the singular integral asymptotics'),
        'window': dict(nargs=2, metavar=('R_LO', 'R_HI'), help='fit window for k'),
        'N': dict(type=int, help='series order'),
        'which': dict(help='identity or generating function name'),
        'K': dict(type=int, help='tower or expansion depth'),
        's': dict(help='trace parameter s'),
        'kappa': dict(help='parameter of the rational point z = kappa x'),
        'generator': dict(help='reflection word such as r1r2'),
        'max_iter': dict(flag='--max-iter', type=int, help='orbit iteration cap'),
        'nu': dict(type=int, help='size of F_nu'),
        'p': dict(type=int, help='algebroid family label'),
        'a0': dict(help='a0 = -H(0) of the branch series'),
        'L': dict(type=int, help='branch-function truncation'),
        'figure': dict(help='figure id from the registry'),
        'criteria': dict(nargs='+', type=int, help='criterion numbers (default all)'),
        'jobs': dict(type=int, help='worker processes'),
        'quick': dict(action='store_const', const=True, help='reduced orders for a smoke run'),
    }
    for dest in options:
        kwargs = dict(spec[dest])
        flag = kwargs.pop('flag', f'--{dest}')
        p.add_argument(flag, dest=dest, default=None, **kwargs)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dp3', description='Degenerate Painleve III toolkit at a = 0')
    sub = parser.add_subparsers(dest='subcommand', required=True, help='Commands')
    common = _common_options()
    _add(sub, 'coeffs', 'Taylor coefficient table and identity suite', common, ['N', 'a0', 'which'])
    _add(sub, 'polys', 'kappa_n and P_n', common, ['N'])
    _add(sub, 'genfun', 'generating-function coefficients', common, ['N', 'which'])
    _add(sub, 'solve', 'integrate H and I along the negative axis', common,
         ['H0', 'r_end', 'r_start', 'sample_count', 'rel_tol'])
    _add(sub, 'monodromy', 'monodromy data and nu1', common, ['H0'])
    _add(sub, 'asympt', 'asymptotic formulas on a grid', common,
         ['H0', 'r_end', 'r_start', 'sample_count', 'family', 'k'])
    _add(sub, 'compare', 'numeric against asymptotic', common,
         ['H0', 'r_end', 'r_start', 'sample_count', 'rel_tol', 'family', 'k', 'window'])
    _add(sub, 'qpoly', 'q-polynomial tower', common, ['K'])
    _add(sub, 'orbit', 'orbit of a reflection word', common, ['s', 'kappa', 'generator', 'max_iter'])
    _add(sub, 'det', 'F_nu determinant checks', common, ['nu', 'p', 'a0', 'L'])
    _add(sub, 'algebroid', 'H_p coefficients and algebraic equation', common, ['p', 'a0', 'N', 'L'])
    _add(sub, 'report', 'bundled acceptance run', common, ['criteria', 'jobs', 'quick'])
    _add(sub, 'figures', 'list figures or emit one', common, ['figure', 'sample_count', 'rel_tol'])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config(args.config) if args.config else None
    skip = {'config', 'verbose', 'quiet', 'subcommand'}
    flags = {k: v for k, v in vars(args).items() if k not in skip}
    return RunConfig.layered(args.subcommand, file_values, flags)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(-1 if args.quiet else args.verbose)
    try:
        config = config_from_args(args)
    except ValidationError as e:
        logger.error(str(e))
        print(json.dumps(e.to_dict(), indent=2), file=sys.stderr)
        return EXIT_VALIDATION
    setup_logging(-1 if args.quiet else args.verbose, str(Path(config.output_dir) / 'logs'))
    return execute(config)


if __name__ == '__main__':
    sys.exit(main())
