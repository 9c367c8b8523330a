"""
Reproducibility harness for the dP3 toolkit.
Runs the acceptance report, checks it against the pre-registered criteria
and writes a summary table plus checksums of every artifact.
"""

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone

import pandas as pd
import yaml

from modules.acceptance import SEED, run_suite
from modules.exporter import export_json
from modules.logging_manager import setup_logging, sha256_of

logger = logging.getLogger(__name__)


def load_environment(path='environment.yaml'):
    """Precision settings and pinned dependencies recorded for the run."""
    with open(path, 'r') as f:
        return yaml.safe_load(f)


def validate_criteria(report, criteria):
    """Validate a report against the pre-registered criteria of run_manifest.json."""
    failures = []
    by_number = {r['criterion']: r for r in report['results']}
    for number in criteria['required']:
        result = by_number.get(number)
        if result is None:
            failures.append(f"Criterion {number} was not run")
        elif not result['valid']:
            failures.append(f"Criterion {number} ({result['title']}) failed: {(result['errors'] or [])[:3]}")
        elif criteria.get('enforce_budgets') and not result['within_budget']:
            failures.append(f"Criterion {number} took {result['elapsed']:.1f}s, budget {result['budget']}s")
    return failures


def generate_summary_table(report):
    """One row per criterion, sorted by number."""
    rows = []
    for result in report['results']:
        rows.append({
            'criterion': result['criterion'],
            'title': result['title'],
            'valid': result['valid'],
            'elapsed_s': result['elapsed'],
            'budget_s': result['budget'],
            'within_budget': result.get('within_budget'),
            'errors': len(result['errors'] or []),
        })
    df = pd.DataFrame(rows)
    return df.sort_values('criterion')


def write_checksums(paths, output_dir):
    checksum_file = os.path.join(output_dir, 'checksums.sha256')
    with open(checksum_file, 'w') as f:
        for filepath in paths:
            f.write(f"{sha256_of(filepath)}  {os.path.basename(filepath)}\n")
    return checksum_file


def main(args):
    setup_logging(0, os.path.join(args.output_dir, 'logs'))
    with open(args.manifest, 'r') as f:
        manifest = json.load(f)
    environment = load_environment(args.environment)
    criteria = manifest['acceptance_criteria']

    numbers = args.criteria or criteria['required']
    report = run_suite(numbers, quick=args.quick, jobs=args.jobs)
    report_file = export_json(report, 'acceptance.report', args.output_dir)['output_file']

    table = generate_summary_table(report)
    table_file = os.path.join(args.output_dir, 'acceptance_summary.csv')
    table.to_csv(table_file, index=False)

    run_record = {
        'created': datetime.now(timezone.utc).isoformat(),
        'seed': SEED,
        'quick': args.quick,
        'precision': environment.get('precision', {}),
        'dependencies': environment.get('dependencies', {}),
        'artifacts': {os.path.basename(p): sha256_of(p) for p in (report_file, table_file)},
    }
    run_file = export_json(run_record, 'run_record', args.output_dir)['output_file']
    checksum_file = write_checksums([report_file, table_file, run_file], args.output_dir)
    logger.info(f"Checksums written to {checksum_file}")

    failures = validate_criteria(report, dict(criteria, required=numbers))
    if failures:
        print("\nAcceptance failures:")
        for failure in failures:
            print(f"- {failure}")
        sys.exit(1)

    print(f"\nAll {report['total']} criteria passed!")
    print(f"Results saved to {args.output_dir}")
    sys.exit(0)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Run the dP3 acceptance suite with checksums')
    parser.add_argument('--manifest', default='run_manifest.json',
                        help='Pre-registered acceptance criteria')
    parser.add_argument('--environment', default='environment.yaml',
                        help='Environment description')
    parser.add_argument('--output-dir', default='output',
                        help='Output directory for results')
    parser.add_argument('--criteria', type=int, nargs='+',
                        help='Criterion numbers to run (default: all required)')
    parser.add_argument('--jobs', type=int, default=1,
                        help='Worker processes')
    parser.add_argument('--quick', action='store_true',
                        help='Reduced orders and ranges')

    args = parser.parse_args()
    main(args)
