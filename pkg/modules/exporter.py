import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from modules.logging_manager import sha256_of

FORMATS = ('csv', 'json')


def _target(output_dir: str, name: str) -> Path:
    os.makedirs(output_dir, exist_ok=True)
    return Path(output_dir) / name


def export_rows(header: Sequence[str], rows: List[Sequence[str]], name: str, format: str = 'csv',
                output_dir: str = 'output') -> Dict[str, Any]:
    """
    Write a table of decimal strings.

    CSV keeps one row per line under the header; JSON holds
    {'columns': header, 'rows': rows}. Neither carries a timestamp.
    """
    if format not in FORMATS:
        raise ValueError(f"Unsupported format {format!r}; use one of {FORMATS}.")
    output_file = _target(output_dir, f"{name}.{format}")
    if format == 'csv':
        frame = pd.DataFrame([list(r) for r in rows], columns=list(header), dtype=str)
        frame.to_csv(output_file, index=False, lineterminator='\n')
    else:
        with open(output_file, 'w') as f:
            json.dump({'columns': list(header), 'rows': [list(r) for r in rows]}, f, indent=1)
            f.write('\n')
    return {
        "status": "success",
        "output_file": str(output_file),
        "row_count": len(rows)
    }


def read_rows(path: str) -> List[List[str]]:
    """Rows of a CSV written by export_rows, header dropped."""
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    return frame.values.tolist()


def export_json(data: Dict[str, Any], name: str, output_dir: str = 'output') -> Dict[str, Any]:
    output_file = _target(output_dir, name if name.endswith('.json') else f"{name}.json")
    with open(output_file, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
        f.write('\n')
    return {"status": "success", "output_file": str(output_file)}


def export_manifest(name: str, config: Dict[str, Any], artifacts: List[str],
                    output_dir: str = 'output', extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    <name>.manifest.json with the run config, artifact checksums and the creation time.

    The manifest is the only file that carries a timestamp.
    """
    manifest = {
        'config': config,
        'created': datetime.now(timezone.utc).isoformat(),
        'artifacts': {Path(p).name: sha256_of(Path(p)) for p in artifacts},
    }
    if extra:
        manifest.update(extra)
    output_file = _target(output_dir, f"{name}.manifest.json")
    with open(output_file, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=str)
        f.write('\n')
    return {"status": "success", "output_file": str(output_file), "artifact_count": len(artifacts)}
