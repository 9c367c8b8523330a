"""
Configuration validator for dp3 run configs and the figure registry.
"""

import json
import jsonschema
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from modules.exceptions import ValidationError


class ConfigValidator:
    """Validates run configurations against the schema."""

    def __init__(self, schema_path: Optional[str] = None):
        """
        Initialize the validator with a schema.

        Args:
            schema_path: Path to the JSON schema file. If None, uses the default schema.
        """
        if schema_path is None:
            schema_path = str(Path(__file__).parent.parent / 'schemas' / 'run_config_schema.json')

        with open(schema_path, 'r') as f:
            self.schema = json.load(f)

    @staticmethod
    def _errors(validator: jsonschema.Draft7Validator, instance: Any) -> List[Dict[str, str]]:
        return [
            {
                'message': e.message,
                'path': ' -> '.join(str(p) for p in e.path),
                'schema_path': ' -> '.join(str(p) for p in e.schema_path)
            }
            for e in sorted(validator.iter_errors(instance), key=lambda e: list(e.path))
        ]

    def validate(self, config: Union[str, Dict, Path]) -> Dict:
        """
        Validate a configuration against the schema.

        Args:
            config: Either a path to a JSON file, a dictionary, or a Path object

        Returns:
            Dict with 'valid' and 'errors' (None when valid)
        """
        if isinstance(config, (str, Path)):
            return self.validate_file(config)
        errors = self._errors(jsonschema.Draft7Validator(self.schema), config)
        return {'valid': not errors, 'errors': errors or None}

    def validate_figure(self, figure: Dict) -> Dict:
        """Validate one figure-registry entry against the figure sub-schema."""
        figure_schema = dict(self.schema['definitions']['figure'])
        figure_schema['$schema'] = self.schema['$schema']
        errors = self._errors(jsonschema.Draft7Validator(figure_schema), figure)
        return {'valid': not errors, 'errors': errors or None}

    def get_template(self, subcommand: str = 'solve') -> Dict:
        """
        A minimal valid configuration for a subcommand.

        Returns:
            Dict that passes validate()
        """
        template: Dict[str, Any] = {'subcommand': subcommand, 'digits': 50, 'output_dir': 'output', 'format': 'csv'}
        if subcommand in ('solve', 'monodromy', 'asympt', 'compare'):
            template['H0'] = '-1/30-1i'
        if subcommand in ('solve', 'asympt', 'compare'):
            template['r_end'] = '-100'
            template['sample_count'] = 500
        if subcommand in ('asympt', 'compare'):
            template['family'] = 'regular'
            template['k'] = None
        return template

    def validate_file(self, file_path: Union[str, Path]) -> Dict:
        """
        Validate a configuration file and provide detailed error messages.

        Args:
            file_path: Path to the configuration file

        Returns:
            Dict containing validation results with detailed messages
        """
        try:
            with open(file_path, 'r') as f:
                config_data = json.load(f)
        except FileNotFoundError:
            return {'valid': False, 'errors': [{'message': f'No such file: {file_path}'}]}
        except json.JSONDecodeError as e:
            return {
                'valid': False,
                'errors': [
                    {
                        'message': f'Invalid JSON: {str(e)}',
                        'line': e.lineno,
                        'column': e.colno
                    }
                ]
            }

        return self.validate(config_data)


def load_config(file_path: Union[str, Path], validator: Optional[ConfigValidator] = None) -> Dict[str, Any]:
    """Read and validate a run config, raising ValidationError with the itemized schema errors."""
    validator = validator or ConfigValidator()
    result = validator.validate_file(file_path)
    if not result['valid']:
        raise ValidationError(f'invalid configuration {file_path}', {'errors': result['errors']})
    with open(file_path, 'r') as f:
        return json.load(f)


def load_figures(file_path: Optional[Union[str, Path]] = None,
                 validator: Optional[ConfigValidator] = None) -> Dict[str, Dict[str, Any]]:
    """The figure registry keyed by id; every entry is schema-checked."""
    if file_path is None:
        file_path = Path(__file__).parent.parent / 'configs' / 'figures.json'
    validator = validator or ConfigValidator()
    try:
        with open(file_path, 'r') as f:
            entries = json.load(f)['figures']
    except (FileNotFoundError, json.JSONDecodeError, KeyError) as e:
        raise ValidationError(f'cannot read figure registry {file_path}: {e}')
    registry = {}
    for entry in entries:
        result = validator.validate_figure(entry)
        if not result['valid']:
            raise ValidationError(f'invalid figure entry {entry.get("id")!r}', {'errors': result['errors']})
        registry[entry['id']] = entry
    return registry
