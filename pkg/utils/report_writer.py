"""
Report Writer
Turns reports and sweep results into CSV or JSON with a fixed layout
"""

import json
import logging
import math
import os
import sys
from typing import Dict, List, Optional

import pandas as pd

from models import ERROR, FAIL, OUTPUT_FORMATS, PASS, SCHEMA_VERSION
from utils.errors import DomainError

logger = logging.getLogger(__name__)


def _cell(value):
    """CSV cell text: floats round-trip through repr, None stays empty."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return value


def _jsonable(value):
    """Map non-finite floats to None, recursively."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, 'to_dict'):
        return _jsonable(value.to_dict())
    if hasattr(value, 'value') and isinstance(getattr(value, 'value'), str):
        return value.value
    return value


class ReportWriter:
    """
    Writes report rows as CSV (one row per sample, schema_version first) or
    whole reports as JSON.
    """

    def __init__(self, output_format: str = 'csv', output_path: Optional[str] = None):
        if output_format not in OUTPUT_FORMATS:
            raise DomainError(f"output format must be one of {OUTPUT_FORMATS}, got: {output_format!r}")
        self.output_format = output_format
        self.output_path = output_path

    def to_dataframe(self, rows: List[Dict], columns: Optional[List[str]] = None) -> pd.DataFrame:
        """
        Build the CSV table.

        Args:
            rows: One dict per sample
            columns: Fixed column order (defaults to first-seen key order)

        Returns:
            DataFrame of formatted cells, schema_version as the first column
        """
        if columns is None:
            columns = []
            for row in rows:
                for key in row:
                    if key not in columns:
                        columns.append(key)
        records = [[_cell(row.get(col)) for col in columns] for row in rows]
        df = pd.DataFrame(records, columns=columns, dtype=object)
        df.insert(0, 'schema_version', [SCHEMA_VERSION] * len(df))
        return df

    def render_csv(self, rows: List[Dict], columns: Optional[List[str]] = None) -> str:
        df = self.to_dataframe(rows, columns)
        return df.to_csv(index=False, lineterminator='\n')

    def render_json(self, payload: Dict) -> str:
        data = _jsonable(payload)
        data.setdefault('schema_version', SCHEMA_VERSION)
        return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + '\n'

    def write(self, payload: Dict, columns: Optional[List[str]] = None) -> str:
        """
        Emit a report payload ({'rows': [...], ...}) in the configured format.

        Returns:
            Output path, or '-' for stdout
        """
        if self.output_format == 'csv':
            text = self.render_csv(payload.get('rows', []), columns)
        else:
            text = self.render_json(payload)

        if self.output_path in (None, '', '-'):
            sys.stdout.write(text)
            sys.stdout.flush()
            return '-'

        folder = os.path.dirname(self.output_path)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(self.output_path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        logger.info(f"Report written to {self.output_path}")
        return self.output_path

    @staticmethod
    def get_summary(rows: List[Dict]) -> Dict:
        """Verdict counts over report rows."""
        total = len(rows)
        passed = sum(1 for row in rows if row.get('verdict') == PASS)
        failed = sum(1 for row in rows if row.get('verdict') == FAIL)
        errors = sum(1 for row in rows if row.get('verdict') == ERROR)
        return {
            'total_rows': total,
            'passed': passed,
            'failed': failed,
            'errors': errors,
            'pass_rate': round((passed / total * 100) if total > 0 else 0, 2),
        }
