"""
CSV Repository for drift reports.
File: csv_repository.py

Rows are rendered with every working digit in scientific notation so that a
re-read value equals the printed one exactly. Writes to a path go through a
temporary file that is moved into place.
"""

import csv
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Union

import mpmath
import pandas as pd

from rootdyn.models import DriftReport

# --- CONFIGURATION ---
CSV_DELIMITER = ','
LINE_TERMINATOR = '\n'
FIELDNAMES = ['n', 'float_value', 'oracle_value', 'abs_error']
# ---------------------

logger = logging.getLogger(__name__)

Destination = Union[str, Path, IO[str]]


def format_big_float(value: Any, digits: int) -> str:
    """Scientific rendering with `digits` significant digits; '' for absent values"""
    if value is None:
        return ''
    return mpmath.nstr(value, digits, min_fixed=0, max_fixed=0, strip_zeros=False)


class DriftCSVRepository:
    """Reads and writes drift reports as CSV"""

    def __init__(self, delimiter: str = CSV_DELIMITER):
        self.delimiter = delimiter
        self.fieldnames = list(FIELDNAMES)

    def _rows(self, report: DriftReport) -> List[Dict[str, str]]:
        return [
            {
                'n': str(step.n),
                'float_value': format_big_float(step.float_value, report.digits),
                'oracle_value': format_big_float(step.oracle_value, report.oracle_digits),
                'abs_error': format_big_float(step.abs_error, report.oracle_digits),
            }
            for step in report.steps
        ]

    def _write_rows(self, f: IO[str], rows: List[Dict[str, str]]):
        writer = csv.DictWriter(
            f,
            fieldnames=self.fieldnames,
            delimiter=self.delimiter,
            lineterminator=LINE_TERMINATOR,
            quoting=csv.QUOTE_MINIMAL,
        )
        writer.writeheader()
        writer.writerows(rows)

    def write_report(self, report: DriftReport, destination: Destination):
        """Write a report to a path (atomically) or to an open text stream"""
        rows = self._rows(report)
        if hasattr(destination, 'write'):
            self._write_rows(destination, rows)
            return

        target = str(destination)
        temp_file = None
        try:
            temp_fd, temp_file = tempfile.mkstemp(suffix='.csv', dir=os.path.dirname(target) or '.')
            with os.fdopen(temp_fd, 'w', newline='', encoding='utf-8') as f:
                self._write_rows(f, rows)
            shutil.move(temp_file, target)
            temp_file = None
            logger.info(f"Wrote {len(rows)} drift rows to {target}")
        except OSError as e:
            logger.error(f"Error writing drift CSV {target}: {e}")
            raise
        finally:
            if temp_file and os.path.exists(temp_file):
                try:
                    os.remove(temp_file)
                except OSError:
                    pass

    def read_rows(self, source: Destination) -> List[Dict[str, Optional[str]]]:
        """Raw rows with empty oracle fields mapped to None"""
        if hasattr(source, 'read'):
            rows = list(csv.DictReader(source, delimiter=self.delimiter))
        else:
            with open(source, 'r', newline='', encoding='utf-8') as f:
                rows = list(csv.DictReader(f, delimiter=self.delimiter))
        return [{k: (v if v != '' else None) for k, v in row.items()} for row in rows]

    def read_frame(self, source: Destination) -> pd.DataFrame:
        """DataFrame keeping the decimal strings intact; parse with mpmath.mpf as needed"""
        frame = pd.read_csv(
            source,
            sep=self.delimiter,
            dtype=str,
            keep_default_na=False,
        )
        if 'n' in frame.columns:
            frame['n'] = frame['n'].astype(int)
        return frame
