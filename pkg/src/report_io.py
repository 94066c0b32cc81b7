"""
Reading observations from CSV files and writing reports.

JSON output uses fixed key names and 17 significant digits for every
float so repeated runs are byte-identical. CSV output is plot-ready.
"""

import json
import logging
import math
import os
import sys
from typing import Any, List, Mapping, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from src.errors import EmptyInput, InvalidParameter, IoError, ParseError
from src.settings import FLOAT_FORMAT

# Set up logging
logger = logging.getLogger(__name__)

ColumnKey = Union[int, str]

JSON = 'json'
CSV = 'csv'
TEXT = 'text'
FORMATS = (JSON, CSV, TEXT)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def read_table(path: str) -> pd.DataFrame:
    """
    Load a CSV file as strings, one DataFrame row per physical line

    Raises:
        IoError: if the file cannot be read
        EmptyInput: if it holds nothing
        ParseError: for malformed CSV
    """
    if not os.path.exists(path):
        raise IoError(f"input file not found: {path}")
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                           skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise EmptyInput(f"input file is empty: {path}")
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed CSV in {path}: {e}")
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(f"could not read {path}: {e}")


def _resolve_column(frame: pd.DataFrame, key: ColumnKey, header: Optional[List[str]]) -> int:
    if isinstance(key, str) and not key.strip().lstrip('-').isdigit():
        if header is None or key not in header:
            raise ParseError(f"column {key!r} not found in the header")
        return header.index(key)
    index = int(key)
    if not 0 <= index < frame.shape[1]:
        raise ParseError(f"column {index} not present (file has {frame.shape[1]} columns)")
    return index


def ingest_csv(path: str, columns: Union[ColumnKey, Sequence[ColumnKey]] = 0) -> np.ndarray:
    """
    Read one or more numeric columns from a CSV file

    A single header row is skipped when any selected cell of the first row
    is not a number; header names can then be used as column keys.

    Args:
        path: CSV file
        columns: A column index or name for a Sample, or a sequence of them
            for a vector sample

    Returns:
        1-D array for a single column, (n, d) array for several, in file order

    Raises:
        IoError, EmptyInput, ParseError (with the 1-based line number)
    """
    frame = read_table(path)
    single = isinstance(columns, (int, str))
    keys = [columns] if single else list(columns)
    if not keys:
        raise InvalidParameter("no columns selected")

    first_row = [str(v).strip() for v in frame.iloc[0].tolist()]
    numeric_keys = [k for k in keys if not isinstance(k, str) or k.strip().lstrip('-').isdigit()]
    probe = [int(k) for k in numeric_keys if 0 <= int(k) < frame.shape[1]]
    has_header = any(isinstance(k, str) and not k.strip().lstrip('-').isdigit() for k in keys) or \
        any(not _is_number(first_row[i]) for i in probe)
    header = first_row if has_header else None
    indices = [_resolve_column(frame, k, header) for k in keys]

    body = frame.iloc[1:] if has_header else frame
    if body.empty:
        raise EmptyInput(f"no data rows in {path}")

    parsed = []
    for index in indices:
        cells = body.iloc[:, index].astype(str).str.strip()
        values = pd.to_numeric(cells, errors='coerce').to_numpy(dtype=float)
        bad = ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            line = int(body.index[row]) + 1
            raise ParseError(f"{cells.iloc[row]!r} in column {index} is not a finite number", line=line)
        parsed.append(values)

    logger.info(f"Read {len(parsed[0])} rows from {path} (columns {indices}{', header skipped' if has_header else ''})")
    if single:
        return parsed[0]
    return np.column_stack(parsed)


def to_json_text(value: Any) -> str:
    """Serialize plain report data with 17-significant-digit floats; non-finite floats become null"""
    if value is None:
        return 'null'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return FLOAT_FORMAT % number if math.isfinite(number) else 'null'
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(str(k))}: {to_json_text(v)}" for k, v in value.items())
        return '{' + ', '.join(items) + '}'
    if isinstance(value, (list, tuple, np.ndarray)):
        return '[' + ', '.join(to_json_text(v) for v in value) + ']'
    raise TypeError(f"cannot serialize {type(value).__name__}")


def replicates_frame(report) -> pd.DataFrame:
    """Per-replicate (clt) or per-size (lln) rows of a SimulationReport"""
    if report.kind == 'lln':
        return pd.DataFrame({
            'n': report.n_grid,
            'estimate': report.estimates,
            'scaled_error': report.scaled_errors,
            'sample_mean': report.sample_means,
            'envelope': report.envelope(),
        })
    return pd.DataFrame({
        'replicate': np.arange(len(report.estimates)),
        'estimate': report.estimates,
        'scaled_error': report.scaled_errors,
    })


def write_replicates_csv(report, path: str) -> None:
    """Save the per-replicate table for external plotting"""
    replicates_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Saved replicate table to {path}")


def _text_cell(value: Any) -> str:
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) <= 10:
            return ', '.join(_text_cell(v) for v in value)
        return f"[{len(value)} values]"
    if isinstance(value, Mapping):
        return ', '.join(f"{k}={_text_cell(v)}" for k, v in value.items())
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    return str(value)


def _as_data(report: Any) -> Any:
    if isinstance(report, pd.DataFrame):
        return report.to_dict(orient='records')
    if hasattr(report, 'to_dict'):
        return report.to_dict()
    return report


def render_report(report: Any, fmt: str = JSON) -> str:
    """
    Render a report (anything with to_dict, a mapping, or a DataFrame)

    Args:
        report: The report
        fmt: 'json', 'csv' or 'text'
    """
    if fmt not in FORMATS:
        raise InvalidParameter(f"unknown output format {fmt!r}")

    if fmt == JSON:
        return to_json_text(_as_data(report)) + '\n'

    if fmt == CSV:
        if isinstance(report, pd.DataFrame):
            frame = report
        elif hasattr(report, 'estimates') and hasattr(report, 'kind'):
            frame = replicates_frame(report)
        else:
            data = _as_data(report)
            frame = pd.DataFrame({'key': list(data.keys()), 'value': [_text_cell(v) for v in data.values()]})
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')

    if isinstance(report, pd.DataFrame):
        return report.to_string(index=False) + '\n'
    data = _as_data(report)
    table = pd.Series({key: _text_cell(value) for key, value in data.items()}, dtype=object)
    return table.to_string() + '\n'


def emit_report(report: Any, fmt: str = JSON, stream: Optional[TextIO] = None) -> None:
    """Write a rendered report to standard output (or the given stream)"""
    target = stream if stream is not None else sys.stdout
    target.write(render_report(report, fmt))
    target.flush()
