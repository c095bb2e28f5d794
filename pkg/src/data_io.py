"""CSV ingestion and emission for every command.

Readers wrap pandas parse failures into DataFormatError; writers print floats
at 17 significant digits so numeric payloads survive a write/read cycle.
"""
import logging
import os
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import DataFormatError, EmptySample, LengthMismatch
from src.linear_eb import GroupedSample, IntervalGroupedSample
from src.moments import interval_array
from src.ranking import validate_ranking
from src.utils import write_frame

logger = logging.getLogger(__name__)


def read_frame(file_path, **kwargs) -> pd.DataFrame:
    if not os.path.exists(file_path):
        raise DataFormatError(f'no such file: {file_path}')
    try:
        frame = pd.read_csv(file_path, **kwargs)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as err:
        raise DataFormatError(f'cannot parse {file_path}: {err}') from err
    if frame.empty:
        raise DataFormatError(f'{file_path} holds no rows')
    logger.debug('read %d rows x %d columns from %s', frame.shape[0], frame.shape[1], file_path)
    return frame


def _numeric(frame: pd.DataFrame, columns: Sequence[str], file_path) -> np.ndarray:
    try:
        values = frame[list(columns)].apply(pd.to_numeric, errors='raise').to_numpy(dtype=float)
    except (ValueError, TypeError) as err:
        raise DataFormatError(f'non-numeric value in {file_path}: {err}') from err
    if np.isnan(values).any():
        raise DataFormatError(f'missing values in {file_path}')
    return values


def read_scalar_csv(file_path, column: Optional[str] = None) -> np.ndarray:
    """
    Reads a one-column sample.

    Args:
        file_path: CSV with a header row.
        column (Optional[str]): Column to use when the file has several.

    Returns:
        np.ndarray: The sample as floats.
    """
    frame = read_frame(file_path)
    if column is None:
        if frame.shape[1] != 1:
            raise DataFormatError(f'{file_path} has {frame.shape[1]} columns; pass a column name')
        column = frame.columns[0]
    elif column not in frame.columns:
        raise DataFormatError(f'column {column!r} not found in {file_path}')
    return _numeric(frame, [column], file_path)[:, 0]


def _bound_columns(frame: pd.DataFrame, exclude: Sequence[str]) -> List[str]:
    cols = [c for c in frame.columns if c not in exclude]
    if len(cols) == 0 or len(cols) % 2:
        raise DataFormatError(f'expected pairs of lower/upper columns, got {cols}')
    return cols


def read_interval_csv(file_path, label_col: Optional[str] = None) -> Tuple[np.ndarray, List]:
    """
    Reads interval objects stored as l_1,u_1,...,l_p,u_p columns.

    With an odd number of columns and no label_col, the first column holds
    the object labels.

    Returns:
        Tuple[np.ndarray, List]: (n, p, 2) bounds and the object labels
        (row numbers when there is no label column).
    """
    frame = read_frame(file_path)
    if label_col is None and frame.shape[1] % 2:
        label_col = frame.columns[0]
    exclude = [label_col] if label_col else []
    if label_col and label_col not in frame.columns:
        raise DataFormatError(f'label column {label_col!r} not found in {file_path}')
    values = _numeric(frame, _bound_columns(frame, exclude), file_path)
    labels = frame[label_col].tolist() if label_col else list(range(frame.shape[0]))
    return interval_array(values.reshape(values.shape[0], -1, 2)), labels


def read_grouped_csv(file_path, group_col: str = 'group') -> GroupedSample:
    frame = read_frame(file_path)
    if group_col not in frame.columns:
        raise DataFormatError(f'group column {group_col!r} not found in {file_path}')
    _numeric(frame, [c for c in frame.columns if c != group_col], file_path)
    return GroupedSample.from_frame(frame, group_col=group_col)


def read_interval_grouped_csv(file_path, group_col: str = 'group') -> IntervalGroupedSample:
    frame = read_frame(file_path)
    if group_col not in frame.columns:
        raise DataFormatError(f'group column {group_col!r} not found in {file_path}')
    _numeric(frame, _bound_columns(frame, [group_col]), file_path)
    return IntervalGroupedSample.from_frame(frame, group_col=group_col)


def read_rankings_csv(file_path, group_col: Optional[str] = None) -> Tuple[np.ndarray, Optional[np.ndarray], List[str]]:
    """
    Reads one ranking per row.

    Returns:
        Tuple: N x t integer rankings, the group label of each row (None
        without a group column) and the object names.
    """
    frame = read_frame(file_path)
    groups = None
    if group_col is not None:
        if group_col not in frame.columns:
            raise DataFormatError(f'group column {group_col!r} not found in {file_path}')
        groups = frame[group_col].to_numpy()
    objects = [c for c in frame.columns if c != group_col]
    values = _numeric(frame, objects, file_path)
    if not np.all(values == np.round(values)):
        raise DataFormatError(f'rankings in {file_path} must be integers')
    rankings = np.vstack([validate_ranking(row) for row in values.astype(int)])
    return rankings, groups, [str(c) for c in objects]


def write_output(frame: pd.DataFrame, file_path, fmt: str = 'csv') -> str:
    if fmt == 'json':
        frame.to_json(file_path, orient='records', indent=4, double_precision=15)
    else:
        write_frame(frame, file_path)
    return str(file_path)


def emit_plot_data(file_path, xs: Sequence[float], series: Mapping[str, Sequence[float]]) -> str:
    """
    Writes named curves over a common x axis as a tidy x,series,value CSV.

    Raises:
        EmptySample: No x values or no series.
        LengthMismatch: A series does not have one value per x.
    """
    x = np.asarray(xs, dtype=float)
    if x.size == 0 or len(series) == 0:
        raise EmptySample('plot data needs at least one x value and one series')
    parts = []
    for name, values in series.items():
        v = np.asarray(values, dtype=float)
        if v.shape != x.shape:
            raise LengthMismatch(f'series {name!r} has {v.size} values for {x.size} x values')
        parts.append(pd.DataFrame({'x': x, 'series': name, 'value': v}))
    write_frame(pd.concat(parts, ignore_index=True), file_path)
    return str(file_path)


def read_plot_data(file_path) -> pd.DataFrame:
    frame = read_frame(file_path)
    if list(frame.columns) != ['x', 'series', 'value']:
        raise DataFormatError(f'{file_path} is not a plot-data file')
    return frame
