import logging
import re
from pathlib import Path

import numpy as np
import pandas as pd

from cautious.errors import DataParseError
from cautious.models.dataset import Dataset
from cautious.probes.normalizer import standardize as standardize_dataset

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


def _read_cells(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError as exc:
        raise DataParseError(f"{path} is empty") from exc
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        # file line 1 is the header, so file line k is data row k - 1
        row = int(match.group(1)) - 1 if match else None
        raise DataParseError(f"ragged row in {path}", row=row) from exc


def _parse_cell(text: str) -> float:
    # Python float is correctly rounded, so %.17g text parses back bit for bit
    try:
        return float(text)
    except ValueError:
        return np.nan


def _resolve_response(frame: pd.DataFrame, response: str | int) -> str:
    if isinstance(response, str) and response in frame.columns:
        return response
    try:
        position = int(response)
    except (TypeError, ValueError):
        raise DataParseError(f"response column '{response}' not found; header is {list(frame.columns)}") from None
    if not 0 <= position < frame.shape[1]:
        raise DataParseError(f"response column index {position} is outside 0..{frame.shape[1] - 1}")
    return frame.columns[position]


def load_csv(path: str | Path, response: str | int = 0, standardize: bool = True) -> Dataset:
    """
    Reads a header-first numeric CSV into a Dataset.

    `response` is a column name or a 0-based position; every other column
    becomes a predictor in file order. Missing, non-numeric and non-finite
    cells raise DataParseError naming the 1-based data row and the column.
    Values are parsed exactly, so a file written with %.17g reloads bit for
    bit. With `standardize` the columns are centred and scaled to x'x = n.
    """
    path = Path(path)
    frame = _read_cells(path)
    if frame.shape[1] < 2:
        raise DataParseError(f"{path} needs a response and at least one predictor column")

    values = np.empty(frame.shape, dtype=float)
    for col_pos, column in enumerate(frame.columns):
        cells = frame[column]
        missing = cells.isna() | (cells.str.strip() == "")
        if missing.any():
            raise DataParseError("missing value", row=int(np.argmax(missing.to_numpy())) + 1, column=str(column))
        parsed = cells.map(_parse_cell).to_numpy(dtype=float)
        bad = ~np.isfinite(parsed)
        if bad.any():
            first = int(np.argmax(bad))
            raise DataParseError(f"non-numeric cell '{cells.iloc[first]}'", row=first + 1, column=str(column))
        values[:, col_pos] = parsed

    response_name = _resolve_response(frame, response)
    response_pos = list(frame.columns).index(response_name)
    predictors = [c for c in frame.columns if c != response_name]
    data = Dataset(
        y=values[:, response_pos],
        x=np.delete(values, response_pos, axis=1),
        column_names=[str(c) for c in predictors],
        response_name=str(response_name),
    )
    logger.debug("loaded %s: n=%d, p=%d", path, data.n, data.p)
    return standardize_dataset(data) if standardize else data


COMPARISON_COLUMNS = ["method", "active", "false_active", "inactive", "false_inactive", "squared_error", "delta_beta"]


def load_comparison(path: str | Path) -> list[dict[str, str]]:
    """Reads competitor results (one row per method) for side-by-side display; nothing is refitted."""
    path = Path(path)
    frame = _read_cells(path)
    missing = [c for c in COMPARISON_COLUMNS if c not in frame.columns]
    if missing:
        raise DataParseError(f"comparison file {path} lacks columns {missing}")
    return frame[COMPARISON_COLUMNS].to_dict(orient="records")
