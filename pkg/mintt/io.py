import logging

import numpy as np
import pandas as pd

from .core import TimeSeries
from .errors import (
    CsvParseError,
    EmptyInputError,
    NonPositiveValueError,
    SeriesTooShortError,
)

log = logging.getLogger("mintt")

FLOAT_FORMAT = "%.17g"


def load_csv(path):
    """
    Reads a header row of component names followed by one numeric row per
    time step, oldest first.
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise EmptyInputError("'{}' is empty".format(path))
    except pd.errors.ParserError as e:
        raise CsvParseError("Cannot parse '{}': {}".format(path, e))
    except OSError as e:
        raise CsvParseError("Cannot read '{}': {}".format(path, e))
    names = [str(name).strip() for name in frame.iloc[0]]
    duplicated = sorted({name for name in names if names.count(name) > 1})
    if duplicated:
        raise CsvParseError(
            "'{}' repeats the column names {}".format(path, duplicated), row=1
        )
    if frame.shape[0] == 1:
        raise EmptyInputError("'{}' holds a header but no observations".format(path))

    cells = frame.iloc[1:].apply(lambda column: column.str.strip())
    for j, name in enumerate(names):
        numeric = pd.to_numeric(cells.iloc[:, j], errors="coerce")
        bad = ~np.isfinite(numeric.to_numpy(dtype=float))
        if bad.any():
            row = int(np.argmax(bad))
            # row 1 is the header
            raise CsvParseError(
                "'{}' row {} column '{}': '{}' is not a finite number".format(
                    path, row + 2, name, cells.iloc[row, j]
                ),
                row=row + 2,
                column=name,
            )
    values = cells.to_numpy(dtype=object).astype(float)
    log.debug("Loaded {} observations of {} components".format(*values.shape))
    return TimeSeries(values, names)


def format_csv(ts):
    frame = pd.DataFrame(np.asarray(ts.values), columns=ts.names)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def save_csv(ts, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(ts))


def preprocess_logdiff(ts):
    """Log returns: row t of the result is log(row t+1) - log(row t)."""
    values = ts.values
    if np.any(values <= 0):
        row, column = np.argwhere(values <= 0)[0]
        raise NonPositiveValueError(
            "Log returns need positive values, component '{}' has {} at row {}".format(
                ts.names[column], values[row, column], row
            )
        )
    if ts.n < 2:
        raise SeriesTooShortError("Log returns need at least 2 observations")
    return TimeSeries(np.diff(np.log(values), axis=0), ts.names)


def price_intervention_value(value, previous_price):
    """
    Maps do(P_{t-s} = value) on a price series onto its log-return series,
    given the observed price one step earlier.
    """
    if value <= 0 or previous_price <= 0:
        raise NonPositiveValueError(
            "Prices must be positive, got {} and {}".format(value, previous_price)
        )
    return float(np.log(value) - np.log(previous_price))
