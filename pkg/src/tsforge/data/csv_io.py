"""Long-form CSV ingestion: sample_id,label,channel,t,value"""

import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..errors import DataError
from .types import SequenceBatch

logger = logging.getLogger(__name__)

COLUMNS = ["sample_id", "label", "channel", "t", "value"]


def _row_list(rows: np.ndarray, limit: int = 5) -> str:
    shown = ", ".join(str(r) for r in rows[:limit])
    return shown + (", ..." if len(rows) > limit else "")


def _first_undecodable_row(path: Path) -> int:
    """1-based file row of the first line that is not valid UTF-8"""
    for number, line in enumerate(path.read_bytes().splitlines(), start=1):
        try:
            line.decode("utf-8")
        except UnicodeDecodeError:
            return number
    return 0


def _parse_column(frame: pd.DataFrame, column: str, rows: np.ndarray, path: Path,
                  integral: bool) -> np.ndarray:
    parsed = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(parsed)
    if bad.any():
        raise DataError(f"{path}: non-numeric {column} at rows {_row_list(rows[bad])}")
    if integral:
        fractional = parsed != np.floor(parsed)
        if fractional.any():
            raise DataError(f"{path}: non-integer {column} at rows {_row_list(rows[fractional])}")
        return parsed.astype(np.int64)
    # float() is exact for the 17-digit values written by save_csv
    return np.array([float(v) for v in frame[column]], dtype=np.float64)


def load_csv(path: Union[str, Path]) -> SequenceBatch:
    """
    Load sequences from a long-form CSV.

    Sequences keep the order in which their sample ids first appear;
    channels are ordered by channel id. Every (sample, channel) pair must
    carry timesteps 0..W-1 exactly once, with the same W and channel set for
    all samples.

    Raises:
        DataError: empty file, malformed rows, invalid UTF-8, missing
            columns, bad cells, ragged or incomplete sequences (messages
            carry 1-based file row numbers)
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path}: file is empty") from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        where = f"row {match.group(1)}" if match else "unknown row"
        raise DataError(f"{path}: malformed {where}: {e}") from e
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: invalid UTF-8 at row {_first_undecodable_row(path)}") from e

    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    if frame.empty:
        raise DataError(f"{path}: no data rows")

    # header is file row 1
    rows = np.arange(len(frame)) + 2
    sample_id = _parse_column(frame, "sample_id", rows, path, integral=True)
    channel = _parse_column(frame, "channel", rows, path, integral=True)
    t = _parse_column(frame, "t", rows, path, integral=True)
    value = _parse_column(frame, "value", rows, path, integral=False)

    label_text = frame["label"].str.strip()
    unlabeled = (label_text == "").to_numpy()
    if unlabeled.any() and not unlabeled.all():
        raise DataError(f"{path}: missing label at rows {_row_list(rows[unlabeled])}")
    labels = None if unlabeled.all() else _parse_column(frame, "label", rows, path, integral=True)

    long = pd.DataFrame({"sample_id": sample_id, "channel": channel, "t": t, "row": rows})
    dup = long.duplicated(["sample_id", "channel", "t"]).to_numpy()
    if dup.any():
        raise DataError(f"{path}: duplicate (sample_id, channel, t) at rows {_row_list(rows[dup])}")
    if (t < 0).any():
        raise DataError(f"{path}: negative t at rows {_row_list(rows[t < 0])}")

    sample_order = pd.unique(sample_id)
    channel_ids = np.sort(pd.unique(channel))
    first_row = long.groupby("sample_id")["row"].min()

    channels_per_sample = long.groupby("sample_id")["channel"].nunique()
    short = channels_per_sample[channels_per_sample != len(channel_ids)]
    if len(short):
        sid = short.index[0]
        raise DataError(
            f"{path}: sample {sid} (row {first_row[sid]}) has {short.iloc[0]} of "
            f"{len(channel_ids)} channels"
        )

    stats = long.groupby(["sample_id", "channel"])["t"].agg(["count", "min", "max"])
    seq_len = int(stats["count"].iloc[0])
    ragged = stats[(stats["count"] != seq_len) | (stats["min"] != 0) | (stats["max"] != seq_len - 1)]
    if len(ragged):
        sid, ch = ragged.index[0]
        raise DataError(
            f"{path}: sample {sid} channel {ch} (row {first_row[sid]}) has "
            f"{ragged['count'].iloc[0]} timesteps, expected 0..{seq_len - 1}"
        )

    sample_index = pd.Series(np.arange(len(sample_order)), index=sample_order)
    channel_index = pd.Series(np.arange(len(channel_ids)), index=channel_ids)
    s_idx = sample_index.loc[sample_id].to_numpy()
    c_idx = channel_index.loc[channel].to_numpy()

    data = np.empty((len(sample_order), len(channel_ids), seq_len))
    data[s_idx, c_idx, t] = value

    batch_labels: Optional[np.ndarray] = None
    if labels is not None:
        per_sample = pd.DataFrame({"sample_id": sample_id, "label": labels})
        conflicting = per_sample.groupby("sample_id")["label"].nunique()
        conflicting = conflicting[conflicting > 1]
        if len(conflicting):
            sid = conflicting.index[0]
            raise DataError(f"{path}: sample {sid} (row {first_row[sid]}) has conflicting labels")
        batch_labels = per_sample.groupby("sample_id")["label"].first().loc[sample_order].to_numpy()

    logger.info(
        f"Loaded {len(sample_order)} sequences ({len(channel_ids)} channels x {seq_len} steps) from {path}"
    )
    return SequenceBatch(data[:, :, None, :], batch_labels, source=str(path))


def save_csv(batch: SequenceBatch, path: Union[str, Path], label: Optional[int] = None) -> None:
    """
    Write a batch in the long-form schema.

    ``label`` fills the label column when the batch carries none; with
    neither, the column is left blank.
    """
    n, channels, _, seq_len = batch.shape
    if batch.labels is not None:
        labels = np.repeat(batch.labels, channels * seq_len)
    elif label is not None:
        labels = np.full(n * channels * seq_len, int(label), dtype=np.int64)
    else:
        labels = np.full(n * channels * seq_len, "", dtype=object)

    frame = pd.DataFrame({
        "sample_id": np.repeat(np.arange(n), channels * seq_len),
        "label": labels,
        "channel": np.tile(np.repeat(np.arange(channels), seq_len), n),
        "t": np.tile(np.arange(seq_len), n * channels),
        "value": batch.sequences().reshape(-1),
    })
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.debug(f"Wrote {n} sequences to {path}")
