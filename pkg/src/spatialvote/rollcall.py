"""Roll-call vote matrices: parsing, validation, filtering, missingness summaries.

A vote matrix is stored as an (n, m) int8 array of cell codes, one row per
legislator and one column per motion. Files use a comma-separated layout with
a header row of motion ids and a leading legislator-id column; cell tokens are
``1`` (Yea), ``0`` (Nay) and ``NA`` (not voting, absent, or not yet seated).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

YEA = np.int8(1)
NAY = np.int8(0)
MISSING = np.int8(-1)

TOKEN_TO_CODE = {"1": YEA, "0": NAY, "NA": MISSING}
CODE_TO_TOKEN = {int(YEA): "1", int(NAY): "0", int(MISSING): "NA"}


class RollCallError(ValueError):
    """Base class for vote-matrix construction and parsing failures."""


class UnknownTokenError(RollCallError):
    pass


class DuplicateIdError(RollCallError):
    pass


class RaggedRowError(RollCallError):
    pass


class EmptyMatrixError(RollCallError):
    pass


@dataclass(frozen=True)
class LegislatorMeta:
    """Display metadata for one legislator row."""

    id: str
    name: str
    party: str
    bloc: str

    def __post_init__(self):
        for field_name in ("id", "name", "party", "bloc"):
            if not getattr(self, field_name):
                raise RollCallError(f"legislator meta field {field_name!r} is empty")


@dataclass
class VoteMatrix:
    """Validated roll-call matrix with row/column identifiers.

    Parameters
    ----------
    cells : (n, m) int8 array with entries in {YEA, NAY, MISSING}.
    legislator_ids : one unique id per row.
    motion_ids : one unique id per column.
    meta : optional legislator metadata; every meta id must match a row.
    """

    cells: np.ndarray
    legislator_ids: tuple
    motion_ids: tuple
    meta: tuple = None

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.ndim != 2:
            raise RollCallError(f"cells must be 2-d, got shape {cells.shape}")
        if cells.dtype != np.int8:
            cells = cells.astype(np.int8)
        valid = np.isin(cells, (YEA, NAY, MISSING))
        if not valid.all():
            bad = cells[~valid][0]
            raise RollCallError(f"cell code {bad} outside {{1, 0, -1}}")
        self.cells = cells
        self.legislator_ids = tuple(str(i) for i in self.legislator_ids)
        self.motion_ids = tuple(str(j) for j in self.motion_ids)
        n, m = cells.shape
        if n < 2:
            raise RollCallError(f"need at least 2 legislators, got {n}")
        if m < 1:
            raise RollCallError("need at least 1 motion")
        if len(self.legislator_ids) != n:
            raise RollCallError("legislator id count does not match row count")
        if len(self.motion_ids) != m:
            raise RollCallError("motion id count does not match column count")
        for ids, what in ((self.legislator_ids, "legislator"), (self.motion_ids, "motion")):
            if len(set(ids)) != len(ids):
                dupe = _first_duplicate(ids)
                raise DuplicateIdError(f"duplicate {what} id {dupe!r}")
        if not (cells != MISSING).any():
            raise RollCallError("matrix has no observed votes")
        if self.meta is not None:
            self.meta = tuple(self.meta)
            known = set(self.legislator_ids)
            for entry in self.meta:
                if entry.id not in known:
                    raise RollCallError(f"meta id {entry.id!r} matches no legislator row")
            if len({e.id for e in self.meta}) != len(self.meta):
                raise DuplicateIdError("duplicate id in legislator meta")

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def m(self) -> int:
        return self.cells.shape[1]

    @property
    def observed_mask(self) -> np.ndarray:
        return self.cells != MISSING

    def meta_by_id(self) -> dict:
        return {} if self.meta is None else {e.id: e for e in self.meta}


def _first_duplicate(ids):
    seen = set()
    for i in ids:
        if i in seen:
            return i
        seen.add(i)
    return None


def parse_vote_matrix(text: str, meta_text: str = None) -> VoteMatrix:
    """Parse the delimited vote-matrix format (and optional meta file text)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise EmptyMatrixError("vote file has no content")
    header = rows[0]
    if len(header) < 2:
        raise EmptyMatrixError("header has no motion columns")
    motion_ids = [h.strip() for h in header[1:]]
    data_rows = rows[1:]
    if not data_rows:
        raise EmptyMatrixError("vote file has a header but no legislator rows")
    n, m = len(data_rows), len(motion_ids)
    cells = np.empty((n, m), dtype=np.int8)
    legislator_ids = []
    for i, row in enumerate(data_rows):
        if len(row) != m + 1:
            raise RaggedRowError(
                f"row {i + 2} has {len(row)} fields, expected {m + 1}"
            )
        legislator_ids.append(row[0].strip())
        for j, tok in enumerate(row[1:]):
            code = TOKEN_TO_CODE.get(tok.strip())
            if code is None:
                raise UnknownTokenError(
                    f"unknown vote token {tok.strip()!r} at row {i + 2}, column {j + 2}"
                )
            cells[i, j] = code
    meta = parse_legislator_meta(meta_text) if meta_text is not None else None
    return VoteMatrix(cells, tuple(legislator_ids), tuple(motion_ids), meta)


def parse_legislator_meta(text: str) -> tuple:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise EmptyMatrixError("meta file has no content")
    header = [h.strip() for h in rows[0]]
    expected = ["id", "name", "party", "bloc"]
    if header != expected:
        raise RollCallError(f"meta header {header} != {expected}")
    out = []
    for i, row in enumerate(rows[1:]):
        if len(row) != 4:
            raise RaggedRowError(f"meta row {i + 2} has {len(row)} fields, expected 4")
        out.append(LegislatorMeta(*[f.strip() for f in row]))
    return tuple(out)


def serialize_vote_matrix(vm: VoteMatrix) -> str:
    """Inverse of parse_vote_matrix; round-trips bit-exactly."""
    lines = ["legislator_id," + ",".join(vm.motion_ids)]
    for i, lid in enumerate(vm.legislator_ids):
        toks = [CODE_TO_TOKEN[int(c)] for c in vm.cells[i]]
        lines.append(lid + "," + ",".join(toks))
    return "\n".join(lines) + "\n"


def serialize_legislator_meta(meta) -> str:
    lines = ["id,name,party,bloc"]
    for e in meta:
        lines.append(f"{e.id},{e.name},{e.party},{e.bloc}")
    return "\n".join(lines) + "\n"


class MissingRates(NamedTuple):
    per_legislator: np.ndarray
    per_motion: np.ndarray
    overall: float


def missing_rates(vm: VoteMatrix) -> MissingRates:
    """Missing-vote fractions by row, by column, and overall."""
    miss = vm.cells == MISSING
    return MissingRates(
        per_legislator=miss.mean(axis=1),
        per_motion=miss.mean(axis=0),
        overall=float(miss.mean()),
    )


def filter_low_participation(vm: VoteMatrix, threshold: float = 0.95):
    """Drop legislators whose observed-vote fraction falls below threshold.

    Returns the filtered matrix and the removed ids, preserving the original
    row order and leaving surviving cells untouched.
    """
    if not 0.0 <= threshold <= 1.0:
        raise RollCallError(f"participation threshold {threshold} outside [0, 1]")
    participation = (vm.cells != MISSING).mean(axis=1)
    keep = participation >= threshold
    removed = [lid for lid, k in zip(vm.legislator_ids, keep) if not k]
    if keep.sum() < 2:
        raise RollCallError(
            f"filtering at threshold {threshold} leaves {int(keep.sum())} legislators; need at least 2"
        )
    if keep.all():
        return vm, []
    kept_ids = tuple(lid for lid, k in zip(vm.legislator_ids, keep) if k)
    meta = None
    if vm.meta is not None:
        kept = set(kept_ids)
        meta = tuple(e for e in vm.meta if e.id in kept)
    out = VoteMatrix(vm.cells[keep], kept_ids, vm.motion_ids, meta)
    return out, removed


def drop_unanimous_motions(vm: VoteMatrix):
    """Drop motions whose observed votes are all Yea or all Nay.

    Motions with zero observed votes are dropped too (vacuously unanimous,
    carrying no information). Returns the reduced matrix and the dropped ids.
    """
    obs = vm.cells != MISSING
    n_obs = obs.sum(axis=0)
    n_yea = (vm.cells == YEA).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(n_obs > 0, n_yea / np.maximum(n_obs, 1), np.nan)
    unanimous = (n_obs == 0) | (frac == 0.0) | (frac == 1.0)
    dropped = [mid for mid, u in zip(vm.motion_ids, unanimous) if u]
    if not dropped:
        return vm, []
    keep = ~unanimous
    if keep.sum() < 1:
        raise RollCallError("dropping unanimous motions leaves no motions")
    kept_ids = tuple(mid for mid, k in zip(vm.motion_ids, keep) if k)
    out = VoteMatrix(vm.cells[:, keep], vm.legislator_ids, kept_ids, vm.meta)
    return out, dropped
