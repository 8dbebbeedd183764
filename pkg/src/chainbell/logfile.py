"""Line-oriented trial-log file format.

A log is a text file: a header block of ``# key: value`` lines followed by
one whitespace-separated record per line

    trial_index block_index a_index b_index outcome_a outcome_b heralded check_counts

with check_counts comma-joined ("-" when empty).  Angles never appear in
logs; they are reconstructed from (N, k, l).  The format is diffable,
appendable, and trivially streamed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .chain import ChainParams, Mode, TrialRecord, make_pair

FORMAT_VERSION = "chainbell-log/1"


class LogFormatError(ValueError):
    """Malformed log file; carries the offending line number when known."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass
class LogHeader:
    N: int
    mode: Mode = "correlation"
    blocks: int = 0
    block_size: int = 1
    analyzed_index: int = 1
    seed: int | None = None
    trials: int = 0

    def to_lines(self) -> list[str]:
        lines = [
            f"# format: {FORMAT_VERSION}",
            f"# N: {self.N}",
            f"# mode: {self.mode}",
            f"# blocks: {self.blocks}",
            f"# block_size: {self.block_size}",
            f"# analyzed_index: {self.analyzed_index}",
        ]
        if self.seed is not None:
            lines.append(f"# seed: {self.seed}")
        lines.append(f"# trials: {self.trials}")
        return lines


def write_log(path: str | Path, header: LogHeader, records: Sequence[TrialRecord]) -> None:
    header.trials = len(records)
    with open(path, "w") as fh:
        for line in header.to_lines():
            fh.write(line + "\n")
        for rec in records:
            counts = ",".join(str(c) for c in rec.check_counts) or "-"
            fh.write(
                f"{rec.trial_index} {rec.block_index} {rec.pair.a_index} "
                f"{rec.pair.b_index} {rec.outcome_a} {rec.outcome_b} "
                f"{int(rec.heralded)} {counts}\n"
            )


def read_log(path: str | Path) -> tuple[LogHeader, list[TrialRecord]]:
    meta: dict[str, str] = {}
    records: list[TrialRecord] = []
    params: ChainParams | None = None
    header: LogHeader | None = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is not None:
                    raise LogFormatError("header line after records", lineno)
                try:
                    key, value = line.lstrip("# ").split(":", 1)
                except ValueError:
                    raise LogFormatError(f"malformed header line {line!r}", lineno)
                meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = _build_header(meta)
                params = ChainParams(header.N)
            records.append(_parse_record(line, lineno, params))
    if header is None:
        header = _build_header(meta)
    if "trials" in meta and int(meta["trials"]) != len(records):
        raise LogFormatError(
            f"header declares {meta['trials']} trials but {len(records)} records found"
        )
    return header, records


def _build_header(meta: dict[str, str]) -> LogHeader:
    if meta.get("format") != FORMAT_VERSION:
        raise LogFormatError(
            f"unsupported or missing format header, expected {FORMAT_VERSION!r}"
        )
    if "N" not in meta:
        raise LogFormatError("header is missing N")
    mode = meta.get("mode", "correlation")
    if mode not in ("correlation", "anticorrelation"):
        raise LogFormatError(f"unknown mode {mode!r}")
    return LogHeader(
        N=int(meta["N"]),
        mode=mode,  # type: ignore[arg-type]
        blocks=int(meta.get("blocks", 0)),
        block_size=int(meta.get("block_size", 1)),
        analyzed_index=int(meta.get("analyzed_index", 1)),
        seed=int(meta["seed"]) if "seed" in meta else None,
        trials=int(meta.get("trials", 0)),
    )


def _parse_record(line: str, lineno: int, params: ChainParams) -> TrialRecord:
    fields = line.split()
    if len(fields) != 8:
        raise LogFormatError(f"expected 8 fields, got {len(fields)}", lineno)
    try:
        trial_index, block_index = int(fields[0]), int(fields[1])
        k, l = int(fields[2]), int(fields[3])
        heralded = bool(int(fields[6]))
        counts = (
            () if fields[7] == "-" else tuple(int(c) for c in fields[7].split(","))
        )
        return TrialRecord(
            trial_index=trial_index,
            block_index=block_index,
            pair=make_pair(params, k, l),
            outcome_a=fields[4],
            outcome_b=fields[5],
            heralded=heralded,
            check_counts=counts,
        )
    except ValueError as exc:
        raise LogFormatError(str(exc), lineno) from exc
