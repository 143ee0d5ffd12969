import csv
import io
import logging
import os
from typing import Iterable, Optional
from uuid import uuid4

import aiofiles
from pydantic import BaseModel

from app.config import settings
from app.exceptions import SequenceFormatError
from app.models import RunTrace, ValuationSequence
from app.models.trace import PHASE_LABELS, TRACE_COLUMNS

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("T", "mean_regret", "std_regret", "mean_budget")


class StorageService:
    """Reading and writing sequences, traces, curves and summaries"""

    @staticmethod
    def fmt(x: float) -> str:
        """Shortest-safe text form: FLOAT_DIGITS significant digits round-trip a double"""
        return format(float(x), f".{settings.FLOAT_DIGITS}g")

    @staticmethod
    def ensure_dir(path: str) -> str:
        os.makedirs(path, exist_ok=True)
        return path

    @staticmethod
    def _write_text(path: str, text: str) -> str:
        parent = os.path.dirname(path)
        if parent:
            StorageService.ensure_dir(parent)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
        return path

    # -- valuation sequences --------------------------------------------------------

    @staticmethod
    def parse_sequence_csv(text: str, max_rows: Optional[int] = None) -> ValuationSequence:
        """Parse an `s,b` CSV; every value must be a number in [0,1]"""
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["s", "b"]:
            raise SequenceFormatError(f"Expected header 's,b', got {header!r}")
        s, b = [], []
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise SequenceFormatError(f"Line {line}: expected 2 columns, got {len(row)}")
            try:
                sv, bv = float(row[0]), float(row[1])
            except ValueError:
                raise SequenceFormatError(f"Line {line}: not a number: {row!r}")
            if not (0.0 <= sv <= 1.0 and 0.0 <= bv <= 1.0):
                raise SequenceFormatError(f"Line {line}: valuations must lie in [0,1], got {row!r}")
            s.append(sv)
            b.append(bv)
            if max_rows is not None and len(s) > max_rows:
                raise SequenceFormatError(f"Sequence longer than {max_rows} rows")
        return ValuationSequence.from_arrays(s, b)

    @staticmethod
    def sequence_to_csv(seq: ValuationSequence) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("s", "b"))
        fmt = StorageService.fmt
        writer.writerows((fmt(s), fmt(b)) for s, b in zip(seq.s.tolist(), seq.b.tolist()))
        return out.getvalue()

    @staticmethod
    def load_sequence(path: str) -> ValuationSequence:
        try:
            with open(path, newline="", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise SequenceFormatError(f"Cannot read {path}: {e}") from e
        return StorageService.parse_sequence_csv(text)

    @staticmethod
    def save_sequence(seq: ValuationSequence, path: str) -> str:
        return StorageService._write_text(path, StorageService.sequence_to_csv(seq))

    # -- traces, curves, summaries ----------------------------------------------------

    @staticmethod
    def trace_to_csv(trace: RunTrace) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        fmt = StorageService.fmt
        cols = [trace.p, trace.q, trace.s, trace.b, trace.gft, trace.rev, trace.budget]
        for t, phase, *values in zip(trace.t.tolist(), trace.phase.tolist(), *(c.tolist() for c in cols)):
            writer.writerow([t, PHASE_LABELS[phase], *(fmt(v) for v in values)])
        return out.getvalue()

    @staticmethod
    def save_trace(trace: RunTrace, path: str) -> str:
        return StorageService._write_text(path, StorageService.trace_to_csv(trace))

    @staticmethod
    def curve_to_csv(rows: Iterable) -> str:
        """rows carry T, mean_regret, std_regret and mean_budget attributes"""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        fmt = StorageService.fmt
        for r in rows:
            writer.writerow([r.T, fmt(r.mean_regret), fmt(r.std_regret), fmt(r.mean_budget)])
        return out.getvalue()

    @staticmethod
    def save_curve(rows: Iterable, path: str) -> str:
        return StorageService._write_text(path, StorageService.curve_to_csv(rows))

    @staticmethod
    def save_json(model: BaseModel, path: str) -> str:
        return StorageService._write_text(path, model.model_dump_json(indent=2) + "\n")

    # -- uploads ----------------------------------------------------------------------

    @staticmethod
    def upload_path(filename: str) -> str:
        name = os.path.basename(filename or "sequence.csv")
        return os.path.join(StorageService.ensure_dir(settings.sequences_dir), f"{uuid4()}_{name}")

    @staticmethod
    async def save_upload_file(content: bytes, file_path: str) -> int:
        """Save uploaded file asynchronously"""
        async with aiofiles.open(file_path, "wb") as f:
            await f.write(content)
        return len(content)

    @staticmethod
    async def read_file(file_path: str) -> bytes:
        async with aiofiles.open(file_path, "rb") as f:
            return await f.read()

    @staticmethod
    def delete_file(file_path: str) -> bool:
        try:
            if os.path.exists(file_path):
                os.remove(file_path)
                return True
        except OSError as e:
            logger.warning("Error deleting file %s: %s", file_path, e)
        return False
