import asyncio
import csv
import io
import json
import os

import numpy as np
import pytest

from app.exceptions import SequenceFormatError
from app.models import ValuationSequence
from app.models.trace import PHASE_REVENUE, TRACE_COLUMNS
from app.schemas.simulation import GftMaxConfig
from app.services.gftmax_service import GftMaxService
from app.services.storage_service import CURVE_COLUMNS, StorageService


def test_float_format_round_trips():
    assert StorageService.fmt(0.1) == "0.10000000000000001"
    assert StorageService.fmt(0.5) == "0.5"
    for x in (1 / 3, 2 / 7, 1e-300):
        assert float(StorageService.fmt(x)) == x


def test_parse_sequence_csv():
    seq = StorageService.parse_sequence_csv("s,b\n0.1,0.9\n\n0.5, 0.25\n")
    assert seq.as_pairs() == [(0.1, 0.9), (0.5, 0.25)]


@pytest.mark.parametrize("text", [
    "",
    "b,s\n0.1,0.2\n",
    "s,b\n0.1\n",
    "s,b\n0.1,abc\n",
    "s,b\n0.1,1.5\n",
    "s,b\n-0.1,0.5\n",
])
def test_malformed_sequences(text):
    with pytest.raises(SequenceFormatError):
        StorageService.parse_sequence_csv(text)


def test_row_limit():
    with pytest.raises(SequenceFormatError):
        StorageService.parse_sequence_csv("s,b\n0.1,0.2\n0.3,0.4\n0.5,0.6\n", max_rows=2)


def test_sequence_file_round_trip(tmp_path, rng):
    seq = ValuationSequence(rng.random(25), rng.random(25))
    path = StorageService.save_sequence(seq, str(tmp_path / "nested" / "seq.csv"))
    loaded = StorageService.load_sequence(path)
    assert np.array_equal(loaded.s, seq.s) and np.array_equal(loaded.b, seq.b)


def test_missing_sequence_file(tmp_path):
    with pytest.raises(SequenceFormatError):
        StorageService.load_sequence(str(tmp_path / "absent.csv"))


def test_trace_csv(tmp_path):
    seq = ValuationSequence.from_pairs([(0.0, 1.0)] * 8)
    trace, summary = GftMaxService.simulate(GftMaxConfig.preset("full", 8, seed=0), seq)
    path = StorageService.save_trace(trace, str(tmp_path / "trace.csv"))
    with open(path) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) == 9
    assert rows[1][0] == "1"
    assert float(rows[-1][-1]) == trace.budget_final
    phases = [row[1] for row in rows[1:]]
    assert set(phases) <= {"I", "II"}
    assert phases[0] == "I"
    assert phases == ["I" if code == PHASE_REVENUE else "II" for code in trace.phase.tolist()]

    summary_path = StorageService.save_json(summary, str(tmp_path / "summary.json"))
    with open(summary_path) as f:
        assert json.load(f)["T"] == 8


def test_curve_csv():
    class Row:
        T, mean_regret, std_regret, mean_budget = 64, 1.5, 0.25, 3.0

    rows = list(csv.reader(io.StringIO(StorageService.curve_to_csv([Row()]))))
    assert tuple(rows[0]) == CURVE_COLUMNS
    assert rows[1] == ["64", "1.5", "0.25", "3"]


def test_upload_helpers(storage):
    path = StorageService.upload_path("../../evil.csv")
    assert os.path.dirname(path) == os.path.join(str(storage), "sequences")
    assert path.endswith("_evil.csv")

    written = asyncio.run(StorageService.save_upload_file(b"s,b\n0,1\n", path))
    assert written == 8
    assert asyncio.run(StorageService.read_file(path)) == b"s,b\n0,1\n"
    assert StorageService.delete_file(path)
    assert not StorageService.delete_file(path)
