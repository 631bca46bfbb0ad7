import json

import numpy as np
import pandas as pd

from pysteklov.geometry.mesh import polar_mesh
from pysteklov.tools import io as steklov_io
from pysteklov.verify.checks import REPORT_COLUMNS, inequality, limit


def _records():
    where = {"domain": "b", "beta": "1", "h": 0.1}
    return [
        inequality("rough_bound", 0.2, 0.5, 1e-6, where),
        limit("ball_closed_form", 0.3, 0.29, 0.034, 0.02, where),
        inequality("rough_bound", 0.2, 0.5, 1e-6, {**where, "domain": "a"}),
    ]


def test_atomic_write_creates_parents(tmp_path):
    path = steklov_io.atomic_write(tmp_path / "a" / "b" / "c.txt", "hello\n")
    assert path.read_text() == "hello\n"
    steklov_io.atomic_write(path, b"bytes")
    assert path.read_bytes() == b"bytes"
    assert [p.name for p in path.parent.iterdir()] == ["c.txt"]


def test_mesh_file(tmp_path, shell):
    mesh = polar_mesh(shell, 4, 16)
    path = steklov_io.write_mesh_file(mesh, tmp_path / "shell.mesh")
    again = steklov_io.read_mesh_file(path, domain=shell)
    assert np.array_equal(again.vertices, mesh.vertices)
    assert again.domain is shell


def test_csv_float_format():
    text = steklov_io.frame_to_csv(pd.DataFrame({"x": [1.0 / 3.0], "n": [4]}))
    assert text == "x,n\n0.3333333333,4\n"


def test_report_ordering_and_formats(tmp_path):
    written = steklov_io.write_report(_records(), tmp_path, ["csv", "json"], REPORT_COLUMNS)
    assert [p.name for p in written] == ["report.csv", "report.json"]
    frame = pd.read_csv(tmp_path / "report.csv")
    assert list(frame.columns) == REPORT_COLUMNS
    assert list(zip(frame["check"], frame["domain"])) == [("ball_closed_form", "b"), ("rough_bound", "a"),
                                                           ("rough_bound", "b")]
    assert list(frame["verdict"]) == ["fail", "pass", "pass"]
    document = json.loads((tmp_path / "report.json").read_text())
    assert document["summary"] == {"total": 3, "failed": 1}


def test_report_is_deterministic(tmp_path):
    steklov_io.write_report(_records(), tmp_path / "one", ["csv"], REPORT_COLUMNS)
    steklov_io.write_report(list(reversed(_records())), tmp_path / "two", ["csv"], REPORT_COLUMNS)
    assert (tmp_path / "one" / "report.csv").read_bytes() == (tmp_path / "two" / "report.csv").read_bytes()


def test_json_handles_numpy_and_nan():
    text = steklov_io.dump_json({"a": np.float64(np.nan), "b": np.arange(2), "c": np.bool_(True)})
    assert json.loads(text) == {"a": None, "b": [0, 1], "c": True}
