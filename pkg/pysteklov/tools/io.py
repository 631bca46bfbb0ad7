# coding=utf-8
"""
Reading and writing of mesh files and result reports
"""
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

from pysteklov.geometry.mesh import read_mesh, write_mesh

__license__ = "GPLv3"
__version__ = "0.1"
__status__ = "Production"

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.10g"


def atomic_write(path, data):
    """
    Write text or bytes to ``path`` through a temporary file in the same directory, then rename

    Parameters
    ----------
    path : str or Path
        destination, parent directories are created
    data : str or bytes
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info("wrote %s", path)
    return path


def write_mesh_file(mesh, path):
    return atomic_write(path, write_mesh(mesh))


def read_mesh_file(path, domain=None):
    return read_mesh(Path(path).read_text(), domain=domain)


def frame_to_csv(frame):
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_table(frame, path):
    """Write a DataFrame as CSV with a fixed float format."""
    return atomic_write(path, frame_to_csv(frame))


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dump_json(document):
    return json.dumps(_jsonable(document), indent=2, sort_keys=True) + "\n"


def sort_records(records):
    return sorted(records, key=lambda rec: (rec.name, rec.domain, rec.beta, rec.h))


def records_to_frame(records, columns):
    return pd.DataFrame([rec.row() for rec in sort_records(records)], columns=columns)


def write_report(records, directory, formats, columns, stem="report"):
    """
    Write check records as ``<stem>.csv`` and/or ``<stem>.json``, ordered by (check, domain, beta, h)

    Returns
    -------
    list of Path
    """
    directory = Path(directory)
    written = []
    ordered = sort_records(records)
    if "csv" in formats:
        written.append(write_table(records_to_frame(ordered, columns), directory / f"{stem}.csv"))
    if "json" in formats:
        document = {"records": [rec.to_dict() for rec in ordered],
                    "summary": {"total": len(ordered), "failed": sum(not rec.passed for rec in ordered)}}
        written.append(atomic_write(directory / f"{stem}.json", dump_json(document)))
    return written
