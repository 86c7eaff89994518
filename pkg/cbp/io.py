"""
CSV, binary and JSON formats of paths, solutions, reports and run manifests.

Every CSV starts with the comment line "# cbp-schema: <version>", floats are
written with 17 significant digits so that a file is a pure function of the
arrays. The formats are documented in docs/formats.rst.
"""
import csv
import hashlib
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from cbp import SCHEMA_VERSION
from cbp.exceptions import DataError
from cbp.lpp import LppValue
from cbp.model import PathBundle, TimeGrid
from cbp.solver import ParticleSolution, ResidualReport

log = logging.getLogger(__name__)

SCHEMA_LINE = '# cbp-schema: {}'.format(SCHEMA_VERSION)
BINARY_DTYPE = np.dtype('<f8')


def fmt(value: Any) -> str:
    """Text of a CSV cell

    >>> fmt(0.1), fmt(None), fmt(3)
    ('0.10000000000000001', '', '3')
    """
    if isinstance(value, (float, np.floating)):
        return '{:.17g}'.format(float(value))
    if value is None:
        return ''
    return str(value)


def write_rows_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
                   comments: Sequence[str] = ()) -> None:
    with open(path, 'w', newline='') as f:
        f.write(SCHEMA_LINE + '\n')
        for comment in comments:
            f.write('# {}\n'.format(comment))
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def read_rows_csv(path: str) -> Tuple[Dict[str, str], List[str], List[List[str]]]:
    """(comment key/values, header, rows) of a file written by write_rows_csv"""
    comments = {}  # type: Dict[str, str]
    with open(path, newline='') as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != SCHEMA_LINE:
        raise DataError("{}: expected the header line {!r}".format(path, SCHEMA_LINE))
    body = []
    for line in lines[1:]:
        if line.startswith('#'):
            for item in line[1:].split():
                key, _, value = item.partition('=')
                comments[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise DataError("{}: no header row".format(path))
    return comments, rows[0], rows[1:]


# --- path bundles

def write_bundle_csv(bundle: PathBundle, path: str) -> None:
    """Columns time, b1..bN"""
    header = ['time'] + ['b{}'.format(j) for j in range(1, bundle.count + 1)]
    comments = ['kind={} seed={}'.format(bundle.kind, '' if bundle.seed is None else bundle.seed)]
    write_rows_csv(path, header, np.column_stack((bundle.times, bundle.values.T)), comments)


def read_bundle_csv(path: str) -> PathBundle:
    comments, header, rows = read_rows_csv(path)
    if not header or header[0] != 'time':
        raise DataError("{}: the first column must be 'time'".format(path))
    try:
        table = np.array([[float(x) for x in row] for row in rows])
    except ValueError as exc:
        raise DataError("{}: {}".format(path, exc))
    if table.ndim != 2 or table.shape[1] != len(header):
        raise DataError("{}: ragged table".format(path))
    seed = comments.get('seed')
    return PathBundle(TimeGrid(table[:, 0]), table[:, 1:].T, comments.get('kind', 'deterministic'),
                      int(seed) if seed else None)


def write_bundle_binary(bundle: PathBundle, path: str) -> None:
    """Little-endian float64 values, row-major, N x (n+1); the grid is stored separately"""
    with open(path, 'wb') as f:
        f.write(bundle.values.astype(BINARY_DTYPE).tobytes(order='C'))


def read_bundle_binary(path: str, grid: TimeGrid, kind: str = 'driven', seed: Optional[int] = None) -> PathBundle:
    data = np.fromfile(path, dtype=BINARY_DTYPE)
    width = len(grid.times)
    if data.size % width:
        raise DataError("{}: {} values do not fill rows of {} grid times".format(path, data.size, width))
    return PathBundle(grid, data.reshape(-1, width).astype(float), kind, seed)


# --- solutions and reports

def write_solution_csv(sol: ParticleSolution, path: str) -> None:
    """Columns time, x1..xN, l12..l{N-1}{N}"""
    header = (['time'] + ['x{}'.format(j) for j in range(1, sol.N + 1)] +
              ['l{}{}'.format(j, j + 1) for j in range(1, sol.N)])
    table = np.column_stack((sol.grid.times, sol.X.T, sol.L.T))
    write_rows_csv(path, header, table, ['p={}'.format(sol.params.p)])


def report_dict(report: ResidualReport) -> Dict[str, Any]:
    out = report.as_dict()
    out['schema'] = SCHEMA_VERSION
    return out


def write_json(data: Dict[str, Any], path: str) -> None:
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=_json_default)
        f.write('\n')


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("not serializable: {!r}".format(type(value)))


def write_report_json(report: ResidualReport, path: str) -> None:
    write_json(report_dict(report), path)


LPP_HEADER = ['seed', 'kind', 'i', 'M', 'u', 'v', 'value', 'argchain']


def lpp_row(value: LppValue, seed: Optional[int] = None) -> List[Any]:
    return [seed, value.kind, value.i, value.M, value.window[0], value.window[1], value.value,
            ' '.join(fmt(t) for t in value.argchain)]


def write_lpp_csv(values: Iterable[Tuple[Optional[int], LppValue]], path: str) -> None:
    write_rows_csv(path, LPP_HEADER, (lpp_row(value, seed) for seed, value in values))


# --- manifests

def blob_hash(data: bytes) -> str:
    """The git object id of a blob with the given content"""
    return hashlib.sha1(b'blob %d\0' % len(data) + data).hexdigest()


def content_hash(paths: Iterable[str]) -> Tuple[str, Dict[str, str]]:
    """(combined hash, per-file blob hashes) of output files, by base name"""
    files = {}
    for path in paths:
        with open(path, 'rb') as f:
            files[os.path.basename(path)] = blob_hash(f.read())
    listing = ''.join('{} {}\n'.format(digest, name) for name, digest in sorted(files.items()))
    return blob_hash(listing.encode()), files
