"""Benchmark file ingestion and result serialization.

Supported inputs: DIMACS .col (the COLOR dataset), a TSPLIB subset (GEO node
coordinates or explicit FULL_MATRIX / LOWER_DIAG_ROW weights), and plain
whitespace edge lists (citation graphs).  Parse errors carry line numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParseError
from .model import Graph, TspInstance

RESULTS_SCHEMA = "multising-results-v1"
RESULT_COLUMNS = ("instance", "method", "run_id", "seed", "sweeps",
                  "best_energy", "wrong_edges", "error_rate", "wall_time_s")


@dataclass(frozen=True)
class ResultRecord:
    instance: str
    method: str
    run_id: int
    seed: int
    sweeps: int
    best_energy: float
    wrong_edges: int
    error_rate: float
    wall_time_s: float


def parse_dimacs_col(text: str) -> Graph:
    """DIMACS .col: 'c' comments, one 'p edge N M' line, 'e u v' 1-based edges."""
    num_nodes = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if num_nodes is not None:
                raise ParseError(f"line {lineno}: duplicate problem line")
            if len(parts) < 4:
                raise ParseError(f"line {lineno}: malformed problem line")
            try:
                num_nodes = int(parts[2])
                int(parts[3])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: non-integer problem counts") from exc
        elif parts[0] == "e":
            if num_nodes is None:
                raise ParseError(f"line {lineno}: edge before problem line")
            if len(parts) < 3:
                raise ParseError(f"line {lineno}: malformed edge line")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: non-integer node ids") from exc
            if u == v:
                raise ParseError(f"line {lineno}: self-loop on node {u}")
            if not (1 <= u <= num_nodes and 1 <= v <= num_nodes):
                raise ParseError(f"line {lineno}: node id out of range")
            edges.append((u - 1, v - 1))
        else:
            warnings.warn(f"line {lineno}: skipping unknown line type {parts[0]!r}")
    if num_nodes is None:
        raise ParseError("missing problem line")
    return Graph.from_edges(num_nodes, edges)


def parse_edge_list(text: str, base: str | int = "auto") -> Graph:
    """Whitespace 'u v' pairs; ids rebased to 0 (1-based inferred when no 0
    appears, unless ``base`` pins it)."""
    pairs = []
    max_id = -1
    min_id = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-integer node ids") from exc
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative node id")
        pairs.append((u, v))
        max_id = max(max_id, u, v)
        min_id = min(min_id, u, v) if min_id is not None else min(u, v)
    if not pairs:
        raise ParseError("empty edge list")
    if base == "auto":
        shift = 0 if min_id == 0 else 1
    else:
        shift = int(base)
    num_nodes = max_id + 1 - shift
    return Graph.from_edges(num_nodes, [(u - shift, v - shift) for u, v in pairs])


# --- TSPLIB subset ---------------------------------------------------------

_EARTH_RADIUS = 6378.388
_TSPLIB_PI = 3.141592


def _geo_radians(coord: float) -> float:
    # degrees truncate toward zero; this convention reproduces the published
    # optimal tour lengths (burma14 = 3323)
    deg = float(int(coord))
    minutes = coord - deg
    return _TSPLIB_PI * (deg + 5.0 * minutes / 3.0) / 180.0


def geo_distance_matrix(coords: np.ndarray) -> np.ndarray:
    """Integer geographic distances per the TSPLIB GEO definition."""
    n = coords.shape[0]
    lat = np.array([_geo_radians(c) for c in coords[:, 0]])
    lon = np.array([_geo_radians(c) for c in coords[:, 1]])
    dist = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            q1 = math.cos(lon[i] - lon[j])
            q2 = math.cos(lat[i] - lat[j])
            q3 = math.cos(lat[i] + lat[j])
            d = int(_EARTH_RADIUS *
                    math.acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0)
            dist[i, j] = dist[j, i] = d
    return dist


def _parse_tsplib_sections(text: str):
    header = {}
    lines = text.splitlines()
    i = 0
    sections = {}
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line == "EOF":
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = value.strip()
            continue
        token = line.split()[0].upper()
        if token in ("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION", "DISPLAY_DATA_SECTION"):
            body = []
            while i < len(lines):
                nxt = lines[i].strip()
                if not nxt or nxt == "EOF" or (nxt and not _is_numeric_row(nxt)):
                    break
                body.append(nxt)
                i += 1
            sections[token] = body
        else:
            warnings.warn(f"skipping unknown TSPLIB line {line!r}")
    return header, sections


def _is_numeric_row(line: str) -> bool:
    try:
        for tok in line.split():
            float(tok)
        return True
    except ValueError:
        return False


def tsplib_distance_matrix(text: str) -> np.ndarray:
    """Raw integer/real distances before normalization."""
    header, sections = _parse_tsplib_sections(text)
    try:
        dim = int(header["DIMENSION"])
    except KeyError as exc:
        raise ParseError("missing DIMENSION") from exc
    wtype = header.get("EDGE_WEIGHT_TYPE", "").upper()
    if wtype == "GEO":
        rows = sections.get("NODE_COORD_SECTION")
        if not rows:
            raise ParseError("GEO instance without NODE_COORD_SECTION")
        coords = np.zeros((dim, 2))
        for row in rows:
            parts = row.split()
            idx = int(parts[0]) - 1
            if not (0 <= idx < dim):
                raise ParseError(f"coordinate index {idx + 1} out of range")
            coords[idx] = (float(parts[1]), float(parts[2]))
        if len(rows) != dim:
            raise ParseError(f"expected {dim} coordinates, got {len(rows)}")
        return geo_distance_matrix(coords)
    if wtype == "EXPLICIT":
        fmt = header.get("EDGE_WEIGHT_FORMAT", "").upper()
        rows = sections.get("EDGE_WEIGHT_SECTION")
        if not rows:
            raise ParseError("EXPLICIT instance without EDGE_WEIGHT_SECTION")
        values = [float(tok) for row in rows for tok in row.split()]
        if fmt == "FULL_MATRIX":
            if len(values) != dim * dim:
                raise ParseError(f"expected {dim * dim} weights, got {len(values)}")
            mat = np.array(values).reshape(dim, dim)
            if not np.allclose(mat, mat.T):
                raise ParseError("full matrix is not symmetric")
            return mat
        if fmt == "LOWER_DIAG_ROW":
            need = dim * (dim + 1) // 2
            if len(values) != need:
                raise ParseError(f"expected {need} weights, got {len(values)}")
            mat = np.zeros((dim, dim))
            it = iter(values)
            for i in range(dim):
                for j in range(i + 1):
                    mat[i, j] = mat[j, i] = next(it)
            return mat
        raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {fmt!r}")
    raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {wtype!r}")


def parse_tsplib(text: str) -> TspInstance:
    """Parse and normalize by the maximum distance (max entry becomes 1)."""
    header, _ = _parse_tsplib_sections(text)
    name = header.get("NAME", "")
    return TspInstance.from_matrix(tsplib_distance_matrix(text), name=name)


def tsp_subinstance(matrix: np.ndarray, k: int, name: str = "") -> TspInstance:
    """First k x k block of a raw distance matrix, renormalized."""
    if not (2 <= k <= matrix.shape[0]):
        raise ValueError(f"cannot take a {k}-city block of {matrix.shape[0]} cities")
    return TspInstance.from_matrix(matrix[:k, :k], name=name)


# --- results ---------------------------------------------------------------

def results_to_csv(records: list[ResultRecord]) -> str:
    if not records:
        raise ValueError("no records to write")
    buf = io.StringIO()
    buf.write(f"# schema={RESULTS_SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for rec in records:
        d = asdict(rec)
        writer.writerow([d[c] for c in RESULT_COLUMNS])
    return buf.getvalue()


def results_to_json(records: list[ResultRecord]) -> str:
    if not records:
        raise ValueError("no records to write")
    return json.dumps({"schema": RESULTS_SCHEMA,
                       "records": [asdict(r) for r in records]}, indent=2)


def write_results(records: list[ResultRecord], csv_path, json_path) -> None:
    """CSV and JSON mirrors with a schema version header and stable columns."""
    with open(csv_path, "w") as fh:
        fh.write(results_to_csv(records))
    with open(json_path, "w") as fh:
        fh.write(results_to_json(records))


def read_results_csv(text: str) -> list[ResultRecord]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    out = []
    for row in reader:
        out.append(ResultRecord(
            instance=row["instance"], method=row["method"],
            run_id=int(row["run_id"]), seed=int(row["seed"]),
            sweeps=int(row["sweeps"]), best_energy=float(row["best_energy"]),
            wrong_edges=int(row["wrong_edges"]),
            error_rate=float(row["error_rate"]),
            wall_time_s=float(row["wall_time_s"])))
    return out


# --- internal graph dump ---------------------------------------------------

def serialize_graph(graph: Graph) -> str:
    lines = [f"g {graph.num_nodes} {graph.num_edges}"]
    for (u, v), w in zip(graph.edges, graph.edge_weights):
        lines.append(f"e {u} {v} {float(w)!r}")
    return "\n".join(lines) + "\n"


def parse_graph_dump(text: str) -> Graph:
    num_nodes = None
    edges = []
    weights = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "g":
            num_nodes = int(parts[1])
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
            weights.append(float(parts[3]))
        else:
            raise ParseError(f"line {lineno}: unknown record {parts[0]!r}")
    if num_nodes is None:
        raise ParseError("missing graph header")
    return Graph.from_edges(num_nodes, edges, weights)
