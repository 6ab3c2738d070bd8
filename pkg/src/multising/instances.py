"""Benchmark instance construction and catalog.

The mycielN and queenN_N families from the COLOR dataset are deterministic
constructions, so we can rebuild them exactly (node/edge counts match the
published files).  Book graphs (anna, david, huck) and the citation graphs
must be fetched separately; scripts/fetch_datasets.py downloads them when
network access is available.  burma14 ships inline as canonical TSPLIB text.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .model import ColoringInstance, Graph


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    nodes: int
    edges: int
    q: int
    constructible: bool


# published (nodes, edges, colors) per benchmark instance
TABLE1 = {
    "anna": CatalogEntry("anna", 138, 493, 11, False),
    "david": CatalogEntry("david", 87, 406, 11, False),
    "huck": CatalogEntry("huck", 74, 301, 11, False),
    "myciel3": CatalogEntry("myciel3", 11, 20, 4, True),
    "myciel4": CatalogEntry("myciel4", 23, 71, 5, True),
    "myciel5": CatalogEntry("myciel5", 47, 236, 6, True),
    "myciel6": CatalogEntry("myciel6", 95, 755, 7, True),
    "myciel7": CatalogEntry("myciel7", 191, 2360, 8, True),
    "queen5_5": CatalogEntry("queen5_5", 25, 160, 5, True),
    "queen6_6": CatalogEntry("queen6_6", 36, 290, 7, True),
    "queen7_7": CatalogEntry("queen7_7", 49, 476, 7, True),
    "queen8_8": CatalogEntry("queen8_8", 64, 728, 9, True),
    "queen9_9": CatalogEntry("queen9_9", 81, 1056, 10, True),
    "queen8_12": CatalogEntry("queen8_12", 96, 1368, 12, True),
    "queen11_11": CatalogEntry("queen11_11", 121, 1980, 11, True),
    "queen13_13": CatalogEntry("queen13_13", 169, 3328, 13, True),
}

CITATION = {
    "cora": CatalogEntry("cora", 2708, 5278, 5, False),
    "citeseer": CatalogEntry("citeseer", 3279, 4552, 6, False),
    "pubmed": CatalogEntry("pubmed", 19717, 44324, 8, False),
}


def mycielski_graph(k: int) -> Graph:
    """Dataset graph mycielK: K-1 Mycielski steps applied to K2.

    Chromatic number is k+1; myciel3 is the 11-node Groetzsch graph.  Nodes
    double plus one and edges triple plus the old node count at each step.
    """
    if k < 2:
        raise ValueError("mycielski index starts at 2")
    n = 2
    edges = [(0, 1)]
    for _ in range(k - 1):
        m = len(edges)
        shadow = [(u, n + v) for u, v in edges] + [(v, n + u) for u, v in edges]
        apex = [(n + i, 2 * n) for i in range(n)]
        edges = edges + shadow + apex
        n = 2 * n + 1
    return Graph.from_edges(n, edges)


def queen_graph(rows: int, cols: int) -> Graph:
    """Queens on a rows x cols board; edges join squares a queen move apart."""
    edges = []
    for r1 in range(rows):
        for c1 in range(cols):
            a = r1 * cols + c1
            for r2 in range(rows):
                for c2 in range(cols):
                    b = r2 * cols + c2
                    if b <= a:
                        continue
                    if r1 == r2 or c1 == c2 or r1 - c1 == r2 - c2 or r1 + c1 == r2 + c2:
                        edges.append((a, b))
    return Graph.from_edges(rows * cols, edges)


def build_graph(name: str) -> Graph:
    """Construct a catalog instance (mycielN / queenR_C families only)."""
    if name.startswith("myciel"):
        return mycielski_graph(int(name[len("myciel"):]))
    if name.startswith("queen"):
        r, c = name[len("queen"):].split("_")
        return queen_graph(int(r), int(c))
    raise ValueError(f"{name} is not constructible; fetch the dataset file")


def build_instance(name: str, q: int | None = None) -> ColoringInstance:
    entry = TABLE1.get(name)
    if q is None:
        if entry is None:
            raise ValueError(f"unknown instance {name}; pass q explicitly")
        q = entry.q
    graph = build_graph(name)
    if entry is not None:
        if graph.num_nodes != entry.nodes or graph.num_edges != entry.edges:
            raise AssertionError(
                f"constructed {name} has {graph.num_nodes} nodes / "
                f"{graph.num_edges} edges, catalog says {entry.nodes}/{entry.edges}")
    return ColoringInstance(graph=graph, q=q, name=name)


def graph_to_dimacs(graph: Graph, name: str) -> str:
    lines = [f"c {name} (generated)", f"p edge {graph.num_nodes} {graph.num_edges}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


# Canonical TSPLIB burma14 (GEO coordinates in degrees.minutes).
BURMA14_TSP = """\
NAME: burma14
TYPE: TSP
COMMENT: 14-Staedte in Burma (Zaw Win)
DIMENSION: 14
EDGE_WEIGHT_TYPE: GEO
EDGE_WEIGHT_FORMAT: FUNCTION
DISPLAY_DATA_TYPE: COORD_DISPLAY
NODE_COORD_SECTION
   1  16.47       96.10
   2  16.47       94.44
   3  20.09       92.54
   4  22.39       93.37
   5  25.23       97.24
   6  22.00       96.05
   7  20.47       97.02
   8  17.20       96.29
   9  16.30       97.38
  10  14.05       98.12
  11  16.53       97.38
  12  21.52       95.59
  13  19.41       97.13
  14  20.09       94.55
EOF
"""


def write_instance_files(out_dir: str | Path) -> list[Path]:
    """Write every constructible .col file plus burma14.tsp into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in TABLE1.values():
        if not entry.constructible:
            continue
        path = out / f"{entry.name}.col"
        path.write_text(graph_to_dimacs(build_graph(entry.name), entry.name))
        written.append(path)
    tsp = out / "burma14.tsp"
    tsp.write_text(BURMA14_TSP)
    written.append(tsp)
    return written
