#!/usr/bin/env python3
"""Download the non-constructible benchmark datasets into ./data.

Needs outbound network access.  The book graphs (anna, david, huck) come from
the COLOR dataset mirror; the citation graphs (cora, citeseer, pubmed) from
the LINQS archives, converted to plain 0-based edge lists.  Already-present
files are kept.
"""

import gzip
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

COLOR_BASE = "https://mat.tepper.cmu.edu/COLOR/instances"
BOOK_GRAPHS = ("anna", "david", "huck")

LINQS = {
    "cora": "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
    "citeseer": "https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz",
    "pubmed": "https://linqs-data.soe.ucsc.edu/public/Pubmed-Diabetes.tgz",
}


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def fetch_book_graphs(out: Path) -> None:
    for name in BOOK_GRAPHS:
        target = out / f"{name}.col"
        if target.exists():
            print(f"{target} already present")
            continue
        blob = fetch(f"{COLOR_BASE}/{name}.col.gz")
        target.write_bytes(gzip.decompress(blob))
        print(f"wrote {target}")


def _cites_to_edge_list(cites_text: str) -> str:
    """Map arbitrary node labels to dense 0-based ids, one edge per line."""
    ids = {}
    lines = []
    seen = set()
    for raw in cites_text.splitlines():
        parts = raw.split()
        if len(parts) < 2:
            continue
        a = ids.setdefault(parts[0], len(ids))
        b = ids.setdefault(parts[1], len(ids))
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{key[0]} {key[1]}")
    return "\n".join(lines) + "\n"


def fetch_citation_graphs(out: Path) -> None:
    for name, url in LINQS.items():
        target = out / f"{name}.edges"
        if target.exists():
            print(f"{target} already present")
            continue
        blob = fetch(url)
        with tarfile.open(fileobj=io.BytesIO(blob)) as tar:
            member = next(m for m in tar.getmembers()
                          if m.name.endswith(".cites") or "DIRECTED" in m.name)
            text = tar.extractfile(member).read().decode("utf-8", "replace")
        if "Pubmed" in url:
            # Pubmed-Diabetes cites format carries a two-line header and
            # 'paper:<id>' tokens
            rows = []
            for raw in text.splitlines()[2:]:
                parts = raw.split()
                if len(parts) >= 4:
                    rows.append(f"{parts[1].split(':')[-1]} {parts[3].split(':')[-1]}")
            text = "\n".join(rows)
        target.write_text(_cites_to_edge_list(text))
        print(f"wrote {target}")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    out.mkdir(parents=True, exist_ok=True)
    try:
        fetch_book_graphs(out)
        fetch_citation_graphs(out)
    except OSError as exc:
        print(f"download failed ({exc}); this environment may have no network "
              f"access", file=sys.stderr)
        sys.exit(1)
