from pathlib import Path

import pytest

from multising.instances import write_instance_files

REPO_DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    """Constructible benchmark files (.col + burma14.tsp) for the session."""
    out = tmp_path_factory.mktemp("instances")
    write_instance_files(out)
    return out


def fetched_dataset(name: str) -> Path | None:
    """Locate a non-constructible dataset file, if it has been fetched."""
    for candidate in (REPO_DATA / name, Path(name)):
        if candidate.exists():
            return candidate
    return None


def require_dataset(name: str) -> Path:
    path = fetched_dataset(name)
    if path is None:
        pytest.skip(f"{name} not available offline; run scripts/fetch_datasets.py "
                    f"with network access to enable this check")
    return path
