import os
from pathlib import Path

import pytest

from synthdata import write_corpus


def kdd10_path() -> str | None:
    """Locate the public 10% corpus if present; None otherwise."""
    env = os.environ.get("CHIDS_KDD10")
    candidates = [env] if env else []
    for base in (Path.cwd(), Path.cwd() / "data"):
        candidates.append(str(base / "kddcup.data_10_percent.gz"))
        candidates.append(str(base / "kddcup.data_10_percent"))
    for c in candidates:
        if c and Path(c).exists():
            return c
    return None


requires_kdd10 = pytest.mark.skipif(
    kdd10_path() is None,
    reason="public 10% dataset not present (set CHIDS_KDD10=/path/to/kddcup.data_10_percent.gz)",
)


@pytest.fixture(scope="session")
def synth_corpus_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "synth.kdd"
    write_corpus(path, n=3000, seed=7)
    return path


@pytest.fixture(scope="session")
def kdd10(request):
    path = kdd10_path()
    if path is None:
        pytest.skip("public 10% dataset not present (set CHIDS_KDD10)")
    return path
