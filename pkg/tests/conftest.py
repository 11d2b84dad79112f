import json
from pathlib import Path

import pytest

from bikerisk.config import load_config
from bikerisk.pipeline import run_pipeline

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = REPO_ROOT / "data" / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    if not FIXTURE_DIR.exists():
        pytest.fail("bundled fixtures missing; run scripts/make_fixtures.py first")
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def fixture_config(fixture_dir):
    return load_config(fixture_dir / "config.json")


@pytest.fixture(scope="session")
def small_config(fixture_dir, tmp_path_factory):
    """Fixture data on a coarse grid, for tests that need fast full artifacts."""
    doc = json.loads((fixture_dir / "config.json").read_text())
    doc["grid_nx"] = 120
    doc["grid_ny"] = 96
    doc["margin"] = 0.004
    path = tmp_path_factory.mktemp("smallcfg") / "config.json"
    path.write_text(json.dumps(doc))
    cfg = load_config(path)
    # resolve data paths against the fixture dir, not the temp config dir
    for attr in ("accidents", "traces", "network", "climate", "baselines_dir"):
        setattr(cfg, attr, str(fixture_dir / Path(getattr(cfg, attr)).name))
    return cfg


@pytest.fixture(scope="session")
def small_artifacts(small_config):
    return run_pipeline(small_config)


@pytest.fixture(scope="session")
def full_artifacts(fixture_config):
    """Artifacts at the bundled fixture's own settings (full grid)."""
    return run_pipeline(fixture_config)
