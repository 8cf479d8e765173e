import os
import pathlib

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("TRAJSIM_CLI")
    if not path or not pathlib.Path(path).exists():
        pytest.skip("TRAJSIM_CLI not set")
    return path


@pytest.fixture(scope="session")
def schema():
    import json

    path = os.environ.get("TRAJSIM_SCHEMA")
    if not path:
        path = pathlib.Path(__file__).resolve().parents[2] / "docs" / "report-schema.json"
    with open(path) as f:
        return json.load(f)
