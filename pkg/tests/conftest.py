import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data" / "oracle_values.json"


def as_complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("(", "").replace(")", ""))


@pytest.fixture(scope="session")
def frozen():
    """50-digit reference values from scripts/freeze_oracles.py."""
    return json.loads(DATA.read_text())
