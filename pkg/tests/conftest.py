from fractions import Fraction
from pathlib import Path

import pytest

from contextuality import parse_system

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "v1"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def load_fixture(name: str):
    return parse_system(fixture_path(name).read_text(encoding="utf-8"))


def golden_degrees() -> dict:
    out = {}
    for line in (FIXTURES / "golden.txt").read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        name, exact, _decimal = line.split()
        out[name] = Fraction(exact)
    return out


def fixture_names():
    return sorted(p.stem for p in FIXTURES.glob("*.json"))


@pytest.fixture(scope="session")
def golden():
    return golden_degrees()
