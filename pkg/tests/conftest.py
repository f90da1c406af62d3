from pathlib import Path

import pytest

from rdfcard import CardinalityCache, iri, load_ntriples

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FX = "http://example.org/fx#"
PREFIX = f"PREFIX fx: <{FX}>\n"


def fx(name: str):
    """Fixture-namespace IRI term."""
    return iri(FX + name)


@pytest.fixture(scope="session")
def g1():
    return load_ntriples((FIXTURES / "g1.nt").read_text())


@pytest.fixture(scope="session")
def g2():
    return load_ntriples((FIXTURES / "g2.nt").read_text())


@pytest.fixture
def cache():
    return CardinalityCache()
