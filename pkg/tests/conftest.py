import pytest

from kgqa import KnowledgeGraph, synth
from kgqa.cli import main


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    """Generated synthetic corpus shared across the session."""
    root = tmp_path_factory.mktemp("synth")
    synth.generate(root, seed=0)
    return root


@pytest.fixture(scope="session")
def synth_config(synth_dir):
    return str(synth_dir / "kgqa.cfg")


@pytest.fixture(scope="session")
def trained_artifacts(synth_config):
    """All CLI stages run once: kg, index, projections, both models."""
    for command in ("build-kg", "build-index", "project", "train-ed", "train-rp"):
        assert main([command, "--config", synth_config]) == 0
    return synth_config


@pytest.fixture
def toy_kg():
    """Two people sharing a city, one popular; mirrors the README example."""
    return KnowledgeGraph.build(
        triples=[
            ("m.1", "people/person/place_of_birth", "m.9"),
            ("m.1", "people/person/profession", "m.8"),
            ("m.2", "people/person/place_of_birth", "m.9"),
            ("m.3", "r.x", "m.1"),
            ("m.4", "r.x", "m.1"),
            ("m.5", "r.x", "m.1"),
            ("m.5", "r.x", "m.2"),
        ],
        names=[
            ("m.1", "Adam Smith"),
            ("m.2", "Adam Smith"),
            ("m.8", "economist"),
            ("m.9", "Kirkcaldy"),
            ("m.3", "A Corp"),
            ("m.4", "B Corp"),
            ("m.5", "C Corp"),
        ],
        wiki_mids=["m.1"],
    )
