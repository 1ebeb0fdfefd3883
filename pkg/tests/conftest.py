import json
from pathlib import Path

import pytest

from ehubsim.network import StationPlacementSpec, parse_network_text
from ehubsim.stations import stations_from_spec
from ehubsim.store import Datastore

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
FIXTURES = DATA / "fixtures"
CASSETTES = DATA / "cassettes"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def cassettes_dir() -> Path:
    return CASSETTES


def make_fixture_store() -> Datastore:
    store = Datastore()
    store.init_schema()
    for table in ("online_demo", "stations", "user_paths"):
        store.seed_table_from_jsonl(table, FIXTURES / f"{table}.jsonl")
    return store


@pytest.fixture()
def fixture_store() -> Datastore:
    return make_fixture_store()


@pytest.fixture(scope="session")
def route_graph():
    return parse_network_text(
        (FIXTURES / "route_network.jsonl").read_text(encoding="utf-8"))


@pytest.fixture()
def route_stations(route_graph):
    spec = StationPlacementSpec(explicit=tuple(json.loads(
        (FIXTURES / "route_stations.json").read_text(encoding="utf-8"))))
    return stations_from_spec(route_graph, spec)
