"""Built-in datasets: named protosets, lattices and partitions.

Protosets jr0, jr2 and penrose24 are literal tile lists; ammann16 and all
named partitions are derived artifacts regenerated by
``scripts/build_registry.py`` and frozen under ``wangdyn/data/``.  Each
entry carries a provenance flag so consumers can tell published listings
from inferred data.
"""

from __future__ import annotations

import json
from importlib import resources

from .goldfield import GPoint, parse_golden
from .torusdyn import Lattice2
from .wangcore import Protoset

PROVENANCE_LISTING = "paper-listing"
PROVENANCE_DERIVED = "derived-by-inference"

_JR0 = [
    (2, 4, 2, 1), (2, 2, 2, 0), (1, 1, 3, 1), (1, 2, 3, 2), (3, 1, 3, 3),
    (0, 1, 3, 1), (0, 0, 0, 1), (3, 1, 0, 2), (0, 2, 1, 2), (1, 2, 1, 4),
    (3, 3, 1, 2),
]

_JR2 = [
    (0, 1, 0, 0), (0, 3, 0, 2), (1, 2, 1, 0), (1, 0, 2, 0), (1, 3, 3, 3),
    (2, 0, 1, 3), (2, 0, 2, 4), (2, 3, 2, 1), (2, 4, 3, 3), (3, 0, 2, 0),
    (3, 3, 2, 3),
]

_PENROSE24 = [
    (9, 1, 4, 5), (3, 6, 10, 2), (17, 7, 12, 18), (11, 18, 17, 8),
    (10, 14, 15, 6), (16, 5, 9, 13), (15, 1, 4, 14), (3, 13, 16, 2),
    (11, 5, 17, 1), (17, 2, 12, 6), (4, 18, 9, 8), (10, 7, 3, 18),
    (3, 6, 9, 13), (10, 14, 4, 5), (16, 5, 10, 2), (9, 1, 15, 6),
    (12, 13, 11, 1), (15, 8, 3, 7), (12, 2, 11, 14), (4, 8, 16, 7),
    (4, 18, 10, 7), (12, 6, 17, 1), (9, 8, 3, 18), (17, 2, 11, 5),
]

_PROTOSET_PROVENANCE = {
    "jr0": PROVENANCE_LISTING,
    "jr2": PROVENANCE_LISTING,
    "penrose24": PROVENANCE_LISTING,
    "ammann16": PROVENANCE_DERIVED,
}

_LATTICE_SPECS = {
    "gamma0": ("phi,0", "1,phi+3"),
    "gamma2": ("phi,0", "2-phi,phi+3"),
    "gamma24": ("phi,0", "0,phi"),
}
# gamma16 is the same lattice as gamma24
_LATTICE_ALIASES = {"gamma16": "gamma24"}

_PARTITION_FILES = {
    "p24": "partition_p24.json",
    "p16": "partition_p16.json",
    "p0": "partition_p0.json",
    "p2": "partition_p2.json",
}

PARTITION_PROTOSET = {
    "p24": "penrose24",
    "p16": "ammann16",
    "p0": "jr0",
    "p2": "jr2",
}

_cache: dict = {}


def protoset_names() -> list[str]:
    return ["jr0", "jr2", "penrose24", "ammann16"]


def lattice_names() -> list[str]:
    return sorted(_LATTICE_SPECS) + sorted(_LATTICE_ALIASES)


def partition_names() -> list[str]:
    return sorted(_PARTITION_FILES)


def provenance(name: str) -> str:
    if name in _PROTOSET_PROVENANCE:
        return _PROTOSET_PROVENANCE[name]
    if name in _PARTITION_FILES:
        return PROVENANCE_DERIVED
    if name in _LATTICE_SPECS or name in _LATTICE_ALIASES:
        return PROVENANCE_LISTING
    raise KeyError(name)


def _data_text(filename: str) -> str:
    return resources.files("wangdyn.data").joinpath(filename).read_text()


def get_protoset(name: str) -> Protoset:
    key = ("protoset", name)
    if key not in _cache:
        if name == "jr0":
            ps = Protoset(_JR0, name="jr0")
        elif name == "jr2":
            ps = Protoset(_JR2, name="jr2")
        elif name == "penrose24":
            ps = Protoset(_PENROSE24, name="penrose24")
        elif name == "ammann16":
            records = json.loads(_data_text("protoset_ammann16.json"))
            ps = Protoset(records, name="ammann16")
        else:
            raise KeyError(f"unknown protoset {name!r}")
        _cache[key] = ps
    return _cache[key]


def get_lattice(name: str) -> Lattice2:
    name = _LATTICE_ALIASES.get(name, name)
    key = ("lattice", name)
    if key not in _cache:
        if name not in _LATTICE_SPECS:
            raise KeyError(f"unknown lattice {name!r}")
        g1, g2 = _LATTICE_SPECS[name]
        _cache[key] = Lattice2(_parse_point(g1), _parse_point(g2))
    return _cache[key]


def _parse_point(text: str) -> GPoint:
    x, y = text.split(",")
    return GPoint(parse_golden(x), parse_golden(y))


def get_partition(name: str):
    from .partition import partition_from_json

    key = ("partition", name)
    if key not in _cache:
        if name not in _PARTITION_FILES:
            raise KeyError(f"unknown partition {name!r}")
        _cache[key] = partition_from_json(_data_text(_PARTITION_FILES[name]))
    return _cache[key]
