"""Loaders for the data files shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import List, Tuple

from .laurent import LaurentPolynomial
from .polytope import FanoPolytope, parse_polytope_text

POLYTOPES = ("x224", "x224_r1", "x224_r2", "quartic_newton", "p3")


def data_path(name: str):
    return resources.files(__package__).joinpath("data", name)


def read_text(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def read_json(name: str):
    return json.loads(read_text(name))


def polytope(name: str) -> FanoPolytope:
    return parse_polytope_text(read_text(f"polytopes/{name}.txt"))


def quartic_product() -> LaurentPolynomial:
    """(1 + x + y + z)^4 / (xyz) - 24."""
    x, y, z = LaurentPolynomial.variables(3)
    return (1 + x + y + z) ** 4 * (x * y * z) ** -1 - 24


@lru_cache(maxsize=None)
def degeneration_polynomial() -> LaurentPolynomial:
    d = read_json("polynomials.json")
    return LaurentPolynomial.parse(d["g"], d["variables"])


def surface(name: str):
    from .kstab import SurfaceModel

    return SurfaceModel.from_json(read_json(f"{name}.json"))


def flag(name: str):
    from .kstab import FlagConfig

    return FlagConfig.from_json(read_json(f"{name}.json"))


def mutation_chain() -> Tuple[str, List]:
    """(seed name, edges) of the stored mutation chain."""
    from .mutation import SearchEdge

    d = read_json("mutation_chain.json")
    return d["seed"], [SearchEdge.from_json(e) for e in d["edges"]]
