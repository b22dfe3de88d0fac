"""Three-file Gray-Wyner descriptions for structured libraries.

For a structured library the seven descriptions are exactly the seven
independent components, so encoding and decoding are lossless at any
block length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .source_model import SUBSETS, Library, SourceSpec, file_subsets

L3 = ("123",)
L2 = ("12", "13", "23")
L1 = ("1", "2", "3")
SUBLIBRARIES = {3: L3, 2: L2, 1: L1}

DISTINCT = "DISTINCT"
EQUAL = "EQUAL"


class DecodeError(RuntimeError):
    """A receiver could not reconstruct what it asked for."""


@dataclass(frozen=True)
class RateTuple:
    """Symmetric Gray-Wyner rate tuple, in bits.

    ``rho0`` is the rate of the description shared by all three files,
    ``rho_pair`` the rate of each pairwise description and ``rho_priv``
    the rate of each private description.
    """

    rho0: Fraction | int
    rho_pair: Fraction | int
    rho_priv: Fraction | int

    def __post_init__(self):
        for name in ("rho0", "rho_pair", "rho_priv"):
            value = Fraction(getattr(self, name))
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
            object.__setattr__(self, name, value)

    def sum_rate(self) -> Fraction:
        return self.rho0 + 3 * self.rho_pair + 3 * self.rho_priv

    def rate(self, subset: str) -> Fraction:
        return {3: self.rho0, 2: self.rho_pair, 1: self.rho_priv}[len(subset)]

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.rho0, self.rho_pair, self.rho_priv)


@dataclass(frozen=True, eq=False)
class DescriptionSet:
    descriptions: dict[str, np.ndarray]
    tuple: RateTuple

    def __getitem__(self, subset: str) -> np.ndarray:
        return self.descriptions[subset]


def generating_tuple(spec: SourceSpec) -> RateTuple:
    return RateTuple(spec.c0, spec.cp, spec.cv)


def gw_encode(library: Library) -> DescriptionSet:
    return DescriptionSet(
        descriptions={s: library.components[s] for s in SUBSETS},
        tuple=generating_tuple(library.spec),
    )


def gw_decode(file_index: int, descriptions: dict[str, np.ndarray], rates: RateTuple) -> np.ndarray:
    """Rebuild file ``file_index`` from its four descriptions.

    ``descriptions`` must hold exactly the subsets containing the index,
    each with the length the rate tuple prescribes.
    """
    needed = file_subsets(file_index)
    extra = sorted(set(descriptions) - set(needed))
    missing = [s for s in needed if s not in descriptions]
    if extra or missing:
        problems = []
        if missing:
            problems.append("missing " + ", ".join("W" + s for s in missing))
        if extra:
            problems.append("unexpected " + ", ".join("W" + s for s in extra))
        raise DecodeError(f"file {file_index}: " + "; ".join(problems))
    parts = []
    for s in needed:
        bits = descriptions[s]
        if len(bits) != rates.rate(s):
            raise DecodeError(
                f"file {file_index}: description W{s} has {len(bits)} bits, expected {rates.rate(s)}"
            )
        parts.append(bits)
    return np.concatenate(parts).astype(np.uint8, copy=False)


@dataclass(frozen=True)
class L2Pattern:
    """How the pairwise descriptions are shared out by a demand.

    DISTINCT: ``common`` is wanted by both receivers, ``only_r1`` and
    ``only_r2`` by one receiver each. EQUAL: both receivers want
    ``only_r1`` and ``only_r2`` and ``common`` is None.
    """

    kind: str
    common: str | None
    only_r1: str
    only_r2: str

    @property
    def wanted(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        if self.kind == EQUAL:
            both = (self.only_r1, self.only_r2)
            return both, both
        return (self.common, self.only_r1), (self.common, self.only_r2)


@dataclass(frozen=True)
class RequestSets:
    demand: tuple[int, int]
    r1: tuple[str, ...]
    r2: tuple[str, ...]
    l2_pattern: L2Pattern

    def for_receiver(self, k: int) -> tuple[str, ...]:
        return (self.r1, self.r2)[k - 1]


def _check_demand(demand) -> tuple[int, int]:
    try:
        d1, d2 = demand
    except (TypeError, ValueError):
        raise ValueError(f"demand must be a pair of file indices, got {demand!r}") from None
    for d in (d1, d2):
        if d not in (1, 2, 3):
            raise ValueError(f"file index out of range 1..3: {d!r}")
    return int(d1), int(d2)


def request_sets(demand) -> RequestSets:
    d1, d2 = _check_demand(demand)
    pairs1 = [s for s in L2 if str(d1) in s]
    pairs2 = [s for s in L2 if str(d2) in s]
    if d1 == d2:
        pattern = L2Pattern(EQUAL, None, pairs1[0], pairs1[1])
    else:
        common = "".join(sorted(f"{d1}{d2}"))
        pattern = L2Pattern(
            DISTINCT,
            common,
            next(s for s in pairs1 if s != common),
            next(s for s in pairs2 if s != common),
        )
    return RequestSets((d1, d2), file_subsets(d1), file_subsets(d2), pattern)
