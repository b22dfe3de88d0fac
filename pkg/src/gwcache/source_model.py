"""Library sources for the two-receiver, three-file caching network.

Two kinds of source are supported:

* structured sources, where the three files are assembled from seven
  independent uniformly random components (one shared by all files, one
  per pair, one private to each file). These can be simulated bit by bit.
* joint-pmf sources, which are only used to evaluate entropies for the
  lower bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

#: Nonempty subsets of {1, 2, 3} in canonical serialization order.
SUBSETS = ("123", "12", "13", "23", "1", "2", "3")

#: Identifier of the bit generator used for structured libraries.
RNG_ALGORITHM = "numpy.random.PCG64"


class SpecError(ValueError):
    """Raised for an invalid source definition."""


def file_subsets(i: int) -> tuple[str, ...]:
    """Subsets whose component is part of file ``i``, in assembly order."""
    if i not in (1, 2, 3):
        raise SpecError(f"file index must be 1, 2 or 3, got {i!r}")
    return tuple(s for s in SUBSETS if str(i) in s)


@dataclass(frozen=True)
class SourceSpec:
    """Bit lengths of the components of a structured library.

    ``cp`` and ``cv`` are the lengths of *each* pairwise and private
    component respectively.
    """

    c0: int
    cp: int
    cv: int
    granularity_q: int = 4

    def __post_init__(self):
        for name in ("c0", "cp", "cv", "granularity_q"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise SpecError(f"{name} must be an integer, got {value!r}")
        q = self.granularity_q
        if q <= 0:
            raise SpecError(f"granularity_q must be positive, got {q}")
        for name in ("c0", "cp", "cv"):
            if getattr(self, name) < 0:
                raise SpecError(f"{name} must be nonnegative")
        if self.c0 == self.cp == self.cv == 0:
            raise SpecError("c0, cp and cv cannot all be zero")
        if self.c0 % q:
            raise SpecError(f"c0={self.c0} is not divisible by granularity_q={q}")
        for name in ("cp", "cv"):
            if getattr(self, name) % (6 * q):
                raise SpecError(
                    f"{name}={getattr(self, name)} is not divisible by 6*granularity_q={6 * q}"
                )

    def component_length(self, subset: str) -> int:
        return {3: self.c0, 2: self.cp, 1: self.cv}[len(subset)]

    @property
    def file_length(self) -> int:
        return self.c0 + 2 * self.cp + self.cv

    @classmethod
    def from_dict(cls, data: dict) -> "SourceSpec":
        unknown = set(data) - {"c0", "cp", "cv", "granularity_q"}
        if unknown:
            raise SpecError(f"unknown SourceSpec fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True, eq=False)
class Library:
    """Components and files of a structured library."""

    spec: SourceSpec
    seed: int
    components: dict[str, np.ndarray]
    files: dict[int, np.ndarray]
    rng_algorithm: str = RNG_ALGORITHM

    def file(self, i: int) -> np.ndarray:
        return self.files[i]


def assemble_file(i: int, components: dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([components[s] for s in file_subsets(i)])


def split_file(i: int, bits: np.ndarray, spec: SourceSpec) -> dict[str, np.ndarray]:
    """Slice a file back into its components at the canonical offsets."""
    if len(bits) != spec.file_length:
        raise SpecError(f"file {i} has {len(bits)} bits, expected {spec.file_length}")
    out, offset = {}, 0
    for s in file_subsets(i):
        n = spec.component_length(s)
        out[s] = bits[offset:offset + n]
        offset += n
    return out


def make_structured_library(spec: SourceSpec, seed: int) -> Library:
    rng = np.random.default_rng(seed)
    components = {}
    for s in SUBSETS:
        bits = rng.integers(0, 2, size=spec.component_length(s), dtype=np.uint8)
        bits.setflags(write=False)
        components[s] = bits
    files = {}
    for i in (1, 2, 3):
        f = assemble_file(i, components)
        f.setflags(write=False)
        files[i] = f
    return Library(spec=spec, seed=seed, components=components, files=files)


@dataclass(frozen=True)
class EntropyProfile:
    """Entropies (in bits) that enter the lower bound and the gap bounds."""

    h_single: float
    h_pair: float
    h_triple: float
    h_pair_given_one: float


def entropy_profile_structured(spec: SourceSpec) -> EntropyProfile:
    # independent uniform components: entropies add up
    c0, cp, cv = spec.c0, spec.cp, spec.cv
    return EntropyProfile(
        h_single=c0 + 2 * cp + cv,
        h_pair=c0 + 3 * cp + 2 * cv,
        h_triple=c0 + 3 * cp + 3 * cv,
        h_pair_given_one=cp + 2 * cv,
    )


@dataclass(frozen=True, eq=False)
class PmfSource:
    """Joint pmf ``p[x1, x2, x3]`` of a three-component memoryless source."""

    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 3:
            raise SpecError(f"pmf table must be 3-dimensional, got shape {p.shape}")
        if np.any(p < 0):
            raise SpecError("pmf has negative entries")
        if abs(p.sum() - 1.0) > 1e-12:
            raise SpecError(f"pmf sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "p", p)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.p.shape

    @classmethod
    def from_dict(cls, data: dict) -> "PmfSource":
        try:
            n1, n2, n3 = int(data["n1"]), int(data["n2"]), int(data["n3"])
            flat = np.asarray(data["p"], dtype=float)
        except KeyError as exc:
            raise SpecError(f"pmf document is missing field {exc.args[0]!r}") from None
        if flat.size != n1 * n2 * n3:
            raise SpecError(f"pmf has {flat.size} entries, expected {n1 * n2 * n3}")
        return cls(flat.reshape(n1, n2, n3))


def entropy(p) -> float:
    """Shannon entropy in bits of a probability array of any shape."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def entropy_profile_pmf(src: PmfSource) -> EntropyProfile:
    p = src.p
    singles = [entropy(p.sum(axis=tuple(a for a in range(3) if a != i))) for i in range(3)]
    pairs = [entropy(p.sum(axis=k)) for k in range(3)]
    h_triple = entropy(p)
    return EntropyProfile(
        h_single=max(singles),
        h_pair=max(pairs),
        h_triple=h_triple,
        h_pair_given_one=h_triple - singles[0],
    )


def load_source(path) -> SourceSpec | PmfSource:
    """Load a SourceSpec or PmfSource from a JSON document.

    A document with a ``p`` field is a pmf, anything else a structured spec.
    """
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise SpecError("source document must be a JSON object")
    if "p" in data:
        return PmfSource.from_dict(data)
    return SourceSpec.from_dict(data)
