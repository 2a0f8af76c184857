"""Complete-graph TSP instances, tours, and TSPLIB I/O.

Vertices are labelled ``0 .. n-1`` everywhere inside the package; TSPLIB's
1-based labels are converted at the parse/serialise boundary.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

EUCLIDEAN = "euclidean-rounded"
UNIT = "unit"

BUNDLED = ("eil51", "eil76", "eil101")


class TSPLIBParseError(ValueError):
    """Base class for malformed TSPLIB input."""


class HeaderError(TSPLIBParseError):
    pass


class WeightTypeError(TSPLIBParseError):
    pass


class DimensionMismatchError(TSPLIBParseError):
    pass


class TourError(TSPLIBParseError):
    pass


def n_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_id(n: int, u: int, v: int) -> int:
    """Index of the undirected edge ``{u, v}`` in ``[0, n(n-1)/2)``.

    Pairs are enumerated row by row over the upper triangle, so
    ``(0, 1), (0, 2), ..., (0, n-1), (1, 2), ...`` map to ``0, 1, 2, ...``.
    """
    if u == v:
        raise ValueError(f"self-loop {u}-{v} is not an edge")
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"vertex out of range for n={n}: {u}, {v}")
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def edge_pair(n: int, index: int) -> tuple[int, int]:
    """Inverse of :func:`edge_id`; returns the canonical pair ``(u, v)``, u < v."""
    m = n_edges(n)
    if not 0 <= index < m:
        raise ValueError(f"edge index {index} out of range [0, {m})")
    # number of pairs in rows >= u is (n-u)(n-u-1)/2; solve for the row
    rest = m - 1 - index
    k = (math.isqrt(8 * rest + 1) - 1) // 2
    u = n - 2 - k
    v = index - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


def edge_id_matrix(n: int) -> np.ndarray:
    """``(n, n)`` table of edge ids, ``-1`` on the diagonal."""
    ids = np.full((n, n), -1, dtype=np.int64)
    iu, ju = np.triu_indices(n, k=1)
    ids[iu, ju] = np.arange(len(iu))
    ids[ju, iu] = ids[iu, ju]
    return ids


@dataclass(frozen=True, eq=False)
class Tour:
    """A Hamiltonian cycle stored as a vertex permutation.

    Two tours are equal when their undirected edge sets are equal, so
    rotations and reversals of ``perm`` compare (and hash) alike.
    """

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(v) for v in self.perm)
        n = len(perm)
        if n < 3:
            raise ValueError("a tour needs at least 3 vertices")
        if sorted(perm) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.perm)

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        p = self.perm
        return frozenset(
            (min(a, b), max(a, b)) for a, b in zip(p, p[1:] + p[:1])
        )

    def edge_ids(self) -> np.ndarray:
        n = self.n
        return np.array(sorted(edge_id(n, u, v) for u, v in self.edges), dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, Tour):
            return NotImplemented
        return self.edges == other.edges

    def __hash__(self):
        return hash(self.edges)

    def __len__(self):
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    def __repr__(self):
        return f"Tour({self.perm})"


@dataclass(frozen=True, eq=False)
class Instance:
    """Complete graph on ``n`` vertices with rounded-Euclidean or unit weights."""

    n: int
    coords: tuple[tuple[float, float], ...] | None = None
    weight_kind: str = EUCLIDEAN
    name: str = "instance"
    comment: str = field(default="", repr=False)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"an instance needs n >= 3, got {self.n}")
        if self.weight_kind not in (EUCLIDEAN, UNIT):
            raise ValueError(f"unknown weight kind {self.weight_kind!r}")
        if self.coords is not None:
            coords = tuple((float(x), float(y)) for x, y in self.coords)
            if len(coords) != self.n:
                raise ValueError(f"{len(coords)} coordinates for n={self.n}")
            object.__setattr__(self, "coords", coords)
        elif self.weight_kind == EUCLIDEAN:
            raise ValueError("euclidean instances need coordinates")

    @classmethod
    def unit(cls, n: int, name: str | None = None) -> "Instance":
        """Unweighted complete graph: every tour costs exactly ``n``."""
        return cls(n=n, weight_kind=UNIT, name=name or f"unit{n}")

    @classmethod
    def from_coords(cls, coords, name: str = "instance") -> "Instance":
        coords = [tuple(c) for c in coords]
        return cls(n=len(coords), coords=tuple(coords), name=name)

    @cached_property
    def distances(self) -> np.ndarray:
        """Integer ``(n, n)`` distance matrix with a zero diagonal."""
        if self.weight_kind == UNIT:
            d = np.ones((self.n, self.n), dtype=np.int64)
        else:
            xy = np.asarray(self.coords, dtype=float)
            diff = xy[:, None, :] - xy[None, :, :]
            # TSPLIB nint(): half-up rounding
            d = np.floor(np.sqrt((diff ** 2).sum(-1)) + 0.5).astype(np.int64)
        np.fill_diagonal(d, 0)
        d.setflags(write=False)
        return d


def distance(instance: Instance, u: int, v: int) -> int:
    if u == v:
        raise ValueError("distance is only defined between distinct vertices")
    if not (0 <= u < instance.n and 0 <= v < instance.n):
        raise ValueError(f"vertex out of range: {u}, {v}")
    return int(instance.distances[u, v])


def tour_cost(instance: Instance, tour: Tour | Sequence[int]) -> int:
    perm = np.asarray(tour.perm if isinstance(tour, Tour) else tour, dtype=np.int64)
    if len(perm) != instance.n:
        raise ValueError(f"tour has {len(perm)} vertices, instance has {instance.n}")
    return int(instance.distances[perm, np.roll(perm, -1)].sum())


# --------------------------------------------------------------------------
# TSPLIB

_KEY = re.compile(r"^\s*([A-Z_]+)\s*:?\s*(.*?)\s*$")


def _read_header(lines: list[str], sections: tuple[str, ...]):
    header = {}
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        m = _KEY.match(line)
        if m is None:
            raise HeaderError(f"line {i + 1}: cannot parse {line!r}")
        key, value = m.groups()
        if key in sections:
            return header, key, i + 1
        if key == "EOF":
            break
        header[key] = value
    return header, None, len(lines)


def _dimension(header) -> int:
    if "DIMENSION" not in header:
        raise HeaderError("missing DIMENSION")
    try:
        return int(header["DIMENSION"])
    except ValueError:
        raise HeaderError(f"bad DIMENSION {header['DIMENSION']!r}") from None


def parse_tsplib(text: str) -> Instance:
    """Parse an EUC_2D ``.tsp`` file into an :class:`Instance`."""
    lines = text.splitlines()
    header, section, start = _read_header(lines, ("NODE_COORD_SECTION",))
    n = _dimension(header)
    kind = header.get("EDGE_WEIGHT_TYPE")
    if kind is None:
        raise HeaderError("missing EDGE_WEIGHT_TYPE")
    if kind != "EUC_2D":
        raise WeightTypeError(f"unsupported EDGE_WEIGHT_TYPE {kind}")
    if section is None:
        raise HeaderError("missing NODE_COORD_SECTION")

    coords: dict[int, tuple[float, float]] = {}
    for line in lines[start:]:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "EOF":
            break
        if len(parts) != 3:
            raise HeaderError(f"bad coordinate line {line!r}")
        label = int(parts[0])
        if label in coords:
            raise DimensionMismatchError(f"node {label} listed twice")
        coords[label] = (float(parts[1]), float(parts[2]))

    if len(coords) != n or sorted(coords) != list(range(1, n + 1)):
        raise DimensionMismatchError(
            f"DIMENSION {n} but {len(coords)} coordinate lines"
        )
    ordered = tuple(coords[k] for k in range(1, n + 1))
    return Instance(
        n=n,
        coords=ordered,
        name=header.get("NAME", "instance"),
        comment=header.get("COMMENT", ""),
    )


def _fmt_coord(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_tsplib(instance: Instance) -> str:
    if instance.coords is None:
        raise ValueError("only coordinate instances can be written as EUC_2D")
    out = [f"NAME : {instance.name}"]
    if instance.comment:
        out.append(f"COMMENT : {instance.comment}")
    out += [
        "TYPE : TSP",
        f"DIMENSION : {instance.n}",
        "EDGE_WEIGHT_TYPE : EUC_2D",
        "NODE_COORD_SECTION",
    ]
    for i, (x, y) in enumerate(instance.coords, start=1):
        out.append(f"{i} {_fmt_coord(x)} {_fmt_coord(y)}")
    out.append("EOF")
    return "\n".join(out) + "\n"


def parse_opt_tour(text: str, instance: Instance | int) -> Tour:
    """Parse a ``TOUR_SECTION`` (1-based, ``-1`` terminated) into a :class:`Tour`."""
    n = instance if isinstance(instance, int) else instance.n
    lines = text.splitlines()
    _, section, start = _read_header(lines, ("TOUR_SECTION",))
    if section is None:
        raise HeaderError("missing TOUR_SECTION")
    labels: list[int] = []
    for tok in " ".join(lines[start:]).split():
        if tok == "EOF":
            break
        v = int(tok)
        if v == -1:
            break
        labels.append(v)
    return _tour_from_labels(labels, n)


def _tour_from_labels(labels: Iterable[int], n: int) -> Tour:
    labels = list(labels)
    bad = [v for v in labels if not 1 <= v <= n]
    if bad:
        raise TourError(f"labels out of range 1..{n}: {bad[:5]}")
    if len(set(labels)) != len(labels):
        raise TourError("tour lists a vertex more than once")
    if len(labels) != n:
        raise TourError(f"tour visits {len(labels)} of {n} vertices")
    return Tour(tuple(v - 1 for v in labels))


def write_tour(tour: Tour, name: str = "tour") -> str:
    body = "\n".join(str(v + 1) for v in tour.perm)
    return (
        f"NAME : {name}\nTYPE : TOUR\nDIMENSION : {tour.n}\n"
        f"TOUR_SECTION\n{body}\n-1\nEOF\n"
    )


def load_tsplib(path) -> Instance:
    with open(path) as fh:
        return parse_tsplib(fh.read())


def load_opt_tour(path, instance: Instance | int) -> Tour:
    with open(path) as fh:
        return parse_opt_tour(fh.read(), instance)


def bundled(name: str) -> tuple[Instance, Tour]:
    """One of the packaged TSPLIB instances with its optimal tour."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled instance {name!r}; have {', '.join(BUNDLED)}")
    data = resources.files("diversetours") / "data"
    instance = parse_tsplib((data / f"{name}.tsp").read_text())
    tour = parse_opt_tour((data / f"{name}.opt.tour").read_text(), instance)
    return instance, tour
