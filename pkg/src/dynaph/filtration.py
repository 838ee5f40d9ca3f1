"""Simplices, simplexwise filtrations and the Rips / lower-star constructors."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .matrix import PermutableMatrix


class FiltrationError(ValueError):
    """Raised for malformed filtrations or mismatched simplex sets."""


@dataclass(frozen=True, order=True)
class Simplex:
    vertices: tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.vertices)
        if not v:
            raise FiltrationError("simplex must have at least one vertex")
        if any(x < 0 for x in v) or any(a >= b for a, b in zip(v, v[1:])):
            raise FiltrationError(f"vertices must be non-negative and strictly increasing: {v}")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def faces(self) -> list["Simplex"]:
        """Codimension-1 faces, empty for a vertex."""
        if self.dim == 0:
            return []
        v = self.vertices
        return [Simplex(v[:k] + v[k + 1:]) for k in range(len(v))]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.vertices)) + ")"


def sort_key(simplex: Simplex, grade: float):
    """Simplexwise refinement: grade, then dimension, then vertex order."""
    return (grade, simplex.dim, simplex.vertices)


@dataclass(frozen=True)
class Filtration:
    """An ordered list of simplices with non-decreasing grades.

    Construction validates the subcomplex property; instances are immutable.
    Positions are 0-based internally.
    """

    simplices: tuple[Simplex, ...]
    grades: tuple[float, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        s = tuple(x if isinstance(x, Simplex) else Simplex(tuple(x)) for x in self.simplices)
        g = tuple(float(x) for x in self.grades)
        object.__setattr__(self, "simplices", s)
        object.__setattr__(self, "grades", g)
        if len(s) != len(g):
            raise FiltrationError("simplices and grades differ in length")
        index = {}
        for k, sx in enumerate(s):
            if sx in index:
                raise FiltrationError(f"duplicate simplex {sx} at positions {index[sx]} and {k}")
            for f in sx.faces():
                if f not in index:
                    raise FiltrationError(f"face {f} of {sx} does not precede position {k}")
            index[sx] = k
        for k in range(1, len(g)):
            if g[k] < g[k - 1]:
                raise FiltrationError(f"grades decrease at position {k}")
        object.__setattr__(self, "index", index)

    @classmethod
    def from_graded(cls, items: Iterable[tuple[Sequence[int], float]]) -> "Filtration":
        """Sort (vertices, grade) pairs into simplexwise order."""
        pairs = [(Simplex(tuple(sorted(v))), float(g)) for v, g in items]
        pairs.sort(key=lambda t: sort_key(*t))
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def from_order(cls, simplices: Sequence[Sequence[int]]) -> "Filtration":
        """Keep the given order; grades become the positions."""
        return cls(tuple(Simplex(tuple(v)) for v in simplices), tuple(range(len(simplices))))

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def m(self) -> int:
        return len(self.simplices)

    def dims(self) -> list[int]:
        return [s.dim for s in self.simplices]

    def position(self, simplex) -> int:
        if not isinstance(simplex, Simplex):
            simplex = Simplex(tuple(simplex))
        return self.index[simplex]

    def counts(self) -> list[int]:
        """Number of simplices per dimension."""
        out: list[int] = []
        for s in self.simplices:
            while len(out) <= s.dim:
                out.append(0)
            out[s.dim] += 1
        return out

    def reordered(self, order: Sequence[int], grades: Optional[Sequence[float]] = None) -> "Filtration":
        """New filtration listing ``self.simplices[order[k]]`` at position k."""
        simp = tuple(self.simplices[o] for o in order)
        g = tuple(range(len(order))) if grades is None else tuple(grades)
        return Filtration(simp, g)


# -- constructors ---------------------------------------------------------

def _distance_matrix(points=None, distances=None) -> np.ndarray:
    if distances is not None:
        D = np.asarray(distances, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise FiltrationError("distance matrix must be square")
        if not np.allclose(D, D.T):
            raise FiltrationError("distance matrix is not symmetric")
        if (D < 0).any():
            raise FiltrationError("distances must be non-negative")
        return D
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt((diff ** 2).sum(-1))


def rips_simplices(D: np.ndarray, eps_max: float, dim_max: int) -> list[tuple[tuple[int, ...], float]]:
    """All cliques of diameter at most ``eps_max`` up to ``dim_max``, with diameters.

    Grows cliques one vertex at a time through the neighbourhood graph.
    """
    n = D.shape[0]
    out = [((v,), 0.0) for v in range(n)]
    if dim_max < 1:
        return out
    nbrs = [set(np.flatnonzero((D[v] <= eps_max) & (np.arange(n) > v)).tolist()) for v in range(n)]
    frontier = [((v,), 0.0, nbrs[v]) for v in range(n)]
    for _ in range(dim_max):
        nxt = []
        for verts, diam, cand in frontier:
            for w in sorted(cand):
                d = max(diam, max(D[u, w] for u in verts))
                s = verts + (w,)
                out.append((s, float(d)))
                nxt.append((s, d, cand & nbrs[w]))
        frontier = nxt
    return out


def build_rips(points=None, eps_max: float = np.inf, dim_max: int = 2, distances=None) -> Filtration:
    """Vietoris-Rips filtration graded by diameter."""
    if dim_max < 0:
        raise FiltrationError("dim_max must be non-negative")
    D = _distance_matrix(points, distances)
    return Filtration.from_graded(rips_simplices(D, eps_max, dim_max))


def freudenthal_complex(H: int, W: int) -> list[tuple[int, ...]]:
    """Simplices of the triangulated H x W grid; vertex id = row * W + col.

    Each unit square is split along the diagonal from its lower-left corner
    (r+1, c) to its upper-right corner (r, c+1).
    """
    vid = lambda r, c: r * W + c
    simp: list[tuple[int, ...]] = [(v,) for v in range(H * W)]
    edges = set()
    tris = []
    for r in range(H):
        for c in range(W):
            if c + 1 < W:
                edges.add(tuple(sorted((vid(r, c), vid(r, c + 1)))))
            if r + 1 < H:
                edges.add(tuple(sorted((vid(r, c), vid(r + 1, c)))))
            if r + 1 < H and c + 1 < W:
                ll, ur = vid(r + 1, c), vid(r, c + 1)
                edges.add(tuple(sorted((ll, ur))))
                tris.append(tuple(sorted((vid(r, c), ll, ur))))
                tris.append(tuple(sorted((vid(r + 1, c + 1), ll, ur))))
    return simp + sorted(edges) + sorted(tris)


def build_lower_star(image) -> Filtration:
    """Lower-star filtration of a pixel grid on the Freudenthal triangulation."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or img.shape[0] < 2 or img.shape[1] < 2:
        raise FiltrationError("image must be a 2-D grid with both sides at least 2")
    vals = img.ravel()
    return Filtration.from_graded((s, float(vals[list(s)].max())) for s in freudenthal_complex(*img.shape))


# -- comparisons ----------------------------------------------------------

def reindex_bijection(Ka: Filtration, Kb: Filtration) -> list[int]:
    """q with q[position in Ka] = position in Kb of the same simplex."""
    if Ka.m != Kb.m or set(Ka.index) != set(Kb.index):
        raise FiltrationError("filtrations have different simplex sets")
    return [Kb.index[s] for s in Ka.simplices]


def boundary_matrix(K: Filtration) -> PermutableMatrix:
    cols = [[K.index[f] for f in s.faces()] for s in K.simplices]
    return PermutableMatrix(K.m, cols)


# -- text formats ---------------------------------------------------------

def parse_filtration(text: str, source: str = "<input>") -> Filtration:
    """Parse ``grade v0 v1 ...`` lines; blank lines and ``#`` comments skipped."""
    items = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            grade = float(tok[0])
            verts = tuple(int(t) for t in tok[1:])
            if not verts:
                raise ValueError("no vertices")
            items.append((Simplex(tuple(sorted(verts))), grade))
            if len(set(verts)) != len(verts):
                raise ValueError("repeated vertex")
        except (ValueError, FiltrationError) as e:
            raise FiltrationError(f"{source}:{ln}: {e}") from None
    if not items:
        raise FiltrationError(f"{source}: no simplices")
    items.sort(key=lambda t: sort_key(*t))
    try:
        return Filtration(tuple(s for s, _ in items), tuple(g for _, g in items))
    except FiltrationError as e:
        raise FiltrationError(f"{source}: {e}") from None


def read_filtration(path) -> Filtration:
    with open(path) as fh:
        return parse_filtration(fh.read(), str(path))


def format_filtration(K: Filtration) -> str:
    return "".join(f"{g:.17g} " + " ".join(map(str, s.vertices)) + "\n"
                   for s, g in zip(K.simplices, K.grades))


def read_grid(path) -> np.ndarray:
    """CSV grid of reals, or plain PGM (P2)."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("P2"):
        tok = [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]
        w, h = int(tok[1]), int(tok[2])
        vals = np.array(tok[4:4 + w * h], dtype=float)
        return vals.reshape(h, w)
    return np.loadtxt(path, delimiter=",", ndmin=2)


def read_points(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def all_simplices_up_to(n: int, dim_max: int) -> list[tuple[int, ...]]:
    return [c for k in range(1, dim_max + 2) for c in itertools.combinations(range(n), k)]
