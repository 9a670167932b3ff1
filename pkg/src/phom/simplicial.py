"""Filtered simplicial complexes and the Vietoris-Rips construction.

Cells are kept in filtration order: sorted by (value, dimension,
lexicographic vertices), so every face precedes its cofaces and any
sublevel set is a prefix of the cell list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError, InternalError, ParameterError

Vertices = Sequence[int]


class Simplex(tuple):
    """A simplex, stored as a strictly increasing tuple of vertex ids."""

    __slots__ = ()

    def __new__(cls, vertices: Vertices) -> "Simplex":
        vs = tuple(int(v) for v in vertices)
        if not vs:
            raise ParameterError("a simplex needs at least one vertex")
        if vs[0] < 0:
            raise ParameterError(f"vertex ids must be non-negative, got {vs}")
        for a, b in zip(vs, vs[1:]):
            if a >= b:
                raise ParameterError(
                    f"vertices must be strictly increasing, got {vs}")
        return tuple.__new__(cls, vs)

    @classmethod
    def _wrap(cls, vertices: tuple) -> "Simplex":
        # Fast path for internal callers that guarantee sortedness.
        return tuple.__new__(cls, vertices)

    @property
    def dimension(self) -> int:
        return len(self) - 1

    def faces(self) -> list["Simplex"]:
        """Codimension-1 faces, ordered by the dropped vertex position."""
        if len(self) == 1:
            return []
        return [Simplex._wrap(self[:i] + self[i + 1:]) for i in range(len(self))]

    def __repr__(self) -> str:
        return "Simplex(%s)" % (tuple(self),)


def boundary_chain(simplex: Vertices) -> list[Simplex]:
    """Z2 boundary of a single simplex: the list of its codim-1 faces.

    The boundary of a vertex is the empty chain.  Over Z2 the alternating
    signs of the usual boundary formula all collapse to 1, so the chain is
    just the face list.
    """
    s = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
    return s.faces()


@dataclass(frozen=True)
class ComplexViolation:
    """First defect found by validate_complex.

    kind is one of "missing face", "value inversion", "order break".
    """

    kind: str
    index: int
    cell: Simplex
    detail: str


class FilteredSimplicialComplex:
    """An ordered filtration of simplices with real entry values.

    Attributes:
        values: float64 array of filtration values, one per cell,
            non-decreasing along the cell order.
        dims: int32 array of cell dimensions.
    """

    def __init__(self, cells: Iterable[tuple[Vertices, float]],
                 check: bool = True):
        rows = []
        for verts, value in cells:
            s = Simplex(verts) if check else Simplex._wrap(tuple(verts))
            rows.append((float(value), len(s), s))
        rows.sort()
        self._verts: list[tuple] = [r[2] for r in rows]
        self.values = np.array([r[0] for r in rows], dtype=np.float64)
        self.dims = np.array([r[1] - 1 for r in rows], dtype=np.int32)
        self._index: dict | None = None
        self._bnd_off: np.ndarray | None = None
        self._bnd_flat: np.ndarray | None = None
        if check:
            if len(rows) and not np.all(np.isfinite(self.values)):
                raise InputError("filtration values must be finite")
            if len(set(self._verts)) != len(self._verts):
                raise InputError("duplicate cells in filtration")

    @classmethod
    def _from_arrays(cls, verts: list[tuple], values: np.ndarray,
                     dims: np.ndarray, bnd_off: np.ndarray | None,
                     bnd_flat: np.ndarray | None) -> "FilteredSimplicialComplex":
        self = object.__new__(cls)
        self._verts = verts
        self.values = values
        self.dims = dims
        self._index = None
        self._bnd_off = bnd_off
        self._bnd_flat = bnd_flat
        return self

    def __len__(self) -> int:
        return len(self._verts)

    @property
    def n_cells(self) -> int:
        return len(self._verts)

    @property
    def dim(self) -> int:
        return int(self.dims.max()) if len(self._verts) else -1

    def cell(self, i: int) -> Simplex:
        return Simplex._wrap(self._verts[i])

    def value(self, i: int) -> float:
        return float(self.values[i])

    @property
    def cells(self) -> list[tuple[Simplex, float]]:
        """Materialized (simplex, value) list; prefer items() when iterating."""
        return list(self.items())

    def items(self) -> Iterator[tuple[Simplex, float]]:
        for v, x in zip(self._verts, self.values):
            yield Simplex._wrap(v), float(x)

    def _ensure_index(self) -> dict:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self._verts)}
        return self._index

    def index_of(self, simplex: Vertices) -> int:
        """Position of a simplex in the filtration order; raises KeyError."""
        key = tuple(simplex)
        return self._ensure_index()[key]

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self._ensure_index()

    def _ensure_boundary(self) -> None:
        if self._bnd_off is not None:
            return
        index = self._ensure_index()
        widths = np.where(self.dims == 0, 0, self.dims + 1)
        off = np.concatenate([[0], np.cumsum(widths)]).astype(np.int64)
        flat = np.empty(int(off[-1]), dtype=np.int64)
        pos = 0
        for i, v in enumerate(self._verts):
            if len(v) == 1:
                continue
            for c in range(len(v)):
                face = v[:c] + v[c + 1:]
                try:
                    flat[pos] = index[face]
                except KeyError:
                    raise InputError(
                        f"cell {v} is missing face {face}") from None
                pos += 1
        self._bnd_off = off
        self._bnd_flat = flat

    def boundary(self, i: int) -> np.ndarray:
        """Indices of the codim-1 faces of cell i, as positions in the order."""
        self._ensure_boundary()
        return self._bnd_flat[self._bnd_off[i]:self._bnd_off[i + 1]]

    def counts_by_dim(self) -> np.ndarray:
        if not len(self._verts):
            return np.zeros(0, dtype=np.int64)
        return np.bincount(self.dims)

    def sublevel(self, eps: float) -> "FilteredSimplicialComplex":
        """The subcomplex of cells with value <= eps (a prefix of the order)."""
        m = int(np.searchsorted(self.values, eps, side="right"))
        off = flat = None
        if self._bnd_off is not None:
            off = self._bnd_off[:m + 1].copy()
            flat = self._bnd_flat[:self._bnd_off[m]].copy()
        return FilteredSimplicialComplex._from_arrays(
            self._verts[:m], self.values[:m].copy(), self.dims[:m].copy(),
            off, flat)

    def labels(self) -> list[str]:
        """Printable cell labels, e.g. "0,3,7" for a triangle."""
        return [",".join(str(x) for x in v) for v in self._verts]


def validate_complex(K: FilteredSimplicialComplex) -> ComplexViolation | None:
    """Check closure, value monotonicity and cell ordering.

    Returns None when the complex is valid, otherwise a report naming the
    first offending cell in filtration order.
    """
    index = K._ensure_index()
    prev_key = None
    for i, v in enumerate(K._verts):
        val = float(K.values[i])
        key = (val, len(v), v)
        if prev_key is not None and key < prev_key:
            return ComplexViolation(
                "order break", i, Simplex._wrap(v),
                f"cell at position {i} sorts before its predecessor")
        prev_key = key
        if len(v) > 1:
            for c in range(len(v)):
                face = v[:c] + v[c + 1:]
                j = index.get(face)
                if j is None:
                    return ComplexViolation(
                        "missing face", i, Simplex._wrap(v),
                        f"face {face} is absent")
                if K.values[j] > val:
                    return ComplexViolation(
                        "value inversion", i, Simplex._wrap(v),
                        f"face {face} enters at {K.values[j]!r} > {val!r}")
    return None


def point_cloud_distances(points: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix of an (n, d) point cloud.

    The result is exactly symmetric with a zero diagonal.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InputError("point cloud must be a non-empty 2-d array")
    if not np.all(np.isfinite(pts)):
        raise InputError("point cloud contains non-finite coordinates")
    if pts.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(pts))


def check_distance_matrix(d: np.ndarray) -> np.ndarray:
    """Validate a distance matrix: square, finite, symmetric, zero diagonal."""
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
        raise InputError("distance matrix must be square and non-empty")
    if not np.all(np.isfinite(d)):
        raise InputError("distance matrix contains non-finite entries")
    if np.any(d < 0):
        raise InputError("distance matrix contains negative entries")
    if np.any(np.diagonal(d) != 0):
        raise InputError("distance matrix diagonal must be zero")
    if not np.array_equal(d, d.T):
        raise InputError("distance matrix is not symmetric")
    return d


def _poly_keys(verts: np.ndarray, base: int) -> np.ndarray:
    """Injective int64 key per row of a (m, w) vertex array."""
    keys = np.zeros(verts.shape[0], dtype=np.int64)
    for c in range(verts.shape[1]):
        keys = keys * base + (verts[:, c].astype(np.int64) + 1)
    return keys


def rips_filtration(dist: np.ndarray, max_dim: int, max_scale: float,
                    scale: str = "radius") -> FilteredSimplicialComplex:
    """Vietoris-Rips filtration of a distance matrix.

    A k-simplex enters at the maximum of its edge values; vertices enter
    at 0.  Under the default "radius" convention an edge's value is half
    its length, under "diameter" it is the length itself.

    Args:
        dist: square distance matrix (see check_distance_matrix).
        max_dim: largest simplex dimension to build, 0 <= max_dim <= n-1.
        max_scale: cells with value above this are dropped; must be > 0.
        scale: "radius" or "diameter".

    Returns:
        A FilteredSimplicialComplex whose cell order is
        (value, dimension, lexicographic vertices).
    """
    d = check_distance_matrix(dist)
    n = d.shape[0]
    if scale not in ("radius", "diameter"):
        raise ParameterError(f"unknown scale convention {scale!r}")
    max_dim = int(max_dim)
    if max_dim < 0:
        raise ParameterError("max_dim must be non-negative")
    if max_dim > n - 1:
        raise ParameterError(
            f"max_dim {max_dim} exceeds n_points - 1 = {n - 1}")
    max_scale = float(max_scale)
    if not (np.isfinite(max_scale) and max_scale > 0):
        raise ParameterError("max_scale must be finite and positive")

    w = d / 2.0 if scale == "radius" else d.astype(np.float64)

    blocks: list[tuple[np.ndarray, np.ndarray]] = [
        (np.arange(n, dtype=np.int64)[:, None], np.zeros(n))]

    if max_dim >= 1:
        iu, ju = np.triu_indices(n, 1)
        ev = w[iu, ju]
        keep = ev <= max_scale
        iu, ju, ev = iu[keep], ju[keep], ev[keep]
        blocks.append((np.column_stack([iu, ju]).astype(np.int64), ev))

        if max_dim >= 2 and iu.size:
            adj = w <= max_scale
            np.fill_diagonal(adj, False)
            prev_v, prev_x = blocks[1]
            for k in range(2, max_dim + 1):
                parts_v, parts_x = [], []
                for r in range(prev_v.shape[0]):
                    cell = prev_v[r]
                    common = adj[cell[0]]
                    for v in cell[1:]:
                        common = common & adj[v]
                    nb = np.flatnonzero(common)
                    nb = nb[nb > cell[-1]]
                    if nb.size:
                        ext = np.empty((nb.size, k + 1), dtype=np.int64)
                        ext[:, :k] = cell
                        ext[:, k] = nb
                        xv = np.full(nb.size, prev_x[r])
                        for v in cell:
                            xv = np.maximum(xv, w[v, nb])
                        parts_v.append(ext)
                        parts_x.append(xv)
                if not parts_v:
                    break
                prev_v = np.concatenate(parts_v)
                prev_x = np.concatenate(parts_x)
                blocks.append((prev_v, prev_x))

    return _assemble_rips(blocks, n)


def _assemble_rips(blocks: list[tuple[np.ndarray, np.ndarray]],
                   n: int) -> FilteredSimplicialComplex:
    """Sort rips cells into filtration order and wire up boundaries."""
    width = max(b[0].shape[1] for b in blocks)
    m = sum(b[0].shape[0] for b in blocks)
    verts_pad = np.zeros((m, width), dtype=np.int64)
    values = np.empty(m)
    dims = np.empty(m, dtype=np.int32)
    pos = 0
    for vb, xb in blocks:
        cnt, wd = vb.shape
        verts_pad[pos:pos + cnt, :wd] = vb
        values[pos:pos + cnt] = xb
        dims[pos:pos + cnt] = wd - 1
        pos += cnt

    keys = (verts_pad[:, ::-1], dims, values)
    order = np.lexsort(tuple(keys[0].T) + (keys[1], keys[2]))
    verts_pad = verts_pad[order]
    values = values[order]
    dims = dims[order]

    base = n + 1
    cell_keys = np.full(m, -1, dtype=np.int64)
    for k in range(width):
        sel = dims == k
        if np.any(sel):
            cell_keys[sel] = _poly_keys(verts_pad[sel, :k + 1], base)
    ksort = np.argsort(cell_keys, kind="stable")
    sorted_keys = cell_keys[ksort]

    widths = np.where(dims == 0, 0, dims + 1)
    off = np.concatenate([[0], np.cumsum(widths)]).astype(np.int64)
    flat = np.empty(int(off[-1]), dtype=np.int64)
    for k in range(1, width):
        sel = np.flatnonzero(dims == k)
        if not sel.size:
            continue
        vb = verts_pad[sel, :k + 1]
        for c in range(k + 1):
            face = np.delete(vb, c, axis=1)
            fkeys = _poly_keys(face, base)
            p = np.searchsorted(sorted_keys, fkeys)
            if np.any(sorted_keys[p] != fkeys):
                raise InternalError("rips facet lookup failed")
            flat[off[sel] + c] = ksort[p]

    verts_list = [tuple(row[:dims[i] + 1])
                  for i, row in enumerate(verts_pad.tolist())]
    return FilteredSimplicialComplex._from_arrays(
        verts_list, values, dims, off, flat)
