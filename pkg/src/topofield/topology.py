"""Diffuse connectedness penalty on the super-level set of a phase field.

The penalty is a weighted double integral of geodesic distances: nodes with
``u > 1 - alpha`` carry mass ``beta(u)``, movement through regions of low
``u`` costs ``F(u)`` per unit length, and the penalty sums, over all pairs
of connected components of the super-level set, mass_i * mass_j * distance.
Distances between components are shortest paths on the 8-neighbor grid
graph (multi-source Dijkstra), following the component decomposition: the
distance between two points of the same component is zero because all edges
inside it have zero weight, so only cross-component pairs contribute.

Labeling uses 4-adjacency (conservative: no connection through diagonal
pinch points); the geodesic graph uses 8-adjacency for better isotropy.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import ndimage
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .grid import Grid2D, ScalarField

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


class ConsistencyError(RuntimeError):
    """A geodesic table or labeling is stale with respect to the field."""


@dataclass(frozen=True)
class ProfileParams:
    alpha: float = 0.35
    c1: float | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 0.5:
            raise ValueError("alpha must lie in (0, 1/2]")
        if self.c1 is None:
            # normalizes the mass profile: its integral over (1-alpha, 1] is 1
            object.__setattr__(self, "c1", 6.0 / self.alpha**3)
        elif self.c1 <= 0.0:
            raise ValueError("c1 must be positive")

    @property
    def threshold(self) -> float:
        return 1.0 - self.alpha


def beta_profile(s, p: ProfileParams):
    """Mass profile: 0 up to the threshold, (c1/2)(s - 1 + alpha)^2 above it."""
    s = np.asarray(s, dtype=np.float64)
    t = s - p.threshold
    return np.where(s > p.threshold, 0.5 * p.c1 * t**2, 0.0)


def beta_prime(s, p: ProfileParams):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s > p.threshold, p.c1 * (s - p.threshold), 0.0)


def weight_profile(s, p: ProfileParams):
    """Path-cost profile: (1/2)(s - 1 + alpha)^2 below the threshold, 0 above."""
    s = np.asarray(s, dtype=np.float64)
    t = s - p.threshold
    return np.where(s < p.threshold, 0.5 * t**2, 0.0)


def weight_prime(s, p: ProfileParams):
    s = np.asarray(s, dtype=np.float64)
    return np.where(s < p.threshold, s - p.threshold, 0.0)


@dataclass
class ComponentLabeling:
    grid: Grid2D
    labels: np.ndarray  # (ny, nx) int, 0 = background, 1..count = components
    count: int
    masses: np.ndarray  # (count,) beta-mass per component

    def nodes_of(self, comp: int) -> np.ndarray:
        """Flat node indices (iy * nx + ix) of 1-based component ``comp``."""
        return np.flatnonzero(self.labels.ravel() == comp)


def component_masses(
    labels: np.ndarray, count: int, beta_values: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    if count == 0:
        return np.zeros(0)
    return np.bincount(
        labels.ravel(), weights=(beta_values * weights).ravel(), minlength=count + 1
    )[1:]


def label_components(u: ScalarField, p: ProfileParams) -> ComponentLabeling:
    """4-adjacency components of the super-level set {u > 1 - alpha}."""
    mask = u.values > p.threshold
    labels, count = ndimage.label(mask, structure=FOUR_CONNECTED)
    masses = component_masses(
        labels, count, beta_profile(u.values, p), u.grid.node_weights()
    )
    return ComponentLabeling(u.grid, labels, count, masses)


@lru_cache(maxsize=8)
def _grid_edges(nx: int, ny: int, hx: float, hy: float):
    """Undirected 8-adjacency edges (a, b, length) over flat node indices."""
    idx = np.arange(nx * ny).reshape(ny, nx)
    diag = float(np.hypot(hx, hy))
    pairs = [
        (idx[:, :-1], idx[:, 1:], hx),  # horizontal
        (idx[:-1, :], idx[1:, :], hy),  # vertical
        (idx[:-1, :-1], idx[1:, 1:], diag),  # down-right
        (idx[:-1, 1:], idx[1:, :-1], diag),  # down-left
    ]
    a = np.concatenate([p[0].ravel() for p in pairs])
    b = np.concatenate([p[1].ravel() for p in pairs])
    ln = np.concatenate([np.full(p[0].size, p[2]) for p in pairs])
    return a, b, ln


@dataclass
class WeightedGraph:
    grid: Grid2D
    edge_a: np.ndarray
    edge_b: np.ndarray
    edge_length: np.ndarray
    edge_weight: np.ndarray  # length * mean of endpoint node costs

    def to_csr(self) -> csr_matrix:
        n = self.grid.num_nodes
        rows = np.concatenate([self.edge_a, self.edge_b])
        cols = np.concatenate([self.edge_b, self.edge_a])
        data = np.concatenate([self.edge_weight, self.edge_weight])
        return csr_matrix((data, (rows, cols)), shape=(n, n))


def build_weighted_graph(u: ScalarField, p: ProfileParams) -> WeightedGraph:
    """8-adjacency grid graph; edge weight = edge length x mean endpoint F(u)."""
    g = u.grid
    a, b, ln = _grid_edges(g.nx, g.ny, g.hx, g.hy)
    f = weight_profile(u.values, p).ravel()
    w = ln * 0.5 * (f[a] + f[b])
    return WeightedGraph(g, a, b, ln, w)


@dataclass
class GeodesicTable:
    dist: np.ndarray  # (k, k) symmetric component distances
    paths: dict  # (i, j) with i < j, 0-based -> flat node index array

    @property
    def count(self) -> int:
        return self.dist.shape[0]


def pairwise_geodesics(graph: WeightedGraph, c: ComponentLabeling) -> GeodesicTable:
    """Component set distances and one realizing node path per pair.

    For each component a multi-source Dijkstra is seeded with all of its
    nodes at distance zero; the distance to another component is the minimum
    over that component's nodes, and the path is recovered from predecessor
    links.
    """
    if c.count < 1:
        return GeodesicTable(np.zeros((0, 0)), {})
    k = c.count
    dist = np.zeros((k, k))
    paths: dict = {}
    if k == 1:
        return GeodesicTable(dist, paths)
    csr = graph.to_csr()
    comp_nodes = [c.nodes_of(i + 1) for i in range(k)]
    for i in range(k - 1):
        d, pred, _src = _csgraph_dijkstra(
            csr,
            directed=False,
            indices=comp_nodes[i],
            min_only=True,
            return_predecessors=True,
        )
        for j in range(i + 1, k):
            nodes_j = comp_nodes[j]
            pos = int(np.argmin(d[nodes_j]))
            end = int(nodes_j[pos])
            dij = float(d[end])
            if not np.isfinite(dij):
                raise RuntimeError(f"components {i} and {j} unreachable")
            dist[i, j] = dist[j, i] = dij
            path = [end]
            node = end
            while pred[node] >= 0:
                node = int(pred[node])
                path.append(node)
            path.reverse()  # starts in component i, ends in component j
            paths[(i, j)] = np.array(path, dtype=np.intp)
    return GeodesicTable(dist, paths)


def path_edges(
    grid: Grid2D, path: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Consecutive (a, b, length) edge arrays of a flat-index node path."""
    a = path[:-1]
    b = path[1:]
    dx = (b % grid.nx - a % grid.nx) * grid.hx
    dy = (b // grid.nx - a // grid.nx) * grid.hy
    return a, b, np.hypot(dx, dy)


def path_weight(u: ScalarField, p: ProfileParams, path: np.ndarray) -> float:
    """Accumulated weight of a stored path under the current field."""
    a, b, ln = path_edges(u.grid, path)
    f = weight_profile(u.values, p).ravel()
    return float(np.sum(ln * 0.5 * (f[a] + f[b])))


def connectedness_energy(
    u: ScalarField, p: ProfileParams
) -> tuple[float, GeodesicTable, ComponentLabeling]:
    """Sum over component pairs of mass_i * mass_j * distance (both orders)."""
    labeling = label_components(u, p)
    if labeling.count <= 1:
        k = labeling.count
        return 0.0, GeodesicTable(np.zeros((k, k)), {}), labeling
    table = pairwise_geodesics(build_weighted_graph(u, p), labeling)
    energy = float(labeling.masses @ table.dist @ labeling.masses)
    return energy, table, labeling


def connectedness_gradient(
    u: ScalarField,
    p: ProfileParams,
    t: GeodesicTable,
    c: ComponentLabeling,
) -> ScalarField:
    """Subgradient of the component-pair penalty.

    Mass term: a node of component i contributes through its beta-mass,
    weighted by 2 * sum_j mass_j * dist_ij.  Path term: each pair's realizing
    geodesic carries the variation of its distance, distributed on path nodes
    via F'(u) and converted to an L2 density by the nodal quadrature weight.
    """
    if t.count != c.count:
        raise ConsistencyError(
            f"geodesic table has {t.count} components, labeling has {c.count}"
        )
    g = u.grid
    grad = np.zeros(g.num_nodes)
    if c.count <= 1:
        return ScalarField(g, grad.reshape(g.shape))
    vals = u.values.ravel()
    w = g.node_weights().ravel()

    mass_factor = 2.0 * (t.dist @ c.masses)  # per component: 2 sum_j B_j D_ij
    labels = c.labels.ravel()
    inside = labels > 0
    grad[inside] = beta_prime(vals[inside], p) * mass_factor[labels[inside] - 1]

    fprime = weight_prime(vals, p)
    path_acc = np.zeros(g.num_nodes)
    for (i, j), path in sorted(t.paths.items()):
        a, b, ln = path_edges(g, path)
        pair_w = 2.0 * c.masses[i] * c.masses[j]
        np.add.at(path_acc, a, pair_w * 0.5 * ln * fprime[a])
        np.add.at(path_acc, b, pair_w * 0.5 * ln * fprime[b])
    grad += path_acc / w
    return ScalarField(g, grad.reshape(g.shape))


def complement_labeling(
    u: ScalarField, p: ProfileParams, merge_boundary: bool = True
) -> ComponentLabeling:
    """Components of the low phase {1 - u > 1 - alpha}, i.e. {u < alpha}.

    With ``merge_boundary`` all components touching the domain boundary are
    merged into one: under zero boundary conditions the exterior connects
    them through the boundary of the domain.
    """
    v = 1.0 - u.values
    mask = v > p.threshold
    labels, count = ndimage.label(mask, structure=FOUR_CONNECTED)
    if merge_boundary and count > 0:
        border = np.unique(
            np.concatenate(
                [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
            )
        )
        border = border[border > 0]
        if border.size > 1:
            remap = np.arange(count + 1)
            remap[border] = border[0]
            # compress to consecutive labels 1..count'
            kept = np.unique(remap[1:])
            final = np.zeros(count + 1, dtype=np.intp)
            final[kept] = np.arange(1, kept.size + 1)
            labels = final[remap[labels]]
            count = kept.size
    masses = component_masses(
        labels, count, beta_profile(v, p), u.grid.node_weights()
    )
    return ComponentLabeling(u.grid, labels, count, masses)


def complement_connectedness_energy(
    u: ScalarField, p: ProfileParams, merge_boundary: bool = True
) -> tuple[float, GeodesicTable, ComponentLabeling]:
    """Connectedness penalty of the reflected field 1 - u (low-phase term)."""
    v = ScalarField(u.grid, 1.0 - u.values)
    labeling = complement_labeling(u, p, merge_boundary=merge_boundary)
    if labeling.count <= 1:
        k = labeling.count
        return 0.0, GeodesicTable(np.zeros((k, k)), {}), labeling
    table = pairwise_geodesics(build_weighted_graph(v, p), labeling)
    energy = float(labeling.masses @ table.dist @ labeling.masses)
    return energy, table, labeling


def complement_connectedness_gradient(
    u: ScalarField,
    p: ProfileParams,
    t: GeodesicTable,
    c: ComponentLabeling,
) -> ScalarField:
    """Gradient of the low-phase penalty with respect to u (chain rule sign)."""
    v = ScalarField(u.grid, 1.0 - u.values)
    gv = connectedness_gradient(v, p, t, c)
    return ScalarField(u.grid, -gv.values)


def simply_connected_energy(
    u: ScalarField, p: ProfileParams
) -> tuple[float, float, float]:
    """(total, high-phase term, low-phase term) of the simple-connectedness penalty."""
    c1, _, _ = connectedness_energy(u, p)
    c2, _, _ = complement_connectedness_energy(u, p)
    return c1 + c2, c1, c2


def geodesic_table_csv(t: GeodesicTable) -> str:
    """CSV rows 'i,j,distance,path_nodes' for every component pair."""
    buf = io.StringIO()
    buf.write("i,j,distance,path_nodes\n")
    for (i, j), path in sorted(t.paths.items()):
        buf.write(f"{i},{j},{t.dist[i, j]:.17g},{len(path)}\n")
    return buf.getvalue()
