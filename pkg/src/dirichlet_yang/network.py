"""Finite weighted networks and their pi-weighted calculus.

A :class:`HostNetwork` stores a finite host vertex set together with a
designated interior ``Omega``.  Vertex weights ``pi`` are stored explicitly,
so vertices on the boundary of the host keep their true weight even though
some of their edges are truncated away.  Only interior rows of the Laplacian
are exact; every operation that returns per-vertex data returns interior rows
unless asked otherwise.

Conventions
-----------
* Everything named ``gamma2`` returns *twice* the carre du champ,
  ``2 Gamma(f, g)(x) = sum_y P(x, y) (f(x) - f(y)) (g(x) - g(y))``.
* Energies and the quartic functional sum over ordered pairs ``(x, y)``, so
  every undirected edge contributes twice.  Self-loops contribute to ``pi``
  and ``P(x, x)`` but never to a difference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError

_PI_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HostNetwork:
    """Finite host network with an interior.

    ``edges`` holds each undirected edge once as ``(i, j)`` with ``i <= j``;
    ``conductance`` is aligned with it.  Build instances with
    :meth:`from_edges` so the invariants are checked.
    """

    n_vertices: int
    pi: np.ndarray
    edges: np.ndarray
    conductance: np.ndarray
    interior: np.ndarray
    # ordered-pair view, derived
    src: np.ndarray = field(init=False, repr=False)
    dst: np.ndarray = field(init=False, repr=False)
    weight: np.ndarray = field(init=False, repr=False)
    interior_mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        i, j = self.edges[:, 0], self.edges[:, 1]
        off = i != j
        src = np.concatenate([i, j[off]])
        dst = np.concatenate([j, i[off]])
        w = np.concatenate([self.conductance, self.conductance[off]])
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.interior] = True
        object.__setattr__(self, "src", _frozen(src))
        object.__setattr__(self, "dst", _frozen(dst))
        object.__setattr__(self, "weight", _frozen(w))
        object.__setattr__(self, "interior_mask", _frozen(mask))

    @classmethod
    def from_edges(cls, n_vertices, pi, edges, interior) -> "HostNetwork":
        """Validate and build a network.

        ``edges`` is an iterable of ``(i, j, c)``; each unordered pair may
        appear once.  ``pi`` must equal the stored row sum on the interior
        and dominate it elsewhere.
        """
        n = int(n_vertices)
        if n < 1:
            raise DomainError("network needs at least one vertex")
        pi = np.asarray(pi, dtype=np.float64).reshape(-1)
        if pi.shape != (n,):
            raise DomainError(f"pi has length {pi.size}, expected {n}")
        if not np.all(np.isfinite(pi)) or np.any(pi <= 0):
            raise DomainError("pi must be finite and positive")

        seen = set()
        ij, cs = [], []
        for e in edges:
            a, b, c = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= a < n and 0 <= b < n):
                raise DomainError(f"edge ({a}, {b}) references an unknown vertex")
            if not np.isfinite(c) or c < 0:
                raise DomainError(f"conductance on ({a}, {b}) must be finite and >= 0")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise DomainError(f"edge {key} listed twice")
            seen.add(key)
            if c > 0:
                ij.append(key)
                cs.append(c)
        order = sorted(range(len(ij)), key=lambda t: ij[t])
        edge_arr = np.array([ij[t] for t in order], dtype=np.int64).reshape(-1, 2)
        c_arr = np.array([cs[t] for t in order], dtype=np.float64)

        interior = np.unique(np.asarray(list(interior), dtype=np.int64))
        if interior.size == 0:
            raise DomainError("interior is empty")
        if interior[0] < 0 or interior[-1] >= n:
            raise DomainError("interior references an unknown vertex")

        net = cls(n, _frozen(pi), _frozen(edge_arr), _frozen(c_arr), _frozen(interior))
        net._validate()
        return net

    def _validate(self):
        rows = np.bincount(self.src, weights=self.weight, minlength=self.n_vertices)
        tol = _PI_RTOL * np.maximum(1.0, self.pi)
        bad = self.interior[np.abs(rows[self.interior] - self.pi[self.interior]) > tol[self.interior]]
        if bad.size:
            raise DomainError(
                f"interior vertex {int(bad[0])}: pi={self.pi[bad[0]]!r} differs from "
                f"its conductance sum {rows[bad[0]]!r}"
            )
        under = np.flatnonzero(rows > self.pi + tol)
        if under.size:
            raise DomainError(f"vertex {int(under[0])}: stored conductances exceed pi")

        # every interior component must leak to the boundary
        inner = self.interior_mask[self.src] & self.interior_mask[self.dst]
        pos = np.full(self.n_vertices, -1, dtype=np.int64)
        pos[self.interior] = np.arange(self.interior.size)
        m = self.interior.size
        a, b = pos[self.src[inner]], pos[self.dst[inner]]
        graph = coo_matrix((np.ones(a.size), (a, b)), shape=(m, m))
        ncomp, labels = connected_components(graph, directed=False)
        leaking = self.interior_mask[self.src] & ~self.interior_mask[self.dst]
        has_exit = np.zeros(ncomp, dtype=bool)
        has_exit[labels[pos[self.src[leaking]]]] = True
        if not has_exit.all():
            comp = int(np.flatnonzero(~has_exit)[0])
            v = int(self.interior[np.flatnonzero(labels == comp)[0]])
            raise DomainError(f"interior component containing vertex {v} has no edge leaving the interior")

    @property
    def n_interior(self) -> int:
        return int(self.interior.size)

    def conductance_of(self, i: int, j: int) -> float:
        self._check_vertex(i)
        self._check_vertex(j)
        a, b = min(i, j), max(i, j)
        hit = np.flatnonzero((self.edges[:, 0] == a) & (self.edges[:, 1] == b))
        return float(self.conductance[hit[0]]) if hit.size else 0.0

    def _check_vertex(self, i):
        if not (0 <= int(i) < self.n_vertices):
            raise DomainError(f"unknown vertex {i}")

    def extend(self, interior_values) -> np.ndarray:
        """Lift interior-aligned values to a host vector that vanishes elsewhere."""
        vals = np.asarray(interior_values, dtype=np.float64)
        out = np.zeros((self.n_vertices,) + vals.shape[1:])
        out[self.interior] = vals
        return out

    def with_interior(self, interior) -> "HostNetwork":
        return HostNetwork.from_edges(
            self.n_vertices, self.pi,
            [(int(a), int(b), float(c)) for (a, b), c in zip(self.edges, self.conductance)],
            interior,
        )

    # -- interchange -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "pi": [float(p) for p in self.pi],
            "edges": [[int(a), int(b), float(c)] for (a, b), c in zip(self.edges, self.conductance)],
            "interior": [int(v) for v in self.interior],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HostNetwork":
        try:
            return cls.from_edges(data["vertices"], data["pi"], data["edges"], data["interior"])
        except KeyError as exc:
            raise DomainError(f"network JSON is missing key {exc}") from None

    def dump(self, path, extra: dict | None = None):
        payload = self.to_json_dict()
        if extra:
            payload.update(extra)
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path) -> "HostNetwork":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Vector-valued function on host vertices, stored as an ``(N, m)`` array."""

    __test__ = False  # keep pytest from collecting this class

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] < 1:
            raise DomainError("test function values must have shape (N, m) with m >= 1")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def component(self, h: int) -> np.ndarray:
        return self.values[:, h]


# -- helpers ---------------------------------------------------------------

def _host_vector(net: HostNetwork, f) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (net.n_vertices,):
        raise DomainError(f"expected a host vector of length {net.n_vertices}, got shape {f.shape}")
    return f


def _host_field(net: HostNetwork, alpha) -> np.ndarray:
    if isinstance(alpha, TestFunction):
        a = alpha.values
    else:
        a = np.asarray(alpha, dtype=np.float64)
        if a.ndim == 1:
            a = a[:, None]
    if a.ndim != 2 or a.shape[0] != net.n_vertices:
        raise DomainError(f"test function must have one value per host vertex ({net.n_vertices})")
    return a


def _rows(net: HostNetwork, per_edge: np.ndarray, on_host: bool) -> np.ndarray:
    """Sum ordered-pair terms by source vertex, divide by pi."""
    if per_edge.ndim == 1:
        acc = np.bincount(net.src, weights=per_edge, minlength=net.n_vertices)
    else:
        acc = np.zeros((net.n_vertices, per_edge.shape[1]))
        np.add.at(acc, net.src, per_edge)
    pi = net.pi if acc.ndim == 1 else net.pi[:, None]
    out = acc / pi
    return out if on_host else out[net.interior]


# -- scalar operations -----------------------------------------------------

def transition(net: HostNetwork, i: int, j: int) -> float:
    """``P(i, j) = c(i, j) / pi(i)``."""
    return net.conductance_of(i, j) / float(net.pi[i])


def laplacian_apply(net: HostNetwork, f) -> np.ndarray:
    """``(Delta f)(x) = sum_y P(x, y) (f(x) - f(y))`` on interior rows."""
    f = _host_vector(net, f)
    return _rows(net, net.weight * (f[net.src] - f[net.dst]), False)


def inner_product(net: HostNetwork, f, g) -> float:
    """``<f, g>_pi`` over the host.  Accepts host vectors or ``(N, m)`` fields."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape[0] != net.n_vertices or g.shape[0] != net.n_vertices:
        raise DomainError("inner product arguments must be defined on the host")
    prod = f * g
    if prod.ndim > 1:
        prod = prod.reshape(net.n_vertices, -1).sum(axis=1)
    return float(np.dot(net.pi, prod))


def dirichlet_energy(net: HostNetwork, f, g=None) -> float:
    """``E(f, g) = sum_{x,y} c(x, y) (f(x) - f(y)) (g(x) - g(y))`` over ordered pairs."""
    f = _host_vector(net, f)
    g = f if g is None else _host_vector(net, g)
    return float(np.dot(net.weight, (f[net.src] - f[net.dst]) * (g[net.src] - g[net.dst])))


def gamma2(net: HostNetwork, f, g=None, on_host: bool = False) -> np.ndarray:
    """Twice the carre du champ, ``2 Gamma(f, g)``, on interior rows.

    With ``on_host=True`` every host row is returned.  Boundary rows are then
    exact only when one argument vanishes off the interior, since truncated
    edges never reach the interior.
    """
    f = _host_vector(net, f)
    g = f if g is None else _host_vector(net, g)
    df = f[net.src] - f[net.dst]
    dg = g[net.src] - g[net.dst]
    return _rows(net, net.weight * df * dg, on_host)


def lambda_functional(net: HostNetwork, f, g) -> float:
    """``Lambda(f, g) = 1/4 sum_{x,y} c(x, y) |f(x)-f(y)|^2 |g(x)-g(y)|^2``."""
    f = _host_vector(net, f)
    g = _host_vector(net, g)
    df = f[net.src] - f[net.dst]
    dg = g[net.src] - g[net.dst]
    return 0.25 * float(np.dot(net.weight * (dg * dg), df * df))


# -- vector-valued operations ---------------------------------------------

def laplacian_vec(net: HostNetwork, alpha) -> np.ndarray:
    """Componentwise Laplacian of an ``R^m``-valued function, shape ``(n_interior, m)``."""
    a = _host_field(net, alpha)
    return _rows(net, net.weight[:, None] * (a[net.src] - a[net.dst]), False)


def gamma2_vec(net: HostNetwork, alpha, u, on_host: bool = False) -> np.ndarray:
    """``2 Gamma(alpha, u)(x) = sum_y P(x,y) (u(x)-u(y)) (alpha(x)-alpha(y))`` in ``R^m``."""
    a = _host_field(net, alpha)
    u = _host_vector(net, u)
    du = u[net.src] - u[net.dst]
    return _rows(net, net.weight[:, None] * (a[net.src] - a[net.dst]) * du[:, None], on_host)


def gamma2_norm(net: HostNetwork, alpha) -> np.ndarray:
    """``2 Gamma(alpha)(x) = sum_y P(x, y) ||alpha(x) - alpha(y)||^2`` on interior rows."""
    a = _host_field(net, alpha)
    da = a[net.src] - a[net.dst]
    return _rows(net, np.einsum("ij,ij->i", net.weight[:, None] * da, da), False)


def lambda_vec(net: HostNetwork, alpha, u) -> float:
    """``1/4 sum_{x,y} c(x,y) |u(x)-u(y)|^2 ||alpha(x)-alpha(y)||^2``."""
    a = _host_field(net, alpha)
    u = _host_vector(net, u)
    du = u[net.src] - u[net.dst]
    da = a[net.src] - a[net.dst]
    return 0.25 * float(np.dot(net.weight * (du * du), np.einsum("ij,ij->i", da, da)))


def self_loop_mass(net: HostNetwork) -> float:
    """``sum_{x in Omega} P(x, x)``."""
    loops = net.edges[:, 0] == net.edges[:, 1]
    v = net.edges[loops, 0]
    keep = net.interior_mask[v]
    return float(np.sum(net.conductance[loops][keep] / net.pi[v[keep]]))
