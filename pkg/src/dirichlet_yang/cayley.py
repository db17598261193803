"""Balls in Cayley networks and their canonical test functions.

Three families are supported:

``zn``
    The free abelian group ``Z^n``; elements are integer tuples, generators
    are written ``s1 .. sn``.
``heisenberg``
    The discrete Heisenberg group as integer triples with product
    ``(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')``; generators ``x``, ``y``
    (the abelian directions) and the central ``z``.
``tree``
    The ``d``-regular tree with conductance ``1/d`` on every edge.  Vertices
    are child-index words from a fixed root; the root has ``d`` children and
    every other vertex ``d - 1``.

A group measure is given as a list of ``(word, probability)`` pairs, words
being formal products such as ``"s1^-1"`` or ``"x*y^2"``.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError
from .network import HostNetwork, TestFunction

DEFAULT_CAP = 20_000
FAMILIES = ("zn", "heisenberg", "tree")

_TOKEN = re.compile(r"^([A-Za-z]+\d*|1|e)(?:\^(-?\d+))?$")


def heisenberg_mul(g, h):
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


def heisenberg_inv(g):
    return (-g[0], -g[1], g[0] * g[1] - g[2])


def _identity(family, rank):
    if family == "tree":
        return ()
    return (0,) * (3 if family == "heisenberg" else rank)


def _mul(family, g, h):
    if family == "heisenberg":
        return heisenberg_mul(g, h)
    return tuple(a + b for a, b in zip(g, h))


def _inv(family, g):
    if family == "heisenberg":
        return heisenberg_inv(g)
    return tuple(-a for a in g)


def _generator(family, rank, name):
    if name in ("1", "e"):
        return _identity(family, rank)
    if family == "heisenberg":
        table = {"x": (1, 0, 0), "s1": (1, 0, 0), "y": (0, 1, 0), "s2": (0, 1, 0),
                 "z": (0, 0, 1), "k1": (0, 0, 1)}
        if name.lower() in table:
            return table[name.lower()]
    elif family == "zn":
        m = re.fullmatch(r"s(\d+)", name)
        if m and 1 <= int(m.group(1)) <= rank:
            e = [0] * rank
            e[int(m.group(1)) - 1] = 1
            return tuple(e)
    raise DomainError(f"unknown generator {name!r} for family {family}")


def parse_word(family: str, rank: int, word: str):
    """Evaluate a formal product such as ``"x*y^-1"`` to a canonical element."""
    if family not in ("zn", "heisenberg"):
        raise DomainError(f"words are not defined for family {family!r}")
    g = _identity(family, rank)
    tokens = [t for t in re.split(r"[\s*]+", word.strip()) if t]
    if not tokens:
        raise DomainError("empty word")
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise DomainError(f"cannot parse word token {tok!r}")
        base = _generator(family, rank, m.group(1))
        power = int(m.group(2) or 1)
        step = base if power >= 0 else _inv(family, base)
        for _ in range(abs(power)):
            g = _mul(family, g, step)
    return g


@dataclass(frozen=True)
class GroupSpec:
    """A group family plus, for Cayley families, a symmetric probability measure.

    ``measure`` maps canonical elements to probabilities; ``words`` keeps the
    spelling used on input so specs can be written back out.
    """

    family: str
    rank: int = 0  # n for zn, d for tree, 3 (triple length) for heisenberg
    measure: tuple = ()
    words: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if self.family == "tree":
            if self.rank < 3:
                raise DomainError("tree degree must be at least 3")
            if self.measure:
                raise DomainError("tree family takes no measure")
            return
        if self.family == "zn" and self.rank < 1:
            raise DomainError("zn rank must be at least 1")
        if not self.measure:
            raise DomainError("Cayley family needs a measure")
        probs = dict(self.measure)
        if len(probs) != len(self.measure):
            raise DomainError("measure lists the same group element twice")
        if any(not (p > 0) for p in probs.values()):
            raise DomainError("measure probabilities must be positive")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > 1e-15:
            raise DomainError(f"measure sums to {total!r}, not 1")
        for g, p in probs.items():
            q = probs.get(self.inverse(g))
            if q is None or abs(p - q) > 1e-15:
                raise DomainError(f"measure is not symmetric at {g}")
        if self.family == "heisenberg":
            allowed = {(0, 0, 0), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)}
            if not set(probs) <= allowed:
                raise DomainError("heisenberg measure must be supported on x, y, z and their inverses")

    # -- group structure --------------------------------------------------

    @property
    def identity(self):
        return _identity(self.family, self.rank)

    def mul(self, g, h):
        return _mul(self.family, g, h)

    def inverse(self, g):
        return _inv(self.family, g)

    def neighbors(self, x):
        """``(y, c(x, y))`` for every ``y`` with positive conductance, including ``x`` itself."""
        if self.family == "tree":
            d = self.rank
            out = [(x[:-1], 1.0 / d)] if x else []
            out.extend((x + (i,), 1.0 / d) for i in range(d if not x else d - 1))
            return out
        return [(self.mul(x, s), p) for s, p in self.measure]

    @property
    def support(self):
        return [s for s, _ in self.measure if s != self.identity]

    def parse_word(self, word: str):
        return parse_word(self.family, self.rank, word)

    @classmethod
    def from_words(cls, family: str, rank: int, measure) -> "GroupSpec":
        if family == "tree":
            if measure:
                raise DomainError("tree family takes no measure")
            return cls("tree", rank)
        elems = tuple((parse_word(family, rank, w), float(p)) for w, p in measure)
        return cls(family, rank, elems, tuple(w for w, _ in measure))

    @classmethod
    def from_json_dict(cls, data: dict) -> "GroupSpec":
        family = data.get("family")
        if family == "tree":
            return cls("tree", int(data["d"]))
        if family == "zn":
            n = int(data["n"])
            measure = data.get("measure") or uniform_words(n)
            return cls.from_words("zn", n, measure)
        if family == "heisenberg":
            measure = data.get("measure") or [["x", 0.25], ["x^-1", 0.25], ["y", 0.25], ["y^-1", 0.25]]
            return cls.from_words("heisenberg", 3, measure)
        raise DomainError(f"unknown family {family!r}")

    def to_json_dict(self) -> dict:
        if self.family == "tree":
            return {"family": "tree", "d": self.rank}
        out = {"family": self.family}
        if self.family == "zn":
            out["n"] = self.rank
        out["measure"] = [[w, p] for w, (_, p) in zip(self.words, self.measure)]
        return out

    def label(self) -> str:
        if self.family == "tree":
            return f"tree{self.rank}"
        if self.family == "zn":
            return f"z{self.rank}"
        return "heis"


def uniform_words(n: int):
    p = 1.0 / (2 * n)
    return [[f"s{j}{sign}", p] for j in range(1, n + 1) for sign in ("", "^-1")]


def parse_group(text: str) -> GroupSpec:
    """Parse ``tree:D``, ``zn:N``, ``heisenberg``, inline JSON or a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        return GroupSpec.from_json_dict(json.loads(text))
    m = re.fullmatch(r"tree:(\d+)", text)
    if m:
        return GroupSpec("tree", int(m.group(1)))
    m = re.fullmatch(r"zn:(\d+)", text)
    if m:
        n = int(m.group(1))
        return GroupSpec.from_words("zn", n, uniform_words(n))
    if text == "heisenberg":
        return GroupSpec.from_json_dict({"family": "heisenberg"})
    try:
        with open(text) as fh:
            return GroupSpec.from_json_dict(json.load(fh))
    except FileNotFoundError:
        raise DomainError(f"cannot interpret group {text!r}") from None


@dataclass(frozen=True, eq=False)
class BallNetwork:
    """A finite piece of a Cayley network: host network plus group elements.

    ``radius`` is ``None`` when the interior was given explicitly.
    """

    spec: GroupSpec
    host: HostNetwork
    elements: tuple
    radius: int | None
    origin: int | None
    index: dict = field(repr=False, default_factory=dict)

    def vertex(self, element) -> int:
        try:
            return self.index[tuple(element)]
        except KeyError:
            raise DomainError(f"{element} is not a host vertex") from None

    def sidecar(self) -> dict:
        return {"elements": [list(e) for e in self.elements], "radius": self.radius,
                "origin": self.origin, "group": self.spec.to_json_dict()}


def _assemble(spec: GroupSpec, interior, radius, cap) -> BallNetwork:
    elements = list(interior)
    index = {g: t for t, g in enumerate(elements)}
    if len(index) != len(elements):
        raise DomainError("interior lists an element twice")
    n_int = len(elements)
    for t in range(n_int):
        for y, _ in spec.neighbors(elements[t]):
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                if len(elements) > cap:
                    raise ResourceError(f"host exceeds the cap of {cap} vertices")
    edges = []
    for t, x in enumerate(elements):
        for y, c in spec.neighbors(x):
            s = index.get(y)
            if s is not None and t <= s:
                edges.append((t, s, c))
    host = HostNetwork.from_edges(len(elements), np.ones(len(elements)), edges, range(n_int))
    origin = index.get(spec.identity)
    return BallNetwork(spec, host, tuple(elements), radius, origin, index)


def build_ball(spec: GroupSpec, r: int, cap: int = DEFAULT_CAP) -> BallNetwork:
    """Interior = word-metric ball of radius ``r``; host = interior plus its neighbors.

    Vertices are numbered in breadth-first order from the identity.
    """
    if r < 0:
        raise DomainError("radius must be nonnegative")
    seen = {spec.identity}
    layer = [spec.identity]
    interior = [spec.identity]
    for _ in range(r):
        nxt = []
        for x in layer:
            for y, _ in spec.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise ResourceError(f"host exceeds the cap of {cap} vertices")
        interior.extend(nxt)
        layer = nxt
    return _assemble(spec, interior, r, cap)


def build_region(spec: GroupSpec, interior, cap: int = DEFAULT_CAP) -> BallNetwork:
    """Host network for an arbitrary finite interior set of group elements."""
    elems = [tuple(int(v) for v in g) for g in interior]
    if not elems:
        raise DomainError("interior is empty")
    return _assemble(spec, elems, None, cap)


def box(n: int, side: int):
    """Elements of ``{0, .., side-1}^n`` in lexicographic order."""
    grids = np.indices((side,) * n).reshape(n, -1).T
    return [tuple(int(v) for v in row) for row in grids]


def word_length(spec: GroupSpec, element, limit: int = 64) -> int:
    """Word-metric distance from the identity, by breadth-first search."""
    element = tuple(element)
    if spec.family == "tree":
        return len(element)
    seen = {spec.identity}
    frontier = deque([(spec.identity, 0)])
    while frontier:
        x, dist = frontier.popleft()
        if x == element:
            return dist
        if dist >= limit:
            break
        for y, _ in spec.neighbors(x):
            if y not in seen:
                seen.add(y)
                frontier.append((y, dist + 1))
    raise DomainError(f"{element} not reached within {limit} steps")


# -- analytic constants ----------------------------------------------------

def mu_star(spec: GroupSpec) -> float:
    """Smallest probability on a non-identity support element."""
    if spec.family == "tree":
        raise DomainError("mu_star is defined for Cayley families only")
    return min(p for s, p in spec.measure if s != spec.identity)


def lambda_min(spec: GroupSpec) -> float:
    """Bottom of the L^2 spectrum: 0 for the amenable families, ``1 - 2 sqrt(d-1)/d`` for trees."""
    if spec.family == "tree":
        d = spec.rank
        return 1.0 - 2.0 * math.sqrt(d - 1) / d
    return 0.0


def yang_constant(spec: GroupSpec) -> float:
    """``6 / mu_star``."""
    return 6.0 / mu_star(spec)


def tree_yang_type_constant(d: int) -> float:
    return 8.0 * math.sqrt(d - 1) / d


@dataclass(frozen=True)
class CocycleData:
    """Homomorphism onto ``Z^n`` for which the measure meets the abelian-quotient hypotheses."""

    dim: int
    epsilon: float
    mu_max: float


def _projection(spec: GroupSpec, g):
    return g[:2] if spec.family == "heisenberg" else g


def cocycle_data(spec: GroupSpec) -> CocycleData:
    """Check that each support element maps to 0 or to a signed standard basis vector.

    Each basis direction must be hit by exactly one support element (and its
    inverse); anything else is rejected.
    """
    if spec.family == "tree":
        raise DomainError("no homomorphism cocycle on the tree family")
    dim = 2 if spec.family == "heisenberg" else spec.rank
    basis = {}
    for s, p in spec.measure:
        v = _projection(spec, s)
        nz = [t for t, a in enumerate(v) if a != 0]
        if not nz:
            continue
        if len(nz) != 1 or abs(v[nz[0]]) != 1:
            raise DomainError(f"support element {s} maps to {v}, not a standard basis vector")
        if v[nz[0]] == 1:
            if nz[0] in basis:
                raise DomainError(f"two support elements map to basis vector e{nz[0] + 1}")
            basis[nz[0]] = p
    if len(basis) != dim:
        raise DomainError("measure does not reach every basis direction")
    epsilon = 1.0 - math.fsum(2.0 * p for p in basis.values())
    return CocycleData(dim, epsilon, max(basis.values()))


def default_constants(spec: GroupSpec) -> dict:
    """Default inequality constants for a family, keyed ``lambda_min``, ``C_Y``, ``C_YT`` and,
    when the abelian-quotient hypotheses hold, ``epsilon`` and ``mu_max``.

    For Cayley measures without an admissible cocycle, or with ``epsilon > 0``,
    ``C_YT`` falls back to ``C_Y``: with ``lambda_i >= 0`` every weight
    ``1 - lambda_i`` is at most 1, so Yang's inequality implies the Yang-type
    one with the same constant.
    """
    out = {"lambda_min": lambda_min(spec)}
    if spec.family == "tree":
        out["C_YT"] = tree_yang_type_constant(spec.rank)
        return out
    out["C_Y"] = yang_constant(spec)
    try:
        cd = cocycle_data(spec)
    except DomainError:
        cd = None
    if cd is not None:
        out["epsilon"] = cd.epsilon
        out["mu_max"] = cd.mu_max
    if cd is not None and cd.epsilon == 0.0:
        out["C_YT"] = 8.0 * cd.mu_max
    else:
        out["C_YT"] = out["C_Y"]
    return out


# -- test functions --------------------------------------------------------

def homomorphism_cocycle(ball: BallNetwork) -> TestFunction:
    """``alpha`` = identity on ``Z^n``, or ``(a, b, c) -> (a, b)`` on the Heisenberg group."""
    cd = cocycle_data(ball.spec)
    vals = np.array([_projection(ball.spec, g) for g in ball.elements], dtype=np.float64)
    return TestFunction(vals.reshape(len(ball.elements), cd.dim))


def _require_tree(ball: BallNetwork):
    if ball.spec.family != "tree":
        raise DomainError("Busemann functions are defined on the tree family only")


def busemann_value(word) -> int:
    """Busemann function for the ray of all-first-child vertices, normalised to 0 at the root."""
    lead = 0
    for c in word:
        if c != 0:
            break
        lead += 1
    return len(word) - 2 * lead


def busemann(ball: BallNetwork) -> TestFunction:
    _require_tree(ball)
    return TestFunction(np.array([busemann_value(w) for w in ball.elements], dtype=np.float64))


def tree_ground_state(ball: BallNetwork, xi: float) -> np.ndarray:
    """``f(x) = (xi / sqrt(d-1)) ** b(x)``, an eigenfunction of the infinite-tree Laplacian."""
    _require_tree(ball)
    if not xi > 0:
        raise DomainError("xi must be positive")
    base = xi / math.sqrt(ball.spec.rank - 1)
    b = busemann(ball).values[:, 0]
    return base ** b


def ground_state_eigenvalue(d: int, xi: float) -> float:
    return 1.0 - math.sqrt(d - 1) / d * (xi + 1.0 / xi)
