"""Both sides of the universal eigenvalue inequalities, evaluated on a Dirichlet system.

Every checker returns an :class:`InequalityReport` whose ``slack`` is
``rhs - lhs``; an inequality holds when ``slack >= -TOL``.  Corollaries with
hypotheses report ``hypothesis_ok=False`` when the gate is closed, and such
rows are never counted as failures.

Indices follow the usual 1-based notation: ``k`` ranges over ``1 .. n-1`` and
``lambda_{k+1}`` is ``eigenvalues[k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .eigensolve import DirichletSystem
from .errors import DomainError
from .network import HostNetwork, TestFunction, gamma2_norm, laplacian_vec, self_loop_mass

TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    name: str
    k: int
    lhs: float
    rhs: float
    slack: float
    hypothesis_ok: bool
    constants: dict = field(default_factory=dict)
    passed: bool = True


def _report(name, k, lhs, rhs, hypothesis_ok=True, constants=None, tol=TOL) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    passed = (not hypothesis_ok) or slack >= -tol
    return InequalityReport(name, k, lhs, rhs, slack, bool(hypothesis_ok), dict(constants or {}), bool(passed))


def _split(system: DirichletSystem, k: int):
    n = system.interior_size
    if not (1 <= k < n):
        raise DomainError(f"k={k} outside 1..{n - 1}")
    lam = system.eigenvalues
    return lam[:k], float(lam[k])


# -- main bound ------------------------------------------------------------

@dataclass(frozen=True)
class MainBoundTerms:
    """Per-eigenvector ingredients, index ``i - 1`` for ``u_i``.

    ``gamma``: ``<Gamma(alpha), u_i^2>``; ``lam``: ``Lambda(alpha, u_i)``;
    ``defect``: ``||u_i Delta alpha - 2 Gamma(alpha, u_i)||^2``.
    """

    gamma: np.ndarray
    lam: np.ndarray
    defect: np.ndarray


def _field(net: HostNetwork, alpha) -> np.ndarray:
    a = alpha.values if isinstance(alpha, TestFunction) else np.asarray(alpha, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] != net.n_vertices:
        raise DomainError("test function must be defined on every host vertex")
    return a


def _source_sum(net: HostNetwork, per_edge: np.ndarray) -> csr_matrix:
    """Sparse ``(N, E)`` operator summing ordered-pair terms into their source row over ``pi``."""
    e = net.src.size
    return csr_matrix((per_edge / net.pi[net.src], (net.src, np.arange(e))), shape=(net.n_vertices, e))


def main_bound_terms(net: HostNetwork, system: DirichletSystem, alpha) -> MainBoundTerms:
    a = _field(net, alpha)
    u = system.eigenvectors
    du = u[net.src] - u[net.dst]
    da = a[net.src] - a[net.dst]
    da2 = np.einsum("ij,ij->i", da, da)

    half_gamma = net.extend(0.5 * gamma2_norm(net, a))
    pi = net.pi
    gamma = (pi * half_gamma) @ (u * u)
    lam = 0.25 * ((net.weight * da2) @ (du * du))

    lap = net.extend(laplacian_vec(net, a))
    defect = np.zeros(u.shape[1])
    for h in range(a.shape[1]):
        g2 = _source_sum(net, net.weight * da[:, h]) @ du  # 2 Gamma(alpha_h, u_i) on host rows
        v = u * lap[:, h][:, None] - g2
        defect += pi @ (v * v)
    return MainBoundTerms(gamma, lam, defect)


def main_bound(net: HostNetwork, system: DirichletSystem, alpha, k: int,
               terms: MainBoundTerms | None = None) -> InequalityReport:
    """The unconditional estimate valid for every network and every test function.

    ``lhs = sum_i (l_{k+1} - l_i)^2 (<Gamma(alpha), u_i^2> - Lambda(alpha, u_i))``,
    ``rhs = sum_i (l_{k+1} - l_i) ||u_i Delta alpha - 2 Gamma(alpha, u_i)||^2``.
    """
    lam_k, nxt = _split(system, k)
    t = terms if terms is not None else main_bound_terms(net, system, alpha)
    gap = nxt - lam_k
    lhs = np.sum(gap * gap * (t.gamma[:k] - t.lam[:k]))
    rhs = np.sum(gap * t.defect[:k])
    return _report("main-bound", k, lhs, rhs, True, {"dim": int(_field(net, alpha).shape[1])})


# -- proof identities ------------------------------------------------------

@dataclass(frozen=True)
class ProofScratch:
    """Proof-internal quantities, one slice per value-space component ``h``.

    Arrays have a leading axis of length ``m``.  ``errors`` maps each checked
    identity to the largest deviation found; ``variational`` is the smallest
    ``<Delta phi_i, phi_i> - lambda_{k+1} ||phi_i||^2`` (must be >= 0).
    """

    k: int
    a: np.ndarray
    b: np.ndarray
    z: np.ndarray
    y: np.ndarray
    w: np.ndarray
    phi_norms: np.ndarray
    errors: dict
    variational: float

    TOLERANCES = {
        "a_symmetry": 1e-10,
        "b_relation": 1e-9,
        "b_antisymmetry": 1e-9,
        "z_plus_y": 1e-9,
        "phi_orthogonality": 1e-10,
        "alpha_i_norm": 1e-9,
        "w_identity": 1e-9,
    }

    def failures(self) -> list:
        bad = [name for name, tol in self.TOLERANCES.items() if not self.errors[name] <= tol]
        if not self.variational >= -TOL:
            bad.append("variational")
        return bad

    @property
    def passed(self) -> bool:
        return not self.failures()


def proof_identities_audit(net: HostNetwork, system: DirichletSystem, alpha, k: int) -> ProofScratch:
    """Recompute the quantities of the main-bound argument for one ``k`` and check their identities."""
    lam_k, nxt = _split(system, k)
    a_field = _field(net, alpha)
    m = a_field.shape[1]
    pi = net.pi
    uk = system.eigenvectors[:, :k]
    duk = uk[net.src] - uk[net.dst]
    lap = net.extend(laplacian_vec(net, a_field))
    gap_ij = lam_k[None, :] - lam_k[:, None]  # lambda_j - lambda_i

    A = np.zeros((m, k, k))
    B = np.zeros((m, k, k))
    Z = np.zeros((m, k))
    Y = np.zeros((m, k))
    W = np.zeros((m, k))
    PHI = np.zeros((m, k))
    err = dict.fromkeys(ProofScratch.TOLERANCES, 0.0)
    variational = math.inf

    for h in range(m):
        al = a_field[:, h]
        dal = al[net.src] - al[net.dst]
        ua = uk * al[:, None]
        a = ua.T @ (pi[:, None] * uk)
        phi = ua - uk @ a.T
        g2 = _source_sum(net, net.weight * dal) @ duk
        alpha_i = uk * lap[:, h][:, None] - g2
        b = alpha_i.T @ (pi[:, None] * uk)
        w = np.einsum("x,xi,xi->i", pi, alpha_i, phi)
        z = np.einsum("x,xi,xi->i", pi, alpha_i, ua)
        y = 0.25 * ((net.weight * dal * dal) @ (duk * duk))
        gam = (pi * net.extend(0.5 * gamma2_norm(net, al))) @ (uk * uk)

        resid = alpha_i - uk @ b.T
        norm_lhs = pi @ (resid * resid)
        norm_rhs = pi @ (alpha_i * alpha_i) - np.sum(b * b, axis=1)
        phi_sq = pi @ (phi * phi)
        dphi = phi[net.src] - phi[net.dst]
        energy_half = 0.5 * (net.weight @ (dphi * dphi))  # <Delta phi, phi> for interior-supported phi

        err["a_symmetry"] = max(err["a_symmetry"], np.max(np.abs(a - a.T)))
        err["b_relation"] = max(err["b_relation"], np.max(np.abs(b - gap_ij * a)))
        err["b_antisymmetry"] = max(err["b_antisymmetry"], np.max(np.abs(b + b.T)))
        err["z_plus_y"] = max(err["z_plus_y"], np.max(np.abs(z + y - gam)))
        err["phi_orthogonality"] = max(err["phi_orthogonality"],
                                       np.max(np.abs(phi.T @ (pi[:, None] * uk))))
        err["alpha_i_norm"] = max(err["alpha_i_norm"], np.max(np.abs(norm_lhs - norm_rhs)))
        err["w_identity"] = max(err["w_identity"],
                                np.max(np.abs(w - z - np.sum(-gap_ij * a * a, axis=1))))
        variational = min(variational, float(np.min(energy_half - nxt * phi_sq)))

        A[h], B[h], Z[h], Y[h], W[h], PHI[h] = a, b, z, y, w, phi_sq

    return ProofScratch(k, A, B, Z, Y, W, PHI, {key: float(v) for key, v in err.items()}, variational)


# -- Yang and Yang-type ----------------------------------------------------

def yang_check(system: DirichletSystem, C_Y: float, k: int) -> InequalityReport:
    lam, nxt = _split(system, k)
    gap = nxt - lam
    lhs = np.sum(gap * gap)
    rhs = C_Y * np.sum(gap * (lam - system.lambda_min))
    return _report("yang", k, lhs, rhs, True, {"C_Y": C_Y, "lambda_min": system.lambda_min})


def yang_type_check(system: DirichletSystem, C_YT: float, k: int) -> InequalityReport:
    lam, nxt = _split(system, k)
    gap = nxt - lam
    lhs = np.sum(gap * gap * (1.0 - lam))
    rhs = C_YT * np.sum(gap * (lam - system.lambda_min))
    return _report("yang-type", k, lhs, rhs, True, {"C_YT": C_YT, "lambda_min": system.lambda_min})


def abelian_quotient_check(system: DirichletSystem, epsilon: float, mu_max: float, k: int) -> InequalityReport:
    """Yang-type bound with an ``epsilon`` defect for groups mapping onto ``Z^n``."""
    lam, nxt = _split(system, k)
    gap = nxt - lam
    lhs = np.sum(gap * gap * (1.0 - epsilon - lam))
    rhs = 8.0 * mu_max * np.sum(gap * lam)
    return _report("abelian-quotient", k, lhs, rhs, True, {"epsilon": epsilon, "mu_max": mu_max})


def implication_check(system: DirichletSystem, C_YT: float, k: int) -> InequalityReport:
    """Yang's inequality with ``C_YT + 2``, asserted only where the Yang-type one holds and ``lambda_min = 0``."""
    premise = yang_type_check(system, C_YT, k)
    gated = system.lambda_min == 0.0 and premise.passed
    r = yang_check(system, C_YT + 2.0, k)
    return _report("implication", k, r.lhs, r.rhs, gated, {"C_YT": C_YT, "C_Y": C_YT + 2.0})


# -- corollaries -----------------------------------------------------------

def lambda2_bound(system: DirichletSystem, C_YT: float) -> InequalityReport:
    lam = system.eigenvalues
    if lam.size < 2:
        raise DomainError("lambda2_bound needs at least two eigenvalues")
    lmin = system.lambda_min
    l1, l2 = float(lam[0]), float(lam[1])
    ok = l1 < 1.0
    rhs = (C_YT / (1.0 - l1) + 1.0) * (l1 - lmin) if ok else math.nan
    return _report("lambda2", 1, l2 - lmin, rhs, ok, {"C_YT": C_YT, "lambda_min": lmin})


def yang_second_bound(system: DirichletSystem, C_YT: float, k: int) -> InequalityReport:
    lam, nxt = _split(system, k)
    lmin = system.lambda_min
    denom = float(np.sum(1.0 - lam))
    ok = lam[-1] <= 1.0 + C_YT and denom > 0
    rhs = float(np.sum((lam - lmin) * (1.0 + C_YT - lam))) / denom if ok else math.nan
    return _report("yang-second", k, nxt - lmin, rhs, ok, {"C_YT": C_YT, "lambda_min": lmin})


def hile_protter_check(system: DirichletSystem, C_YT: float, k: int) -> InequalityReport:
    """``sum_i mu_i / (l_{k+1} - l_i) >= (1/C_YT) sum_i (1 - l_i)``, reported as ``lhs <= rhs``
    with the eigenvalue sum on the right.  A zero gap makes the sum ``+inf``.
    """
    lam, nxt = _split(system, k)
    lmin = system.lambda_min
    ok = lam[-1] <= 1.0 + C_YT
    gap = nxt - lam
    mu = lam - lmin
    if np.any(gap <= 0):
        total = math.inf
    else:
        total = float(np.sum(mu / gap))
    lhs = float(np.sum(1.0 - lam)) / C_YT
    return _report("hile-protter", k, lhs, total, ok, {"C_YT": C_YT, "lambda_min": lmin})


def ppw_bound(system: DirichletSystem, C_YT: float, k: int) -> InequalityReport:
    lam, nxt = _split(system, k)
    lmin = system.lambda_min
    denom = float(np.sum(1.0 - lam))
    ok = lam[-1] <= 1.0 + C_YT and denom > 0
    rhs = C_YT * float(np.sum(lam - lmin)) / denom if ok else math.nan
    return _report("ppw", k, nxt - float(lam[-1]), rhs, ok, {"C_YT": C_YT, "lambda_min": lmin})


def ratio_bound(system: DirichletSystem, C_YT: float, delta: float, k: int) -> InequalityReport:
    """``l_{k+1} - l_min <= (1 + theta) k^(theta/2) (l_1 - l_min)`` with ``theta = C_YT / delta``."""
    lam, nxt = _split(system, k)
    lmin = system.lambda_min
    ok = delta > 0 and lam[-1] <= 1.0 - delta
    theta = C_YT / delta if delta > 0 else math.inf
    if ok:
        try:
            growth = math.pow(k, theta / 2.0)
        except OverflowError:
            growth = math.inf
        rhs = (1.0 + theta) * growth * (float(lam[0]) - lmin)
    else:
        rhs = math.nan
    return _report("ratio", k, nxt - lmin, rhs, ok,
                   {"C_YT": C_YT, "delta": delta, "theta": theta, "lambda_min": lmin})


def max_delta(system: DirichletSystem, k: int) -> float:
    """Largest ``delta`` with ``lambda_k <= 1 - delta`` in floating point; nonpositive when the gate is empty."""
    lam_k = float(system.eigenvalues[k - 1])
    delta = 1.0 - lam_k
    while 1.0 - delta < lam_k:
        delta = math.nextafter(delta, -math.inf)
    return delta


def trace_check(system: DirichletSystem, net: HostNetwork) -> InequalityReport:
    """``sum_i lambda_i = n - sum_{x in Omega} P(x, x)`` plus ``sum_{i<=k} (1 - lambda_i) >= 0``."""
    lam = system.eigenvalues
    n = lam.size
    loops = self_loop_mass(net)
    total = float(np.sum(lam))
    partial = float(np.min(np.cumsum(1.0 - lam)))
    r = _report("trace", n, total, n - loops, True,
                {"n": n, "loop_mass": loops, "min_partial_sum": partial})
    passed = abs(r.slack) <= TOL and total <= n + TOL and partial >= -TOL
    return InequalityReport(r.name, r.k, r.lhs, r.rhs, r.slack, True, r.constants, passed)


# -- recursion ---------------------------------------------------------------

@dataclass(frozen=True)
class RecursionState:
    """``A_k``, ``B_k`` and ``F_k = (1 + theta/2) A_k^2 - B_k`` for the prefix ``a_1..a_k``.

    ``hypothesis_ok`` records whether the quadratic hypothesis held on
    ``a_1..a_{k+1}``; ``step_ok`` whether ``F_{k+1} <= ((k+1)/k)^theta F_k``.
    Both are ``None`` for the last state.
    """

    k: int
    mean: float
    mean_sq: float
    F: float
    theta: float
    hypothesis_ok: bool | None = None
    step_ok: bool | None = None
    step_rhs: float | None = None


RECURSION_RTOL = 1e-12


def recursion_check(a, theta: float) -> list:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size < 1:
        raise DomainError("recursion_check needs a nonempty sequence")
    if not theta > 0:
        raise DomainError("theta must be positive")
    if np.any(a <= 0):
        raise DomainError("sequence must be positive")
    if np.any(np.diff(a) < 0):
        raise DomainError("sequence must be nondecreasing")

    csum = np.cumsum(a)
    csq = np.cumsum(a * a)
    ks = np.arange(1, a.size + 1)
    means = csum / ks
    mean_sq = csq / ks
    F = (1.0 + theta / 2.0) * means * means - mean_sq

    states = []
    for t in range(a.size):
        k = t + 1
        if k == a.size:
            states.append(RecursionState(k, float(means[t]), float(mean_sq[t]), float(F[t]), theta))
            break
        head, nxt = a[:k], a[k]
        hyp = float(np.sum((nxt - head) ** 2)) <= theta * float(np.sum(head * (nxt - head)))
        rhs = ((k + 1) / k) ** theta * float(F[t])
        lhs = float(F[t + 1])
        ok = lhs <= rhs + RECURSION_RTOL * max(abs(lhs), abs(rhs))
        states.append(RecursionState(k, float(means[t]), float(mean_sq[t]), float(F[t]), theta,
                                     bool(hyp), bool(ok), rhs))
    return states


def recursion_reports(states) -> list:
    """One report per step; the step is gated on the quadratic hypothesis."""
    out = []
    for s, nxt in zip(states, states[1:]):
        r = _report("recursion", s.k, nxt.F, s.step_rhs, s.hypothesis_ok, {"theta": s.theta})
        out.append(InequalityReport(r.name, r.k, r.lhs, r.rhs, r.slack, r.hypothesis_ok,
                                    r.constants, (not s.hypothesis_ok) or s.step_ok))
    return out
