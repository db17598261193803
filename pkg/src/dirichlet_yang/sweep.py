"""Instances and checker sweeps shared by the CLI and the test-suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import inequalities as ineq
from .cayley import (BallNetwork, GroupSpec, box, build_ball, build_region, busemann,
                     default_constants, homomorphism_cocycle)
from .eigensolve import DirichletSystem, dirichlet_system
from .errors import DomainError
from .network import HostNetwork, TestFunction
from .randomnet import random_network, random_test_function

PER_K = ("main-bound", "yang", "yang-type", "abelian-quotient", "implication",
         "yang-second", "hile-protter", "ppw", "ratio")
SINGLE = ("lambda2", "trace", "recursion")
CHECKERS = ("main-bound", "trace", "yang", "yang-type", "abelian-quotient", "implication",
            "lambda2", "yang-second", "hile-protter", "ppw", "ratio", "recursion")
CASCADE = ("trace", "lambda2", "yang-second", "hile-protter", "ppw", "ratio", "recursion")


@dataclass(eq=False)
class Instance:
    instance_id: str
    net: HostNetwork
    system: DirichletSystem
    constants: dict
    alpha: TestFunction | None = None
    ball: BallNetwork | None = None
    _terms: object = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.system.interior_size

    def main_terms(self):
        if self._terms is None:
            if self.alpha is None:
                raise DomainError("main-bound needs a test function (--alpha)")
            self._terms = ineq.main_bound_terms(self.net, self.system, self.alpha)
        return self._terms


def make_alpha(kind: str, net: HostNetwork, ball: BallNetwork | None, seed: int) -> TestFunction:
    """``auto``, ``busemann``, ``cocycle``, ``coordinates`` or ``random:M``."""
    if kind.startswith("random"):
        _, _, dim = kind.partition(":")
        return random_test_function(net, int(dim or 1), seed)
    if ball is None:
        raise DomainError(f"test function {kind!r} needs a group instance")
    if kind == "auto":
        if ball.spec.family == "tree":
            return busemann(ball)
        try:
            return homomorphism_cocycle(ball)
        except DomainError:
            kind = "coordinates"
    if kind == "busemann":
        return busemann(ball)
    if kind == "cocycle":
        return homomorphism_cocycle(ball)
    if kind == "coordinates":
        if ball.spec.family == "tree":
            raise DomainError("tree vertices have no coordinates")
        width = 2 if ball.spec.family == "heisenberg" else ball.spec.rank
        return TestFunction(np.array([g[:width] for g in ball.elements], dtype=np.float64))
    raise DomainError(f"unknown test function {kind!r}")


def group_instance(spec: GroupSpec, radius: int | None = None, interior=None,
                   constants: dict | None = None, alpha: str = "auto", seed: int = 0,
                   instance_id: str | None = None) -> Instance:
    if interior is None:
        if radius is None:
            raise DomainError("give a radius or an explicit interior")
        ball = build_ball(spec, radius)
        default_id = f"{spec.label()}-r{radius}"
    else:
        ball = build_region(spec, interior)
        default_id = f"{spec.label()}-n{ball.host.n_interior}"
    consts = default_constants(spec)
    consts.update(constants or {})
    system = dirichlet_system(ball.host, consts["lambda_min"])
    return Instance(instance_id or default_id, ball.host, system, consts,
                    make_alpha(alpha, ball.host, ball, seed), ball)


def network_instance(net: HostNetwork, constants: dict | None = None, alpha: str | None = None,
                     seed: int = 0, instance_id: str = "network") -> Instance:
    consts = {"lambda_min": 0.0}
    consts.update(constants or {})
    system = dirichlet_system(net, consts["lambda_min"])
    tf = make_alpha(alpha, net, None, seed) if alpha else None
    return Instance(instance_id, net, system, consts, tf)


def random_instance(vertices: int, seed: int, density: float = 0.5, alpha: str = "random:1",
                    constants: dict | None = None) -> Instance:
    net = random_network(vertices, seed, density)
    return network_instance(net, constants, alpha, seed, f"random-v{vertices}-s{seed}")


def zn_interval(m: int) -> list:
    return box(1, m)


def _need(inst: Instance, key: str) -> float:
    if key not in inst.constants:
        raise DomainError(f"constant {key} is not known for instance {inst.instance_id}; pass --constant {key}=VALUE")
    return float(inst.constants[key])


def _theta(inst: Instance) -> float:
    for key in ("theta", "C_Y", "C_YT"):
        if key in inst.constants:
            return float(inst.constants[key])
    raise DomainError("recursion needs theta, C_Y or C_YT")


def run_check(inst: Instance, name: str, k: int):
    s = inst.system
    if name == "main-bound":
        return ineq.main_bound(inst.net, s, inst.alpha, k, inst.main_terms())
    if name == "yang":
        return ineq.yang_check(s, _need(inst, "C_Y"), k)
    if name == "yang-type":
        return ineq.yang_type_check(s, _need(inst, "C_YT"), k)
    if name == "abelian-quotient":
        return ineq.abelian_quotient_check(s, _need(inst, "epsilon"), _need(inst, "mu_max"), k)
    if name == "implication":
        return ineq.implication_check(s, _need(inst, "C_YT"), k)
    if name == "yang-second":
        return ineq.yang_second_bound(s, _need(inst, "C_YT"), k)
    if name == "hile-protter":
        return ineq.hile_protter_check(s, _need(inst, "C_YT"), k)
    if name == "ppw":
        return ineq.ppw_bound(s, _need(inst, "C_YT"), k)
    if name == "ratio":
        delta = float(inst.constants["delta"]) if "delta" in inst.constants else ineq.max_delta(s, k)
        return ineq.ratio_bound(s, _need(inst, "C_YT"), delta, k)
    raise DomainError(f"unknown checker {name!r}")


def run_checks(inst: Instance, names, ks=None) -> list:
    """Evaluate checkers over a k-range; output ordered by checker, then ``k``."""
    valid = range(1, inst.n)
    ks = list(valid) if ks is None else [k for k in ks if 1 <= k < inst.n]
    out = []
    for name in names:
        if name == "trace":
            out.append(ineq.trace_check(inst.system, inst.net))
        elif name == "lambda2":
            if inst.n >= 2:
                out.append(ineq.lambda2_bound(inst.system, _need(inst, "C_YT")))
        elif name == "recursion":
            a = inst.system.eigenvalues - inst.system.lambda_min
            states = ineq.recursion_check(a, _theta(inst))
            out.extend(r for r in ineq.recursion_reports(states) if r.k in ks)
        elif name in PER_K:
            out.extend(run_check(inst, name, k) for k in ks)
        else:
            raise DomainError(f"unknown checker {name!r}")
    return out


def default_checkers(inst: Instance) -> list:
    names = []
    if inst.alpha is not None:
        names.append("main-bound")
    names.append("trace")
    if "C_Y" in inst.constants:
        names.append("yang")
    if "C_YT" in inst.constants:
        names += ["yang-type", "lambda2", "yang-second", "hile-protter", "ppw", "ratio"]
        if inst.system.lambda_min == 0.0:
            names.append("implication")
    if "epsilon" in inst.constants and "mu_max" in inst.constants:
        names.append("abelian-quotient")
    if any(key in inst.constants for key in ("theta", "C_Y", "C_YT")):
        names.append("recursion")
    return names


def summarize(reports) -> tuple:
    """``(all_passed, line)``; only gated rows count."""
    gated = [r for r in reports if r.hypothesis_ok]
    bad = [r for r in gated if not r.passed]
    if not bad:
        return True, f"PASS {len(gated)}/{len(gated)}"
    worst = min(bad, key=lambda r: r.slack if not math.isnan(r.slack) else -math.inf)
    return False, (f"FAIL {len(gated) - len(bad)}/{len(gated)} "
                   f"(min slack {worst.slack!r} at k={worst.k}, {worst.name})")


BOUND_COLUMNS = ["k", "lambda_next", "lambda2_bound", "yang_second_bound", "ppw_bound",
                 "ratio_bound", "ratio_delta", "abelian_quotient_slack"]


def bounds_rows(inst: Instance):
    """Per-k upper bounds on ``lambda_{k+1}`` next to its actual value.

    Empty cells mark closed gates or missing constants.  Returns
    ``(rows, warnings)``.
    """
    s = inst.system
    lmin = s.lambda_min
    C = inst.constants.get("C_YT")
    rows, warnings = [], []
    any_ratio = False
    for k in range(1, inst.n):
        lam_next = float(s.eigenvalues[k])
        row = [k, lam_next, None, None, None, None, None, None]
        if C is not None:
            if k == 1:
                r = ineq.lambda2_bound(s, C)
                row[2] = lmin + r.rhs if r.hypothesis_ok else None
            r = ineq.yang_second_bound(s, C, k)
            row[3] = lmin + r.rhs if r.hypothesis_ok else None
            r = ineq.ppw_bound(s, C, k)
            row[4] = float(s.eigenvalues[k - 1]) + r.rhs if r.hypothesis_ok else None
            delta = float(inst.constants["delta"]) if "delta" in inst.constants else ineq.max_delta(s, k)
            r = ineq.ratio_bound(s, C, delta, k)
            if r.hypothesis_ok:
                row[5] = lmin + r.rhs
                row[6] = delta
                any_ratio = True
        if "epsilon" in inst.constants and "mu_max" in inst.constants:
            row[7] = ineq.abelian_quotient_check(s, inst.constants["epsilon"], inst.constants["mu_max"], k).slack
        rows.append(row)
    if C is None:
        warnings.append("no C_YT constant known: corollary bounds left empty")
    elif not any_ratio:
        warnings.append("ratio bound gate is empty for every k (delta too large or lambda_k > 1)")
    return rows, warnings


AUDIT_COLUMNS = ["instance_id", "k", *ineq.ProofScratch.TOLERANCES, "variational", "passed"]


def audit_rows(inst: Instance, ks=None):
    if inst.alpha is None:
        raise DomainError("audit needs a test function (--alpha)")
    ks = range(1, inst.n) if ks is None else [k for k in ks if 1 <= k < inst.n]
    rows = []
    for k in ks:
        sc = ineq.proof_identities_audit(inst.net, inst.system, inst.alpha, k)
        rows.append([inst.instance_id, k, *(sc.errors[key] for key in ineq.ProofScratch.TOLERANCES),
                     sc.variational, sc.passed])
    return rows
