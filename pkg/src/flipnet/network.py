"""Influence graphs and the closed-form risk propagation kernel.

A network is a directed weighted graph on N nodes. The weight w_mn is the
probability that a compromise at node m spills over to node n, so each row
of the weight matrix is a probability distribution (rows sum to 1) with a
zero diagonal. A global discount ratio eta in [0, 1) scales how strongly
risk propagates.

Risk levels solve the linear fixed point

    R_n = alpha_n + eta * sum_m w_mn R_m,

whose closed form is R = W* alpha with W* = (I - eta W^T)^-1. For
row-stochastic W the kernel's columns each sum to 1/(1 - eta), its entries
are nonnegative, and the diagonal entries are >= 1 (equal to 1 only when
eta = 0 or the node sits on no directed cycle).

eta = 1 is rejected: I - W^T is singular whenever W is row stochastic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# elementwise tolerance for kernel identities ((I - eta W^T) W* = I etc.)
STRUCTURAL_TOL = 1e-10
# slack allowed on the exact row-sum-1 validation rule
ROW_SUM_SLACK = 1e-12


@dataclass(frozen=True)
class NetworkSpec:
    """Directed influence graph: weights[m, n] = w_mn, plus the discount eta."""

    weights: np.ndarray
    eta: float
    node_ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if not self.node_ids:
            object.__setattr__(
                self, "node_ids", tuple(f"n{i}" for i in range(w.shape[0]))
            )

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class InfluenceKernel:
    """The matrix W* = (I - eta W^T)^-1; entries[n, m] = w*_nm."""

    entries: np.ndarray
    eta: float


def validate_network(spec: NetworkSpec) -> list[str]:
    """Check every NetworkSpec rule; return one message per violation.

    Never raises: an empty list means the spec is valid. Messages name the
    offending node or row so a CLI can surface them directly.
    """
    violations = []
    w = spec.weights
    ids = spec.node_ids

    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        violations.append(f"weights must be square, got shape {w.shape}")
        return violations
    n = w.shape[0]
    if len(ids) != n:
        violations.append(f"{len(ids)} node ids for {n} nodes")

    if not (0.0 <= spec.eta < 1.0):
        violations.append(
            f"eta = {spec.eta!r} outside [0, 1); eta = 1 makes I - eta W^T singular"
        )

    for i in range(n):
        if w[i, i] != 0.0:
            violations.append(f"node {ids[i]}: diagonal weight w_nn = {w[i, i]} (must be 0)")

    bad = (w < 0.0) | (w > 1.0)
    for i, j in zip(*np.nonzero(bad)):
        violations.append(f"edge {ids[i]}->{ids[j]}: weight {w[i, j]} outside [0, 1]")

    # Rows must each sum to 1; the all-zero matrix (unconnected network) is
    # the single permitted exception. Mixed zero/stochastic rows are invalid.
    if np.any(w != 0.0):
        sums = w.sum(axis=1)
        for i in range(n):
            if abs(sums[i] - 1.0) > ROW_SUM_SLACK:
                violations.append(f"row {ids[i]} sums to {sums[i]:.12g} (must be 1)")

    return violations


def compute_kernel(spec: NetworkSpec) -> InfluenceKernel:
    """Invert I - eta W^T by a dense direct solve.

    Raises ValueError when the spec fails validation; the networks this
    library accepts (N up to a few hundred) never need a sparse path.
    """
    violations = validate_network(spec)
    if violations:
        raise ValueError("invalid network: " + "; ".join(violations))
    n = spec.node_count
    a = np.eye(n) - spec.eta * spec.weights.T
    entries = np.linalg.solve(a, np.eye(n))
    return InfluenceKernel(entries=entries, eta=spec.eta)


def risk_levels(kernel: InfluenceKernel, alphas: np.ndarray) -> np.ndarray:
    """R_n = sum_m w*_nm alpha_m for a vector of controlling fractions."""
    alphas = np.asarray(alphas, dtype=float)
    n = kernel.entries.shape[0]
    if alphas.shape != (n,):
        raise ValueError(f"expected {n} alphas, got shape {alphas.shape}")
    return kernel.entries @ alphas


def network_from_json(source) -> NetworkSpec:
    """Build a NetworkSpec from the JSON graph format.

    Accepts a dict, a JSON string, or a path to a file holding
    {"eta": float, "nodes": [ids], "edges": [{"from", "to", "w"}]}.
    Edge (m -> n, w) sets w_mn; absent edges are 0.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            with open(text) as f:
                doc = json.load(f)

    for key in ("eta", "nodes", "edges"):
        if key not in doc:
            raise ValueError(f"network file missing key {key!r}")
    ids = [str(x) for x in doc["nodes"]]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids in network file")
    index = {node_id: i for i, node_id in enumerate(ids)}
    w = np.zeros((len(ids), len(ids)))
    for edge in doc["edges"]:
        try:
            m, n = index[str(edge["from"])], index[str(edge["to"])]
        except KeyError as exc:
            raise ValueError(f"edge references unknown node {exc.args[0]!r}") from None
        w[m, n] = float(edge["w"])
    return NetworkSpec(weights=w, eta=float(doc["eta"]), node_ids=tuple(ids))
