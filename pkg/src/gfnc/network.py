"""Gaussian fuzzy-neural network: rule base, evaluation, gradients, save/load.

The network is a three-layer structure: inputs pass through unchanged, each
hidden node fires with the product of per-input Gaussian memberships, and the
output is the firing-strength-weighted sum of the consequent weights.  The
Gaussian exponent uses sigma**2 in the denominator (not 2*sigma**2); any
constant factor is absorbed into the width assigned to new nodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


class NetworkFormatError(ValueError):
    """Raised when a serialized network document is malformed."""


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    return arr


@dataclass
class FuzzyNode:
    """One hidden-layer rule: center vector, width vector, consequent weight.

    Widths must be strictly positive and centers/widths must have equal
    length (the input dimension of the owning network).
    """

    m: np.ndarray
    sigma: np.ndarray
    xi: float

    def __post_init__(self):
        self.m = _as_vector(self.m, "m")
        self.sigma = _as_vector(self.sigma, "sigma")
        self.xi = float(self.xi)
        if self.m.shape != self.sigma.shape:
            raise ValueError(
                f"m and sigma must have equal length, got {self.m.size} and {self.sigma.size}"
            )
        if not np.all(self.sigma > 0.0):
            raise ValueError(f"sigma must be strictly positive, got {self.sigma}")

    @property
    def dim(self) -> int:
        return self.m.size


def node_activation(node: FuzzyNode, z) -> float:
    """Firing strength of one rule at input z: prod_i exp(-(z_i-m_i)^2 / sigma_i^2).

    Always in (0, 1], reaching 1 exactly when z == m elementwise.  Values
    below machine epsilon are kept as computed (no flush to zero).
    """
    z = _as_vector(z, "z")
    if z.size != node.dim:
        raise ValueError(f"input has length {z.size}, node expects {node.dim}")
    d = (z - node.m) / node.sigma
    return float(math.exp(-float(np.dot(d, d))))


@dataclass
class FnnNetwork:
    """Ordered rule base plus input dimension; the entire learnable controller.

    Node order is insertion order: growth appends, adaptation indexes by
    position.  Evaluation is pure; the owning simulation loop is the single
    writer for growth/adaptation.
    """

    n: int
    nodes: list[FuzzyNode] = field(default_factory=list)

    def __post_init__(self):
        if int(self.n) != self.n or self.n <= 0:
            raise ValueError(f"input dimension n must be a positive integer, got {self.n}")
        self.n = int(self.n)
        for idx, node in enumerate(self.nodes):
            if node.dim != self.n:
                raise ValueError(
                    f"nodes[{idx}] has dimension {node.dim}, network expects {self.n}"
                )

    @property
    def R(self) -> int:
        return len(self.nodes)

    def add_node(self, node: FuzzyNode) -> None:
        if node.dim != self.n:
            raise ValueError(f"node has dimension {node.dim}, network expects {self.n}")
        self.nodes.append(node)

    def evaluate(self, z) -> tuple[float, np.ndarray]:
        """Network output and per-node firing strengths at input z.

        Returns (u, gamma) with u = sum_k xi_k * gamma_k; an empty network
        yields u = 0 and an empty gamma vector.
        """
        z = _as_vector(z, "z")
        if z.size != self.n:
            raise ValueError(f"input has length {z.size}, network expects {self.n}")
        gamma = np.empty(len(self.nodes))
        u = 0.0
        for k, node in enumerate(self.nodes):
            d = (z - node.m) / node.sigma
            g = math.exp(-float(np.dot(d, d)))
            gamma[k] = g
            u += node.xi * g
        return u, gamma

    def output_gradients(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Analytic du/dxi_k (= gamma_k) and du/dm_ik for the output at z.

        du/dm_ik = xi_k * gamma_k * 2*(z_i - m_ik) / sigma_ik^2, the chain
        rule through the Gaussian firing strengths.
        """
        z = _as_vector(z, "z")
        _, gamma = self.evaluate(z)
        d_xi = gamma.copy()
        d_m = np.empty((len(self.nodes), self.n))
        for k, node in enumerate(self.nodes):
            d_m[k] = node.xi * gamma[k] * 2.0 * (z - node.m) / node.sigma**2
        return d_xi, d_m

    def copy(self) -> "FnnNetwork":
        return FnnNetwork(
            self.n,
            [FuzzyNode(node.m.copy(), node.sigma.copy(), node.xi) for node in self.nodes],
        )


def evaluate(network: FnnNetwork, z) -> tuple[float, np.ndarray]:
    """Module-level alias for FnnNetwork.evaluate."""
    return network.evaluate(z)


# --- save/load -------------------------------------------------------------
#
# Self-describing JSON document with fields `n`, `R` and per-node arrays
# `nodes[].m`, `nodes[].sigma`, `nodes[].xi`.  Reals keep full round-trip
# precision, so save -> load reproduces the network bit-exactly.


def serialize_network(network: FnnNetwork) -> str:
    doc = {
        "n": network.n,
        "R": network.R,
        "nodes": [
            {"m": node.m.tolist(), "sigma": node.sigma.tolist(), "xi": node.xi}
            for node in network.nodes
        ],
    }
    return json.dumps(doc, indent=2)


def _parse_real_vector(values, n: int, where: str) -> np.ndarray:
    if not isinstance(values, list):
        raise NetworkFormatError(f"{where}: expected an array, got {type(values).__name__}")
    if len(values) != n:
        raise NetworkFormatError(f"{where}: expected length {n}, got {len(values)}")
    out = np.empty(n)
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise NetworkFormatError(f"{where}[{i}]: expected a real, got {v!r}")
        if not math.isfinite(v):
            raise NetworkFormatError(f"{where}[{i}]: expected a finite real, got {v!r}")
        out[i] = float(v)
    return out


def deserialize_network(stream: str | bytes) -> FnnNetwork:
    """Parse a network document, enforcing all type invariants.

    Malformed input raises NetworkFormatError naming the offending field;
    no partially constructed network escapes.
    """
    try:
        doc = json.loads(stream)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"not a valid network document: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError(f"top level: expected an object, got {type(doc).__name__}")

    unknown = set(doc) - {"n", "R", "nodes"}
    if unknown:
        raise NetworkFormatError(f"unknown field(s): {sorted(unknown)}")
    for key in ("n", "R", "nodes"):
        if key not in doc:
            raise NetworkFormatError(f"missing field '{key}'")

    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise NetworkFormatError(f"n: expected a positive integer, got {n!r}")
    if not isinstance(doc["nodes"], list):
        raise NetworkFormatError("nodes: expected an array")
    if doc["R"] != len(doc["nodes"]):
        raise NetworkFormatError(f"R: declared {doc['R']}, but nodes has {len(doc['nodes'])} entries")

    nodes = []
    for k, entry in enumerate(doc["nodes"]):
        where = f"nodes[{k}]"
        if not isinstance(entry, dict):
            raise NetworkFormatError(f"{where}: expected an object")
        unknown = set(entry) - {"m", "sigma", "xi"}
        if unknown:
            raise NetworkFormatError(f"{where}: unknown field(s): {sorted(unknown)}")
        for key in ("m", "sigma", "xi"):
            if key not in entry:
                raise NetworkFormatError(f"{where}: missing field '{key}'")
        m = _parse_real_vector(entry["m"], n, f"{where}.m")
        sigma = _parse_real_vector(entry["sigma"], n, f"{where}.sigma")
        if not np.all(sigma > 0.0):
            raise NetworkFormatError(f"{where}.sigma: widths must be > 0, got {sigma.tolist()}")
        xi = entry["xi"]
        if isinstance(xi, bool) or not isinstance(xi, (int, float)) or not math.isfinite(xi):
            raise NetworkFormatError(f"{where}.xi: expected a finite real, got {xi!r}")
        nodes.append(FuzzyNode(m, sigma, float(xi)))
    return FnnNetwork(n, nodes)


def save_network(network: FnnNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_network(network))
        fh.write("\n")


def load_network(path) -> FnnNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize_network(fh.read())
