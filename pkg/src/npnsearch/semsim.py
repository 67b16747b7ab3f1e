"""Structural equation models over a DAG and their simulation.

A model attaches one coefficient per edge (drawn from U(-1, 1)), a
disturbance family, and a connection function. Simulation visits nodes in
topological order; each node is the connection function of its parents
plus a fresh disturbance draw, i.i.d. across cases.

Disturbance families:
    G    standard normal
    NG1  Gamma(shape=2, scale=5)
    NG2  equal mixture of N(-1, 0.5) and N(+1, 0.5), 0.5 a variance

Connection functions applied to parent values x_j with coefficients a_j:
    L    sum a_j x_j
    NL1  sum a_j sign(x_j) |x_j|^1.5
    NL2  sum a_j sin(x_j)
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SimulationOverflowError
from .graph import Dag

DISTURBANCE_KINDS = ("G", "NG1", "NG2")
CONNECTION_KINDS = ("L", "NL1", "NL2")

# Parameter readings are deliberately isolated here; see module docstring.
GAMMA_SHAPE = 2.0
GAMMA_SCALE = 5.0
MIXTURE_MEANS = (-1.0, 1.0)
MIXTURE_VARIANCE = 0.5


class SemModel:
    """A DAG with per-edge coefficients and the two family tags."""

    __slots__ = ("dag", "coefficients", "disturbance", "connection")

    def __init__(self, dag: Dag, coefficients: dict[tuple[int, int], float],
                 disturbance: str, connection: str):
        if disturbance not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {disturbance!r}")
        if connection not in CONNECTION_KINDS:
            raise ValueError(f"unknown connection kind {connection!r}")
        coefficients = dict(coefficients)
        if set(coefficients) != set(dag.edges):
            raise ValueError("coefficients must cover exactly the DAG's edges")
        self.dag = dag
        self.coefficients = coefficients
        self.disturbance = disturbance
        self.connection = connection


def parameterize(dag: Dag, disturbance: str, connection: str, seed: int) -> SemModel:
    """Draw one U(-1, 1) coefficient per edge, deterministically under seed."""
    rng = np.random.default_rng(seed)
    coefficients = {}
    for edge in sorted(dag.edges):
        a = rng.uniform(-1.0, 1.0)
        while a == -1.0:  # keep the interval open
            a = rng.uniform(-1.0, 1.0)
        coefficients[edge] = a
    return SemModel(dag, coefficients, disturbance, connection)


def sample_disturbances(kind: str, rng: np.random.Generator, size) -> np.ndarray:
    """Vectorized draws from one disturbance family."""
    if kind == "G":
        return rng.standard_normal(size)
    if kind == "NG1":
        return rng.gamma(GAMMA_SHAPE, GAMMA_SCALE, size)
    if kind == "NG2":
        means = np.where(rng.integers(0, 2, size) == 0, MIXTURE_MEANS[0], MIXTURE_MEANS[1])
        return rng.normal(means, math.sqrt(MIXTURE_VARIANCE))
    raise ValueError(f"unknown disturbance kind {kind!r}")


def sample_disturbance(kind: str, rng: np.random.Generator) -> float:
    """One draw from a disturbance family."""
    return float(sample_disturbances(kind, rng, size=()))


def _connection_sum(kind: str, parent_values: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    if kind == "L":
        return parent_values @ coeffs
    if kind == "NL1":
        return (np.sign(parent_values) * np.abs(parent_values) ** 1.5) @ coeffs
    if kind == "NL2":
        return np.sin(parent_values) @ coeffs
    raise ValueError(f"unknown connection kind {kind!r}")


def simulate(model: SemModel, cases: int, seed: int) -> np.ndarray:
    """Simulate ``cases`` i.i.d. rows from the model, recursively.

    Returns a cases-by-nodes float array. Raises
    ``SimulationOverflowError`` if a value leaves the finite range (can
    happen for steep nonlinear chains).
    """
    cases = int(cases)
    if cases < 1:
        raise ValueError("cases must be positive")
    rng = np.random.default_rng(seed)
    dag = model.dag
    values = np.zeros((cases, dag.node_count))
    with np.errstate(over="ignore", invalid="ignore"):
        for node in dag.topological_order():
            eps = sample_disturbances(model.disturbance, rng, cases)
            parents = dag.parents(node)
            if parents:
                coeffs = np.array([model.coefficients[(p, node)] for p in parents])
                values[:, node] = _connection_sum(model.connection, values[:, list(parents)], coeffs) + eps
            else:
                values[:, node] = eps
    if not np.isfinite(values).all():
        raise SimulationOverflowError("simulation produced non-finite values")
    return values


# -- dataset dump format -------------------------------------------------------


def dataset_to_text(data: np.ndarray) -> str:
    """Tab-separated dump with an X1..Xp header row; full float precision."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be 2-D")
    lines = ["\t".join(f"X{j + 1}" for j in range(data.shape[1]))]
    for row in data:
        lines.append("\t".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def dataset_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty dataset text")
    width = len(lines[0].split("\t"))
    rows = []
    for ln in lines[1:]:
        row = [float(v) for v in ln.split("\t")]
        if len(row) != width:
            raise ValueError("ragged dataset row")
        rows.append(row)
    return np.array(rows, dtype=float).reshape(len(rows), width)
