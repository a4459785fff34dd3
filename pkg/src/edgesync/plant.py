"""The true network: agent internal dynamics and time-varying edge weights.

The plant integrates

    dx/dt = F(x) - c * E_in diag(w(t)) E^T x + u

where F stacks the per-agent internal dynamics f_i, w(t) are the unknown
(to the controller) edge weights of the complete-graph representation, and
u is the control input.  Weights are restricted to constants and single
sinusoids so that every trajectory has an exact analytic derivative and a
tight analytic bound, and so that configurations stay serializable.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import CompleteGraphModel

_WEIGHT_KINDS = ("const", "sin", "cos")


@dataclass(frozen=True)
class EdgeWeight:
    """One edge's weight law: w(t) = base + amplitude * sin/cos(omega*t + phase)."""

    kind: str = "const"
    base: float = 0.0
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}, expected one of {_WEIGHT_KINDS}")
        if self.kind == "const" and (self.amplitude != 0.0 or self.omega != 0.0 or self.phase != 0.0):
            raise ValueError("constant weights take only a base value")

    @property
    def peak(self) -> float:
        """Tight bound on |w(t)|."""
        return abs(self.base) + abs(self.amplitude)

    @property
    def rate(self) -> float:
        """Tight bound on |dw/dt|."""
        return abs(self.amplitude * self.omega)


@dataclass(frozen=True)
class WeightTrajectory:
    """Per-edge weight laws plus global bounds on |w_k| and |dw_k/dt|.

    The bounds are part of the type because the boundedness of the weights
    and of their derivatives is what the whole adaptive design leans on;
    constructing a trajectory that violates its own declared bounds is
    rejected outright.
    """

    edges: tuple[EdgeWeight, ...]
    w_d: float
    w_d_prime: float

    def __post_init__(self):
        for k, e in enumerate(self.edges):
            if e.peak > self.w_d + 1e-15:
                raise ValueError(f"edge {k + 1} peak {e.peak} exceeds declared bound w_d={self.w_d}")
            if e.rate > self.w_d_prime + 1e-15:
                raise ValueError(
                    f"edge {k + 1} rate {e.rate} exceeds declared bound w_d_prime={self.w_d_prime}"
                )

    def __len__(self) -> int:
        return len(self.edges)

    @classmethod
    def from_edges(cls, edges) -> "WeightTrajectory":
        """Build a trajectory with tight analytic bounds."""
        edges = tuple(edges)
        w_d = max((e.peak for e in edges), default=0.0)
        w_d_prime = max((e.rate for e in edges), default=0.0)
        return cls(edges=edges, w_d=w_d, w_d_prime=w_d_prime)

    @classmethod
    def constant(cls, values) -> "WeightTrajectory":
        """Fixed topology: one constant weight per edge."""
        return cls.from_edges(EdgeWeight(kind="const", base=float(v)) for v in values)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, ...]:
        base = np.array([e.base for e in self.edges])
        amp = np.array([e.amplitude for e in self.edges])
        omega = np.array([e.omega for e in self.edges])
        phase = np.array([e.phase for e in self.edges])
        is_cos = np.array([e.kind == "cos" for e in self.edges])
        return base, amp, omega, phase, is_cos


def weight_eval(traj: WeightTrajectory, t) -> tuple[np.ndarray, np.ndarray]:
    """Weights and their exact derivatives at time ``t``.

    ``t`` may be a scalar or an array shaped to broadcast against the edge
    axis (e.g. ``times[:, None]`` for a whole sample grid at once).
    """
    base, amp, omega, phase, is_cos = traj._arrays
    arg = omega * t + phase
    s = np.sin(arg)
    c = np.cos(arg)
    w = base + amp * np.where(is_cos, c, s)
    dw = np.where(is_cos, -amp * omega * s, amp * omega * c)
    return w, dw


def benchmark_weight_trajectory() -> WeightTrajectory:
    """The 30-edge time-varying weight vector of the six-agent benchmark.

    Six active edges with slowly drifting weights, a second sparse cluster,
    and one constant long-range edge; all other complete-graph edges are
    identically zero.  Under the canonical edge ordering the nonzero entries
    sit on edges 1-6, 22-24 and 30.
    """
    z = EdgeWeight()
    edges = (
        EdgeWeight("sin", 0.7, 0.02, 0.02),
        EdgeWeight("cos", 0.8, 0.1, 0.01),
        EdgeWeight("sin", 0.6, 0.02, 0.5 * np.pi),
        EdgeWeight("const", 0.25),
        EdgeWeight("const", 0.4),
        EdgeWeight("cos", 0.45, 0.02, 0.05 * np.pi),
    ) + (z,) * 15 + (
        EdgeWeight("cos", 0.3, 0.05, 0.01 * np.pi),
        EdgeWeight("const", 0.6),
        EdgeWeight("const", 0.2),
    ) + (z,) * 5 + (
        EdgeWeight("const", 0.5),
    )
    return WeightTrajectory.from_edges(edges)


_DYNAMICS_KINDS = ("linear", "tanh")


@dataclass(frozen=True)
class InternalDynamics:
    """Per-agent internal dynamics f_i, each linear or a bounded tanh.

    ``linear`` with gain a is f(x) = a*x; ``tanh`` with gain g is
    f(x) = g*tanh(x).  Both are globally Lipschitz with constant |gain|,
    which is the only property the stability analysis needs.
    """

    kinds: tuple[str, ...]
    gains: tuple[float, ...]

    def __post_init__(self):
        if len(self.kinds) != len(self.gains):
            raise ValueError("kinds and gains must have the same length")
        for k in self.kinds:
            if k not in _DYNAMICS_KINDS:
                raise ValueError(f"unknown dynamics kind {k!r}, expected one of {_DYNAMICS_KINDS}")

    @classmethod
    def linear(cls, n: int, slope: float = 1.0) -> "InternalDynamics":
        return cls(kinds=("linear",) * n, gains=(float(slope),) * n)

    @classmethod
    def saturating(cls, n: int, gain: float = 1.0) -> "InternalDynamics":
        return cls(kinds=("tanh",) * n, gains=(float(gain),) * n)

    @property
    def lipschitz(self) -> tuple[float, ...]:
        return tuple(abs(g) for g in self.gains)

    @property
    def l_f(self) -> float:
        return max(self.lipschitz)

    @cached_property
    def _uniform_slope(self) -> float | None:
        """Common slope if every agent is linear with the same gain, else None."""
        if all(k == "linear" for k in self.kinds) and len(set(self.gains)) == 1:
            return self.gains[0]
        return None

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.gains), np.array([k == "tanh" for k in self.kinds])

    def f(self, x: np.ndarray) -> np.ndarray:
        """Stacked internal dynamics F(x)."""
        slope = self._uniform_slope
        if slope is not None:
            return slope * x
        gains, is_tanh = self._arrays
        return gains * np.where(is_tanh, np.tanh(x), x)


def plant_rhs(
    model: CompleteGraphModel,
    traj: WeightTrajectory,
    dyn: InternalDynamics,
    x: np.ndarray,
    u: np.ndarray,
    t: float,
    c: float = 1.0,
) -> np.ndarray:
    """Right-hand side of the coupled network dx/dt = F(x) - c E_in W(t) E^T x + u."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (model.n,) or u.shape != (model.n,):
        raise ValueError(f"expected state and input of length {model.n}")
    if len(traj) != model.m:
        raise ValueError(f"trajectory has {len(traj)} edges, model has {model.m}")
    w, _ = weight_eval(traj, t)
    return dyn.f(x) - c * (model.in_incidence @ (w * (model.incidence.T @ x))) + u
