"""Control-side laws: tracking input, adaptive weight updates, excitation.

Two operating modes share the same control input:

* estimate-only: the tracking target x_hat(t) is a designed multisine
  reference whose edge image z_hat = E^T x_hat is persistently exciting,
  and the weight estimate integrates the plain adaptive law.
* estimate-and-sync: z_hat is the state of an auxiliary first-order filter
  that is driven toward consensus but kept alive by a state-dependent
  excitation term, and the weight update carries a sigma-modification
  (leakage) term for robustness against drifting true weights.

The control input cancels the estimated coupling and the internal dynamics
of the target, so the tracking error contracts at rate c1 while the weight
estimator sees a linear-in-parameters error system.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import CompleteGraphModel
from .plant import InternalDynamics

ESTIMATE_ONLY = "estimate_only"
ESTIMATE_AND_SYNC = "estimate_and_sync"
_MODES = (ESTIMATE_ONLY, ESTIMATE_AND_SYNC)


@dataclass(frozen=True)
class ControllerConfig:
    """Gains and operating mode.

    c      coupling strength (same constant the plant uses),
    c1     tracking gain of the control input,
    c2     decay rate of the auxiliary filter; must exceed the dynamics'
           Lipschitz constant for the filter to contract,
    sigma1 leakage gain of the sigma-modified update law,
    kappa  sharpness of the tanh in the auxiliary excitation.
    """

    c: float = 1.0
    c1: float = 2.0
    c2: float = 1.3
    sigma1: float = 0.0
    kappa: float = 1.0
    mode: str = ESTIMATE_ONLY

    def __post_init__(self):
        for name in ("c", "c1", "c2", "sigma1", "kappa"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"gain {name} must be finite and >= 0, got {v}")
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {_MODES}")


@dataclass(frozen=True)
class PEReference:
    """Multisine reference per node: x_hat_i(t) = sum_j a_ij sin(w_ij t + p_ij).

    ``terms[i]`` holds the (amplitude, omega, phase) triples of node i+1.
    Frequencies must be pairwise distinct and nonzero across the whole
    network so that every edge signal x_tail - x_head is non-degenerate.
    """

    terms: tuple[tuple[tuple[float, float, float], ...], ...]

    def __post_init__(self):
        freqs = [w for node in self.terms for (_, w, _) in node]
        if any(w == 0.0 for w in freqs):
            raise ValueError("reference frequencies must be nonzero")
        if len(set(freqs)) != len(freqs):
            raise ValueError("reference frequencies must be pairwise distinct")

    @classmethod
    def default(cls, n: int) -> "PEReference":
        """One tone per node at 0.7 + 0.3*i rad/s, unit amplitude."""
        return cls(tuple((((1.0, 0.7 + 0.3 * i, 0.0),)) for i in range(1, n + 1)))

    @classmethod
    def silent(cls, n: int) -> "PEReference":
        """Zero-amplitude reference (x_hat identically zero)."""
        return cls(tuple((((0.0, 0.7 + 0.3 * i, 0.0),)) for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.terms)

    @property
    def highest_omega(self) -> float:
        return max((abs(w) for node in self.terms for (_, w, _) in node), default=0.0)

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, ...]:
        node_idx, amps, omegas, phases = [], [], [], []
        for i, node in enumerate(self.terms):
            for (a, w, p) in node:
                node_idx.append(i)
                amps.append(a)
                omegas.append(w)
                phases.append(p)
        return (np.array(node_idx, dtype=int), np.array(amps), np.array(omegas), np.array(phases))


def reference_signal(ref: PEReference, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Reference x_hat(t) and its exact derivative."""
    node_idx, amps, omegas, phases = ref._arrays
    arg = omegas * t + phases
    x_hat = np.bincount(node_idx, weights=amps * np.sin(arg), minlength=ref.n)
    dx_hat = np.bincount(node_idx, weights=amps * omegas * np.cos(arg), minlength=ref.n)
    return x_hat, dx_hat


@dataclass(frozen=True, eq=False)
class EstimatorState:
    """Snapshot of the controller-side state: x_hat, w_hat and z_hat."""

    x_hat: np.ndarray
    w_hat: np.ndarray
    z_hat: np.ndarray

    def rowspace_residual(self, model: CompleteGraphModel) -> float:
        """Distance of z_hat from the row space of E^T.

        In estimate-and-sync mode z_hat must stay in that space (it starts
        there and both the filter and its excitation preserve it); a large
        residual indicates a broken integration.
        """
        proj = model.incidence.T @ (model.incidence_pinv.T @ self.z_hat)
        return float(np.linalg.norm(self.z_hat - proj))


def control_input(
    cfg: ControllerConfig,
    dyn: InternalDynamics,
    model: CompleteGraphModel,
    x: np.ndarray,
    x_hat: np.ndarray,
    dx_hat: np.ndarray,
    w_hat: np.ndarray,
    z_hat: np.ndarray,
) -> np.ndarray:
    """Tracking input u = -c1 (x - x_hat) + dx_hat + c E_in diag(w_hat) z_hat - F(x_hat)."""
    return (
        -cfg.c1 * (x - x_hat)
        + dx_hat
        + cfg.c * (model.in_incidence @ (w_hat * z_hat))
        - dyn.f(x_hat)
    )


def weight_update(
    cfg: ControllerConfig,
    model: CompleteGraphModel,
    z_hat: np.ndarray,
    z_tilde_tree: np.ndarray,
) -> np.ndarray:
    """Adaptive law dw_hat/dt = -c diag(z_hat) E_in^T E_T z_tilde_T."""
    return -cfg.c * z_hat * (model.in_incidence.T @ (model.tree_incidence @ z_tilde_tree))


def weight_update_sigma(
    cfg: ControllerConfig,
    model: CompleteGraphModel,
    z_hat: np.ndarray,
    z_tilde_tree: np.ndarray,
    w_hat: np.ndarray,
) -> np.ndarray:
    """Sigma-modified law: the plain update minus sigma1 * w_hat leakage.

    With sigma1 = 0 this returns exactly (bitwise) what ``weight_update``
    returns, so the plain law is the special case.
    """
    base = weight_update(cfg, model, z_hat, z_tilde_tree)
    if cfg.sigma1 == 0.0:
        return base
    return base - cfg.sigma1 * w_hat


def excitation_signal(t) -> np.ndarray | float:
    """Seven-tone scalar probe p(t); period 4, peak below 25.

    Frequencies span 0.25 Hz to 5 Hz so that the auxiliary filter is
    excited well inside and well above its bandwidth.
    """
    pi_t = np.pi * t
    return (
        5.0 * np.sin(0.5 * pi_t)
        + 4.0 * np.cos(2.0 * pi_t)
        - 6.0 * np.sin(8.0 * pi_t)
        + np.sin(pi_t)
        - 4.0 * np.cos(10.0 * pi_t)
        + 2.0 * np.cos(6.0 * pi_t)
        + 3.0 * np.sin(3.0 * pi_t)
    )


def aux_excitation(
    cfg: ControllerConfig,
    model: CompleteGraphModel,
    z_tilde_tree: np.ndarray,
    t: float,
) -> np.ndarray:
    """State-dependent excitation psi = E^+ tanh(kappa E_T z_tilde_T) p(t).

    Bounded uniformly in time and state (the tanh saturates and p is a
    fixed multisine), and vanishing exactly where the tree tracking error
    vanishes: excitation is injected only while there is disagreement left
    to excite.
    """
    gate = np.tanh(cfg.kappa * (model.tree_incidence @ z_tilde_tree))
    return (model.incidence_pinv @ gate) * excitation_signal(t)


def aux_rhs(
    cfg: ControllerConfig,
    model: CompleteGraphModel,
    dyn: InternalDynamics,
    z_hat: np.ndarray,
    z_tilde_tree: np.ndarray,
    t: float,
) -> np.ndarray:
    """Auxiliary filter dz_hat/dt = E^T F(x_hat) - c2 z_hat + psi(t, z_tilde_T).

    The filter has no node-space state of its own; the minimum-norm preimage
    x_hat = (E^T)^+ z_hat stands in for it, which pins the consensus
    component of x_hat to zero and keeps z_hat = E^T x_hat an identity.
    """
    if cfg.mode != ESTIMATE_AND_SYNC:
        raise ValueError("the auxiliary filter is only defined in estimate-and-sync mode")
    x_hat = model.incidence_pinv.T @ z_hat
    return (
        model.incidence.T @ dyn.f(x_hat)
        - cfg.c2 * z_hat
        + aux_excitation(cfg, model, z_tilde_tree, t)
    )
