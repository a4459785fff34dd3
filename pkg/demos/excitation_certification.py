#!/usr/bin/env python3
"""Certify persistency of excitation numerically from windowed Gram margins.

Three stages: a known analytic signal (sliding Gram of diag(sin, cos) must
integrate to pi per full period), the realized excitation of an
estimate-only run, and the state-dependent excitation of the auxiliary
filter, checked both on a closed-loop record and in isolation through the
filtration property (a stable filter fed an exciting input stays exciting).
"""
from pathlib import Path

import numpy as np

from edgesync import (
    ControllerConfig,
    ESTIMATE_ONLY,
    InternalDynamics,
    PEReference,
    Scenario,
    WeightTrajectory,
    benchmark_scenario,
    complete_graph,
    filtration_check,
    pe_margin,
    simulate,
    udpe_margin,
)

OUT = Path("out/demo_excitation")


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    # 1. analytic sanity: one full period of diag(sin, cos) integrates to pi I
    times = np.linspace(0.0, 6 * np.pi, 3001)
    diag = np.column_stack([np.sin(times), np.cos(times)])
    report = pe_margin(times, diag, window=2 * np.pi)
    print(f"diag(sin, cos), window 2pi: mu_hat = {report.mu_hat:.5f} (pi = {np.pi:.5f})")

    # 2. realized excitation of an estimate-only run: Gram of diag(z_hat)
    n = 4
    scenario = Scenario(
        n=n,
        weights=WeightTrajectory.constant([0.5] * 12),
        dynamics=InternalDynamics.linear(n, slope=1.0),
        control=ControllerConfig(c=1.0, c1=2.0, mode=ESTIMATE_ONLY),
        reference=PEReference.default(n),
        dt=5e-3,
        t_end=60.0,
        sample_every=10,
    )
    record = simulate(scenario)
    report = pe_margin(record.times, record.z_hat, window=10.0, stride=5.0)
    print(f"estimate-only reference image: {report.n_windows} windows, "
          f"mu_hat = {report.mu_hat:.4f} (> 0 certifies excitation)")

    # 3. state-dependent excitation in sync mode, on a short benchmark cut
    full = benchmark_scenario()
    sync = Scenario(n=full.n, weights=full.weights, dynamics=full.dynamics,
                    control=full.control, dt=full.dt, t_end=30.0,
                    sample_every=full.sample_every)
    sync_record = simulate(sync)
    report = udpe_margin(sync_record, sync_record.model, window=4.0, t_start=10.0)
    print(f"sync-mode realized excitation: {report.n_windows} qualifying windows, "
          f"mu_hat = {report.mu_hat:.4f}")

    # 4. the filter alone, driven at a frozen tracking error
    model = complete_graph(full.n)
    report = filtration_check(model, full.control, full.dynamics, horizon=30.0,
                              window=4.0, t_start=10.0)
    print(f"filtration property at a frozen probe: mu_hat = {report.mu_hat:.4f}")
    doubled = filtration_check(model, full.control, full.dynamics, horizon=30.0,
                               window=4.0, t_start=10.0, p_scale=2.0)
    print(f"doubling the probe amplitude: mu_hat = {doubled.mu_hat:.4f} (never smaller)")


if __name__ == "__main__":
    main()
