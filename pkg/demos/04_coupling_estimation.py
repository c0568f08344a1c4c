"""Estimating the probe-bath coupling strength g.

Coupling estimation behaves differently from thermometry: the bath imprints
g on the probe through accumulated phases, so the sensitivity initially
grows like t^2 until dephasing erases the coherence carrying it.  Correlated
preparations add a second channel: the prepared state itself depends on g,
which can dominate by orders of magnitude at strong coupling.

The script traces F(g; t) for all four preparations at the two regimes of
interest (moderate g at T = 1, stronger g at low T) and writes the records.
"""

import numpy as np

from spinprobe import (ALL_MODES, Estimator, ModelParams, qfi_trace,
                       validate_params)
from spinprobe.qfi import records_to_csv

ts = np.linspace(0.0, 10.0, 801)

for tag, g, temp in (("moderate", 0.1, 1.0), ("strong_coldbath", 0.5, 0.5)):
    params = validate_params(ModelParams(
        n=50, eps0=4.0, eps=2.0, delta=1.0, omega=1.0, chi=0.0, g=g, T=temp))
    print(f"g = {g}, T = {temp}:")
    all_records = []
    traces = {}
    for mode in ALL_MODES:
        records = qfi_trace(params, mode, ts, Estimator.COUPLING)
        all_records.extend(records)
        f = np.array([r.F for r in records])
        traces[mode] = f
        i_peak = int(np.argmax(f))
        print(f"  {mode.value:24s} peak F = {f[i_peak]:10.4g} at t = "
              f"{ts[i_peak]:5.2f};  F(t=10) = {f[-1]:10.4g}")
    records_to_csv(all_records, f"coupling_qfi_{tag}.csv", params)
    print(f"  wrote coupling_qfi_{tag}.csv")
    corr_gain = traces[ALL_MODES[0]][-1] / max(traces[ALL_MODES[1]][-1], 1e-300)
    print(f"  late-time correlated/uncorrelated pulse ratio: {corr_gain:.3g}\n")

print("correlated preparations carry g in the initial state itself, which")
print("survives dephasing and can dominate the late-time sensitivity")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    params = validate_params(ModelParams(
        n=50, eps0=4.0, eps=2.0, delta=1.0, omega=1.0, chi=0.0, g=0.5, T=0.5))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for mode in ALL_MODES:
        f = np.array([r.F for r in qfi_trace(params, mode, ts, Estimator.COUPLING)])
        ax.plot(ts, f, label=mode.value, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("F(g; t)")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title("coupling-strength QFI, g = 0.5, T = 0.5, n = 50")
    fig.tight_layout()
    fig.savefig("coupling_estimation.png", dpi=150)
    print("wrote coupling_estimation.png")
except ImportError:
    print("matplotlib not available; plot skipped")
