"""Frequency response of the bundled filter, measured by simulation.

Drives the fixed-point simulator with sines across 0..180 Hz (fs = 360 Hz),
fits the steady-state output amplitude, and compares it with the DFT of the
measured impulse response.  Also filters a synthetic ECG with mains hum.
Writes CSV files for plotting.

    python scripts/spectral_demo.py [outdir]
"""

import csv
import sys
from pathlib import Path

import numpy as np

from dfgfold import bundled_lpf, simulate_dfg
from dfgfold.stimulus import Stimulus, external, gen_stimulus

FS = 360.0
AMP = 16.0


def fitted_amplitude(y, f):
    n = np.arange(len(y))
    basis = np.column_stack([np.cos(2 * np.pi * f * n / FS), np.sin(2 * np.pi * f * n / FS)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(*coef))


def main(outdir="."):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    g = bundled_lpf()
    h = np.array(simulate_dfg(g, Stimulus("impulse", length=16)).values())
    print("impulse response:", h[:6].tolist())

    rows = []
    for f in range(0, 181, 5):
        predicted = abs(np.sum(h * np.exp(-2j * np.pi * f / FS * np.arange(len(h)))))
        if f == 0:
            x = external([AMP] * 720)
        elif f == 180:
            x = external([AMP * (-1) ** k for k in range(720)])
        else:
            x = Stimulus("sine", length=720, freq=f, sample_rate=FS, amplitude=AMP)
        y = np.array(simulate_dfg(g, x).values())[16:]
        measured = (np.abs(y).mean() if f in (0, 180) else fitted_amplitude(y, f)) / AMP
        rows.append((f, predicted, measured))
    with open(out / "frequency_response.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_hz", "predicted_gain", "measured_gain"])
        w.writerows((f, f"{p:.6f}", f"{m:.6f}") for f, p, m in rows)
    for f, p, m in rows[::6]:
        print(f"{f:5.0f} Hz  predicted {p:7.4f}  measured {m:7.4f}")

    noisy = Stimulus("noise", length=1440, powerline_amp=0.3, baseline_amp=0.2, noise_amp=0.02, seed=3)
    xs = gen_stimulus(noisy)
    ys = simulate_dfg(g, noisy).values()
    with open(out / "ecg_filtered.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "input", "output"])
        w.writerows((k, f"{a:.6f}", f"{b:.6f}") for k, (a, b) in enumerate(zip(xs, ys)))
    print(f"wrote {out / 'frequency_response.csv'} and {out / 'ecg_filtered.csv'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
