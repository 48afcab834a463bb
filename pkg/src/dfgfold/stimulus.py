"""Test signals for filter simulation.

Band placement follows the usual ECG numbers: QRS energy below 45 Hz, mains
hum at 50/60 Hz, baseline wander around 0.15-0.3 Hz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DfgFoldError

KINDS = ("impulse", "step", "sine", "ecg", "noise", "random", "external")

# (offset from the R peak [s], gaussian width [s], amplitude)
ECG_WAVES = {
    "P": (-0.20, 0.025, 0.15),
    "QRS": (0.0, 0.010, 1.0),
    "T": (0.30, 0.040, 0.30),
}


class BadSpec(DfgFoldError):
    def __init__(self, field_name: str, msg: str):
        self.field = field_name
        super().__init__(f"{field_name}: {msg}")


@dataclass(frozen=True)
class Stimulus:
    """Description of an input signal; :func:`gen_stimulus` renders it.

    Only the parameters relevant to ``kind`` are read.
    """

    kind: str
    length: int = 64
    amplitude: float = 1.0
    freq: float = 50.0
    sample_rate: float = 360.0
    phase: float = 0.0
    bpm: float = 60.0
    powerline_hz: float = 50.0
    powerline_amp: float = 0.1
    baseline_hz: float = 0.25
    baseline_amp: float = 0.2
    noise_amp: float = 0.0
    with_ecg: bool = True
    seed: int = 0
    samples: Sequence[float] = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadSpec("kind", f"unknown stimulus kind {self.kind!r}")
        if self.kind == "external":
            object.__setattr__(self, "samples", tuple(float(x) for x in self.samples))
            object.__setattr__(self, "length", len(self.samples))
        if self.length < 1:
            raise BadSpec("length", "must be at least 1")
        if self.sample_rate <= 0:
            raise BadSpec("sample_rate", "must be positive")
        nyq = self.sample_rate / 2
        if self.kind == "sine" and not self.freq < nyq:
            raise BadSpec("freq", f"{self.freq} Hz is not below half the sample rate")
        if self.kind == "noise":
            if not self.powerline_hz < nyq:
                raise BadSpec("powerline_hz", f"{self.powerline_hz} Hz is not below half the sample rate")
            if not self.baseline_hz < nyq:
                raise BadSpec("baseline_hz", f"{self.baseline_hz} Hz is not below half the sample rate")
        if self.kind in ("ecg", "noise") and self.bpm <= 0:
            raise BadSpec("bpm", "must be positive")


def external(samples: Sequence[float], sample_rate: float = 360.0) -> Stimulus:
    return Stimulus("external", samples=tuple(samples), sample_rate=sample_rate)


def synthetic_ecg(n: int, bpm: float, fs: float, amplitude: float = 1.0) -> np.ndarray:
    """Gaussian P/QRS/T caricature with the R peak at the centre of each beat."""
    period = 60.0 / bpm
    t = np.arange(n) / fs
    # phase within the beat, centred so the R peak sits mid-period
    tau = (t % period) - period / 2
    x = np.zeros(n)
    for offset, width, amp in ECG_WAVES.values():
        for wrap in (-period, 0.0, period):
            x += amp * np.exp(-0.5 * ((tau - offset + wrap) / width) ** 2)
    return amplitude * x


def gen_stimulus(spec: Stimulus) -> list[float]:
    """Render a stimulus as floating-point samples (not yet quantized)."""
    n = spec.length
    fs = spec.sample_rate
    t = np.arange(n) / fs
    if spec.kind == "impulse":
        x = np.zeros(n)
        x[0] = spec.amplitude
    elif spec.kind == "step":
        x = np.full(n, spec.amplitude)
    elif spec.kind == "sine":
        x = spec.amplitude * np.sin(2 * np.pi * spec.freq * t + spec.phase)
    elif spec.kind == "ecg":
        x = synthetic_ecg(n, spec.bpm, fs, spec.amplitude)
    elif spec.kind == "noise":
        rng = np.random.default_rng(spec.seed)
        x = spec.powerline_amp * np.sin(2 * np.pi * spec.powerline_hz * t)
        x += spec.baseline_amp * np.sin(2 * np.pi * spec.baseline_hz * t)
        if spec.noise_amp:
            x += spec.noise_amp * rng.standard_normal(n)
        if spec.with_ecg:
            x += synthetic_ecg(n, spec.bpm, fs, spec.amplitude)
    elif spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        x = rng.uniform(-spec.amplitude, spec.amplitude, n)
    else:
        x = np.asarray(spec.samples, dtype=float)
    return [float(v) for v in x]


def parse_stimulus(text: str, length: int | None = None, seed: int | None = None) -> Stimulus:
    """Parse ``kind[:key=value,...]``, e.g. ``sine:freq=50,sample_rate=360``."""
    kind, _, rest = text.partition(":")
    aliases = {"amp": "amplitude", "rate": "sample_rate", "fs": "sample_rate", "hz": "freq"}
    kwargs: dict = {}
    fields = Stimulus.__dataclass_fields__
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        key = aliases.get(key.strip(), key.strip())
        if not sep or key not in fields or key in ("kind", "samples"):
            raise BadSpec(key or "stimulus", f"bad stimulus parameter {item!r}")
        typ = fields[key].type
        if typ == "int":
            kwargs[key] = int(value)
        elif typ == "bool":
            kwargs[key] = value.lower() in ("1", "true", "yes")
        else:
            kwargs[key] = float(value)
    if length is not None:
        kwargs.setdefault("length", length)
    if seed is not None:
        kwargs.setdefault("seed", seed)
    return Stimulus(kind.strip(), **kwargs)
