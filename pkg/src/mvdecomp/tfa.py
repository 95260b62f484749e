"""Short-time Fourier transform, spectrogram, pseudo Wigner distribution,
and Lp concentration measures of time-frequency representations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TFConfig:
    """Analysis window and hop. window_length must be even and positive."""

    window_length: int = 64
    window_kind: str = "hann"
    hop: int = 1

    def __post_init__(self):
        if self.window_length <= 0 or self.window_length % 2:
            raise ValueError("window_length must be a positive even integer")
        if self.window_kind not in ("hann", "rectangular"):
            raise ValueError(f"unknown window kind: {self.window_kind!r}")
        if self.hop < 1:
            raise ValueError("hop must be >= 1")


@dataclass
class TFRepresentation:
    """Time x frequency matrix: complex for stft, real for spectrogram/pseudo_wd."""

    values: np.ndarray
    time_positions: np.ndarray
    freq_bins: int
    kind: str


def window_samples(cfg: TFConfig) -> np.ndarray:
    """Periodic analysis window w(m), m = 0..window_length-1."""
    if cfg.window_kind == "hann":
        m = np.arange(cfg.window_length)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * m / cfg.window_length)
    return np.ones(cfg.window_length)


def _window_symmetric(cfg: TFConfig, m: np.ndarray) -> np.ndarray:
    # Symmetric indexing for the lag product: peak at m=0, periodic wrap.
    w = window_samples(cfg)
    return w[(m + cfg.window_length // 2) % cfg.window_length]


def stft(x, cfg: TFConfig) -> TFRepresentation:
    """STFT(n, k) = sum_m w(m) x(n+m) exp(-j 2 pi m k / S_w).

    One frame per time position n = 0, hop, 2*hop, ...; the signal is taken
    as zero outside its support.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    n_samples = x.size
    s_w = cfg.window_length
    if s_w > n_samples:
        raise ValueError("window longer than signal")
    positions = np.arange(0, n_samples, cfg.hop)
    padded = np.concatenate([x, np.zeros(s_w, dtype=np.complex128)])
    frames = np.lib.stride_tricks.sliding_window_view(padded, s_w)[positions]
    spectrum = np.fft.fft(frames * window_samples(cfg)[None, :], axis=1)
    return TFRepresentation(spectrum, positions, s_w, "stft")


def spectrogram(x, cfg: TFConfig) -> TFRepresentation:
    """Squared magnitude of the STFT."""
    rep = stft(x, cfg)
    return TFRepresentation(np.abs(rep.values) ** 2, rep.time_positions, rep.freq_bins, "spectrogram")


def pseudo_wd(x, cfg: TFConfig) -> TFRepresentation:
    """Pseudo Wigner distribution with a symmetric lag window.

    WD(n, k) = sum_m w(m) w(-m) x(n+m) x*(n-m) exp(-j 4 pi m k / S_w)
    with m = -S_w/2 .. S_w/2 - 1 and x zero outside its support. The window
    is extended periodically for the w(m)*w(-m) product, and the real part
    is stored (the imaginary residue vanishes for windows with w(0) = 0 at
    the wrap point, e.g. hann).
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    n_samples = x.size
    s_w = cfg.window_length
    if s_w > n_samples:
        raise ValueError("window longer than signal")
    half = s_w // 2
    m = np.arange(-half, half)
    weight = _window_symmetric(cfg, m) * _window_symmetric(cfg, -m)
    positions = np.arange(0, n_samples, cfg.hop)
    padded = np.concatenate(
        [np.zeros(half, dtype=np.complex128), x, np.zeros(s_w, dtype=np.complex128)]
    )
    idx_plus = positions[:, None] + m[None, :] + half
    idx_minus = positions[:, None] - m[None, :] + half
    lag = padded[idx_plus] * np.conj(padded[idx_minus]) * weight[None, :]
    buffer = np.zeros((positions.size, s_w), dtype=np.complex128)
    buffer[:, m % s_w] = lag
    spectrum = np.fft.fft(buffer, axis=1)
    values = spectrum[:, (2 * np.arange(s_w)) % s_w]
    return TFRepresentation(values.real, positions, s_w, "pseudo_wd")


def concentration_measure(tfr: TFRepresentation, p: float, tau: float = 0.05) -> float:
    """Lp concentration of a time-frequency representation, 0 <= p <= 1.

    For p > 0 this is sum |STFT|^p (= sum SPEC^(p/2)); smaller means more
    concentrated. For p = 0 it counts the cells whose magnitude exceeds
    tau times the peak magnitude, i.e. the support area.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if tfr.kind == "stft":
        mags = np.abs(tfr.values)
    elif tfr.kind == "spectrogram":
        mags = np.sqrt(tfr.values)
    else:
        raise ValueError("concentration measure is defined for stft/spectrogram")
    if p == 0.0:
        peak = mags.max()
        if peak == 0.0:
            return 0.0
        return float(np.count_nonzero(mags > tau * peak))
    return float(np.sum(mags**p))
