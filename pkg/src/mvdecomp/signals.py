"""Signal containers, multicomponent synthesis, sensor mixing, and noise.

A multicomponent signal is a sum of amplitude/phase-modulated waveforms.
Sensing it through S sensors multiplies each component by a complex gain
per sensor, so each channel is a linear mixture of the components. This
module provides the containers for components, mixing matrices and sensed
multichannel signals, closed-form test-signal generators, and calibrated
complex noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import rng_from

EXAMPLE1_SAMPLES = 257


@dataclass
class ComponentSet:
    """Component waveforms, one row per component (P x N complex).

    Rows of a synthesized set are linearly independent; no row is all-zero.
    """

    data: np.ndarray
    n0: int = 0

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=np.complex128))
        if self.data.size == 0:
            raise ValueError("empty component set")
        energies = np.sum(np.abs(self.data) ** 2, axis=1)
        if np.any(energies == 0.0):
            raise ValueError("all-zero component row")

    @property
    def component_count(self) -> int:
        return self.data.shape[0]

    @property
    def sample_count(self) -> int:
        return self.data.shape[1]

    @property
    def time_axis(self) -> np.ndarray:
        return np.arange(self.n0, self.n0 + self.sample_count)


@dataclass
class MultivariateSignal:
    """Sensed multichannel signal, one row per sensor (S x N complex)."""

    data: np.ndarray
    n0: int = 0

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=np.complex128))
        if self.data.size == 0:
            raise ValueError("empty signal")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("non-finite sample")

    @property
    def sensor_count(self) -> int:
        return self.data.shape[0]

    @property
    def sample_count(self) -> int:
        return self.data.shape[1]

    @property
    def time_axis(self) -> np.ndarray:
        return np.arange(self.n0, self.n0 + self.sample_count)


@dataclass
class MixingMatrix:
    """Complex sensor gains, entry (m, p) applied to component p at sensor m."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.atleast_2d(np.asarray(self.entries, dtype=np.complex128))
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("non-finite mixing entry")

    @property
    def sensor_count(self) -> int:
        return self.entries.shape[0]

    @property
    def component_count(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Circular complex Gaussian noise: per-sample variance sigma**2."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


def analytic_signal(x_real) -> np.ndarray:
    """Complex extension of a real sequence with no negative-frequency content.

    Uses the frequency-domain construction: forward DFT, zero the
    negative-frequency bins, double the strictly positive bins, keep DC
    (and Nyquist for even length) unscaled, inverse DFT. The real part of
    the output equals the input to within roundoff.
    """
    x = np.asarray(x_real, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty signal")
    if x.ndim != 1:
        raise ValueError("expected a 1-D sequence")
    if x.size < 2:
        raise ValueError("signal too short")
    n = x.size
    gain = np.zeros(n)
    gain[0] = 1.0
    if n % 2 == 0:
        gain[n // 2] = 1.0
        gain[1 : n // 2] = 2.0
    else:
        gain[1 : (n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(x) * gain)


def mix(components: ComponentSet, mixing: MixingMatrix) -> MultivariateSignal:
    """Sense components through the mixing matrix: channel data = A @ components."""
    if mixing.component_count != components.component_count:
        raise ValueError(
            f"mixing matrix has {mixing.component_count} columns, "
            f"component set has {components.component_count} rows"
        )
    return MultivariateSignal(mixing.entries @ components.data, n0=components.n0)


def add_noise(signal: MultivariateSignal, spec: NoiseSpec) -> MultivariateSignal:
    """Add i.i.d. circular complex Gaussian noise, deterministic per seed.

    Real and imaginary parts each have standard deviation sigma/sqrt(2) so
    the per-sample noise variance is sigma**2.
    """
    if spec.sigma == 0.0:
        return MultivariateSignal(signal.data.copy(), n0=signal.n0)
    rng = rng_from(spec.seed)
    shape = signal.data.shape
    scale = spec.sigma / np.sqrt(2.0)
    noise = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return MultivariateSignal(signal.data + noise, n0=signal.n0)


def synth_example1(sensors: int, phases) -> tuple[MultivariateSignal, ComponentSet]:
    """Two-component crossing test signal on N=257 samples, n = -128..128.

    The components are the conjugate pair

        x_1(n) = exp(-(n/128)^2) * exp(+j*(2*sin(5*pi*n/N) - 2*pi*n^2/(16*N)))
        x_2(n) = conj(x_1(n))

    whose supports overlap in the time-frequency plane. Channel i is the
    real-valued measurement exp(-(n/128)^2)*cos(2*sin(5*pi*n/N)
    - 2*pi*n^2/(16*N) + phases[i]), which equals the mixture
    0.5*exp(j*phi_i)*x_1 + 0.5*exp(-j*phi_i)*x_2.
    """
    if sensors < 1:
        raise ValueError("need at least one sensor")
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (sensors,):
        raise ValueError("phases must have one entry per sensor")
    n_samples = EXAMPLE1_SAMPLES
    n = np.arange(-128, 129)
    envelope = np.exp(-((n / 128.0) ** 2))
    base_phase = 2.0 * np.sin(5.0 * np.pi * n / n_samples) - 2.0 * np.pi * n**2 / (16.0 * n_samples)
    component = envelope * np.exp(1j * base_phase)
    components = ComponentSet(np.vstack([component, np.conj(component)]), n0=-128)
    channels = envelope[None, :] * np.cos(base_phase[None, :] + phases[:, None])
    return MultivariateSignal(channels.astype(np.complex128), n0=-128), components


@dataclass(frozen=True)
class LinearFMComponent:
    """Gaussian-envelope linear FM chirp."""

    center_freq: float
    sweep_rate: float
    envelope_width: float
    center_time: float = 0.0
    phase: float = 0.0
    amplitude: float = 1.0

    def evaluate(self, n: np.ndarray) -> np.ndarray:
        t = n - self.center_time
        envelope = np.exp(-((t / self.envelope_width) ** 2))
        phase = self.phase + self.center_freq * t + 0.5 * self.sweep_rate * t**2
        return self.amplitude * envelope * np.exp(1j * phase)


@dataclass(frozen=True)
class SinusoidalFMComponent:
    """Gaussian-envelope sinusoidally modulated FM, optionally chirped."""

    mod_index: float
    mod_cycles: float
    envelope_width: float
    center_freq: float = 0.0
    sweep_rate: float = 0.0
    phase: float = 0.0
    amplitude: float = 1.0

    def evaluate(self, n: np.ndarray) -> np.ndarray:
        span = n.size
        envelope = np.exp(-((n / self.envelope_width) ** 2))
        phase = (
            self.phase
            + self.mod_index * np.sin(2.0 * np.pi * self.mod_cycles * n / span)
            + self.center_freq * n
            + 0.5 * self.sweep_rate * n**2
        )
        return self.amplitude * envelope * np.exp(1j * phase)


_DESCRIPTOR_KINDS = {"lfm": LinearFMComponent, "sfm": SinusoidalFMComponent}


def parse_descriptor(entry: dict):
    """Build a component descriptor from its JSON dict form."""
    fields = dict(entry)
    kind = fields.pop("kind", None)
    if kind not in _DESCRIPTOR_KINDS:
        raise ValueError(f"unknown component kind: {kind!r}")
    return _DESCRIPTOR_KINDS[kind](**fields)


def time_grid(sample_count: int) -> np.ndarray:
    """Symmetric integer time axis used by the synthesizers."""
    n0 = -((sample_count - 1) // 2) if sample_count % 2 else -(sample_count // 2)
    return np.arange(n0, n0 + sample_count)


def synth_multicomponent(descriptors, sample_count: int) -> ComponentSet:
    """Evaluate descriptors on the symmetric grid; rows must be independent."""
    if len(descriptors) < 1:
        raise ValueError("need at least one descriptor")
    n = time_grid(sample_count)
    rows = np.vstack([d.evaluate(n) for d in descriptors])
    singular = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.sum(singular > 1e-10 * singular[0]))
    if rank < rows.shape[0]:
        raise ValueError("dependent components")
    return ComponentSet(rows, n0=int(n[0]))


def random_mixing(
    sensors: int,
    components: int,
    rng: np.random.Generator,
    amplitude_jitter: float = 0.0,
    max_condition: float = 1e6,
) -> MixingMatrix:
    """Random sensor gains alpha*exp(j*phi), alpha ~ U[0.5, 1.5], phi ~ U[0, 2pi).

    With amplitude_jitter v > 0 each gain is additionally scaled by
    (1 + U[-v, v]). For sensors >= components the draw is repeated until the
    condition number stays below max_condition, so the mixture has rank P.
    """
    for _ in range(64):
        alpha = rng.uniform(0.5, 1.5, size=(sensors, components))
        phi = rng.uniform(0.0, 2.0 * np.pi, size=(sensors, components))
        entries = alpha * np.exp(1j * phi)
        if amplitude_jitter > 0.0:
            entries = entries * (1.0 + rng.uniform(-amplitude_jitter, amplitude_jitter, size=entries.shape))
        if sensors < components:
            return MixingMatrix(entries)
        singular = np.linalg.svd(entries, compute_uv=False)
        if singular[-1] > 0.0 and singular[0] / singular[-1] <= max_condition:
            return MixingMatrix(entries)
    raise RuntimeError("failed to draw a well-conditioned mixing matrix")


def conjugate_phase_mixing(phases, max_condition: float = 1e6) -> MixingMatrix:
    """Mixing implied by real-valued sensing of a conjugate component pair.

    Sensor i applies 0.5*exp(j*phi_i) to the first component and
    0.5*exp(-j*phi_i) to its conjugate, so the channel is real.
    """
    phases = np.asarray(phases, dtype=np.float64)
    gains = 0.5 * np.exp(1j * phases)
    entries = np.column_stack([gains, np.conj(gains)])
    singular = np.linalg.svd(entries, compute_uv=False)
    if singular[-1] <= 0.0 or singular[0] / singular[-1] > max_condition:
        raise ValueError("degenerate sensor phases")
    return MixingMatrix(entries)
