"""Extraction of signal components from eigenvectors of the autocorrelation
matrix by minimizing the time-frequency concentration of their linear
combinations, with deflation between extractions.

Each eigenvector of the sensed-signal autocorrelation matrix is a linear
combination of the (possibly overlapping) signal components. A combination
y = sum_p beta_p q_p that matches a single component is maximally
concentrated in the time-frequency plane, so components are recovered one
at a time as minimizers of the L1 norm of the STFT of the normalized
combination. After each extraction the found component is projected out of
the remaining vectors so it cannot be found twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import autocorrelation, hermitian_eig, significant_rank
from .seeding import rng_from
from .signals import ComponentSet, MultivariateSignal
from .tfa import TFConfig, concentration_measure, stft

_MIN_STEP = 1e-4
_MAX_PASSES = 10
_RANK_THRESHOLD = 0.01


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the coordinate-descent concentration minimizer."""

    p_norm: float = 1.0
    max_sweeps: int = 200
    tol: float = 1e-6
    step_init: float = 0.5
    restarts: int = 8
    seed: int = 0
    support_tau: float = 0.05

    def __post_init__(self):
        if not 0.0 <= self.p_norm <= 1.0:
            raise ValueError("p_norm must lie in [0, 1]")
        if self.max_sweeps < 1 or self.restarts < 0 or self.step_init <= 0:
            raise ValueError("invalid search configuration")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")


@dataclass
class DecompositionResult:
    """Extracted unit-energy components sorted by ascending concentration.

    coefficients[i] holds the coordinates of component i in the basis of the
    top-M eigenvectors of the autocorrelation matrix.
    """

    components: ComponentSet
    measures: np.ndarray
    coefficients: list
    iterations_used: int


def combine(eigvecs: np.ndarray, beta) -> np.ndarray:
    """Unit-energy combination sum_p beta_p q_p with canonical global phase."""
    beta = np.asarray(beta, dtype=np.complex128).ravel()
    if beta.size != eigvecs.shape[1]:
        raise ValueError("coefficient count does not match vector count")
    if not np.any(beta):
        raise ValueError("zero coefficient vector")
    y = eigvecs @ beta
    norm = np.linalg.norm(y)
    if norm == 0.0:
        raise ValueError("combination has zero energy")
    y = y / norm
    lead = y[np.argmax(np.abs(y))]
    return y * np.conj(lead / abs(lead))


def objective(eigvecs: np.ndarray, beta, search: SearchConfig, tf: TFConfig) -> float:
    """Concentration of the normalized combination's STFT."""
    y = combine(eigvecs, beta)
    return concentration_measure(stft(y, tf), search.p_norm, tau=search.support_tau)


class _CombinationObjective:
    """Fast objective via precomputed per-vector STFTs.

    The STFT is linear, so the transform of sum_p beta_p q_p is the same
    combination of the per-vector transforms; normalization enters through
    the Gram matrix of the vectors.
    """

    def __init__(self, eigvecs: np.ndarray, search: SearchConfig, tf: TFConfig):
        count = eigvecs.shape[1]
        self.stfts = np.stack([stft(eigvecs[:, p], tf).values for p in range(count)])
        self.gram = eigvecs.conj().T @ eigvecs
        self.p_norm = search.p_norm
        self.tau = search.support_tau
        # Reused across candidate batches; fresh allocations dominate otherwise.
        shape = (4,) + self.stfts.shape[1:]
        self._work = np.empty(shape, dtype=np.complex128)
        self._mags = np.empty(shape, dtype=np.float64)

    def combined(self, beta: np.ndarray) -> np.ndarray:
        return np.tensordot(beta, self.stfts, axes=1)

    def energy(self, beta: np.ndarray) -> float:
        return float(np.real(beta.conj() @ self.gram @ beta))

    def value(self, combined: np.ndarray, beta: np.ndarray) -> float:
        return self._measure(np.abs(combined), self.energy(beta))

    def _measure(self, mags: np.ndarray, energy: float) -> float:
        if energy <= 0.0:
            return np.inf
        if self.p_norm == 0.0:
            peak = mags.max()
            if peak == 0.0:
                return 0.0
            return float(np.count_nonzero(mags > self.tau * peak))
        if self.p_norm == 1.0:
            total = float(mags.sum())
        else:
            total = float(np.sum(mags**self.p_norm))
        return total / energy ** (0.5 * self.p_norm)

    def candidate_values(self, combined, beta, coord, deltas):
        # Energy of beta + d*e_coord expands through the Gram matrix, so the
        # candidates need no matrix products; magnitudes are batched.
        count = deltas.size
        work = self._work[:count]
        mags = self._mags[:count]
        np.multiply(deltas[:, None, None], self.stfts[coord][None, :, :], out=work)
        work += combined[None, :, :]
        np.abs(work, out=mags)
        base = self.energy(beta)
        gbeta = complex(self.gram[coord] @ beta)
        gdiag = float(np.real(self.gram[coord, coord]))
        energies = base + 2.0 * np.real(np.conj(deltas) * gbeta) + np.abs(deltas) ** 2 * gdiag
        if self.p_norm == 1.0:
            totals = mags.sum(axis=(1, 2))
            with np.errstate(divide="ignore"):
                return np.where(energies > 0.0, totals / np.sqrt(energies), np.inf)
        return np.array([self._measure(mags[i], float(energies[i])) for i in range(count)])


def _coordinate_descent(obj: _CombinationObjective, beta0: np.ndarray, search: SearchConfig, trace=None):
    beta = beta0.astype(np.complex128).copy()
    combined = obj.combined(beta)
    best = obj.value(combined, beta)
    step = search.step_init
    sweeps = 0
    while sweeps < search.max_sweeps and step >= _MIN_STEP:
        sweeps += 1
        sweep_start = best
        improved = False
        for coord in range(beta.size):
            deltas = np.array([step, -step, 1j * step, -1j * step])
            values = obj.candidate_values(combined, beta, coord, deltas)
            pick = int(np.argmin(values))
            if values[pick] < best:
                beta[coord] += deltas[pick]
                combined = combined + deltas[pick] * obj.stfts[coord]
                best = values[pick]
                improved = True
                if trace is not None:
                    trace.append(best)
        if not improved:
            step *= 0.5
        elif sweep_start > 0.0 and (sweep_start - best) / sweep_start < search.tol:
            break
    combined = obj.combined(beta)
    return beta, obj.value(combined, beta)


def minimize_concentration(
    eigvecs: np.ndarray,
    search: SearchConfig,
    tf: TFConfig,
    rng: np.random.Generator | None = None,
    trace=None,
) -> np.ndarray:
    """Coefficients of a locally most concentrated combination of the vectors.

    Runs derivative-free coordinate descent (perturbing each coefficient by
    +-delta and +-j*delta, halving delta when a sweep stalls) from each
    canonical basis vector and from `restarts` random points on the unit
    sphere; the best local minimum over all starts is returned.
    """
    count = eigvecs.shape[1]
    if count == 0:
        raise ValueError("no vectors to combine")
    if rng is None:
        rng = rng_from(search.seed)
    obj = _CombinationObjective(eigvecs, search, tf)
    starts = [np.eye(count, dtype=np.complex128)[:, p] for p in range(count)]
    for _ in range(search.restarts):
        draw = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        starts.append(draw / np.linalg.norm(draw))
    best_beta, best_value = None, np.inf
    for start in starts:
        beta, value = _coordinate_descent(obj, start, search, trace=trace)
        if value < best_value:
            best_beta, best_value = beta, value
    return best_beta


def deflate(eigvecs: np.ndarray, found: np.ndarray, start_index: int = 0) -> np.ndarray:
    """Project the found unit vector out of columns start_index.. and renormalize.

    A column that coincides with the found vector (overlap magnitude within
    1e-12 of one) is dropped instead of being divided by a vanishing norm.
    """
    found = np.asarray(found, dtype=np.complex128).ravel()
    norm = np.linalg.norm(found)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError("found vector must have unit norm")
    kept = [eigvecs[:, p] for p in range(start_index)]
    for p in range(start_index, eigvecs.shape[1]):
        column = eigvecs[:, p]
        overlap = np.vdot(found, column)
        if abs(overlap) >= 1.0 - 1e-12:
            continue
        residual = column - overlap * found
        kept.append(residual / np.linalg.norm(residual))
    if not kept:
        return np.empty((eigvecs.shape[0], 0), dtype=np.complex128)
    return np.column_stack(kept)


def _vector_measure(vector: np.ndarray, search: SearchConfig, tf: TFConfig) -> float:
    return concentration_measure(stft(vector, tf), search.p_norm, tau=search.support_tau)


def decompose(
    signal: MultivariateSignal,
    p_hint: int | None = None,
    search: SearchConfig | None = None,
    tf: TFConfig | None = None,
) -> DecompositionResult:
    """Recover the signal components from a sensed multichannel signal.

    Pipeline: autocorrelation matrix -> Hermitian eigendecomposition -> keep
    the top M eigenvectors (M from p_hint, else the count of eigenvalues
    above 1 percent of the largest). Components are then extracted slot by
    slot: minimize the concentration over combinations of the still-active
    vectors, replace the slot with the minimizer, and deflate the remaining
    vectors against it. After each full pass the vectors are sorted by
    ascending concentration measure; passes repeat until no measure changes
    by more than tol (at most 10 passes).
    """
    search = search or SearchConfig()
    tf = tf or TFConfig()
    es = hermitian_eig(autocorrelation(signal))
    if p_hint is not None:
        if p_hint < 1:
            raise ValueError("p_hint must be >= 1")
        count = min(p_hint, signal.sample_count)
    else:
        count = significant_rank(es, _RANK_THRESHOLD)
    if count == 0:
        raise ValueError("no significant components")
    basis = es.eigenvectors[:, :count].copy()
    vectors = basis.copy()
    measures = np.array([_vector_measure(vectors[:, p], search, tf) for p in range(count)])
    order = np.argsort(measures, kind="stable")
    vectors, measures = vectors[:, order], measures[order]
    passes_used = 0
    for pass_index in range(_MAX_PASSES):
        previous = measures.copy()
        slot = 0
        while slot < vectors.shape[1]:
            # Deflation reshuffles the concentration of the remaining vectors,
            # so re-sort them first: the slot then always extracts the most
            # concentrated signal still available, and a search started from
            # it cannot lose to a stalled later vector (which would collapse
            # the span when the duplicate gets dropped).
            rest = vectors[:, slot:]
            rest_measures = np.array(
                [_vector_measure(rest[:, p], search, tf) for p in range(rest.shape[1])]
            )
            vectors[:, slot:] = rest[:, np.argsort(rest_measures, kind="stable")]
            active = vectors[:, slot:]
            # Restart draws are keyed by slot only, so once the vector set
            # stops changing a pass reproduces itself and iteration stops.
            rng = rng_from(search.seed, slot)
            beta = minimize_concentration(active, search, tf, rng=rng)
            found = combine(active, beta)
            vectors[:, slot] = found
            vectors = deflate(vectors, found, start_index=slot + 1)
            slot += 1
        measures = np.array([_vector_measure(vectors[:, p], search, tf) for p in range(vectors.shape[1])])
        order = np.argsort(measures, kind="stable")
        vectors, measures = vectors[:, order], measures[order]
        passes_used = pass_index + 1
        if measures.size == previous.size and np.all(
            np.abs(measures - previous) <= search.tol * np.maximum(previous, 1e-300)
        ):
            break
    coefficients = [basis.conj().T @ vectors[:, p] for p in range(vectors.shape[1])]
    components = ComponentSet(vectors.T, n0=signal.n0)
    return DecompositionResult(components, measures, coefficients, passes_used)
