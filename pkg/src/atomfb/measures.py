"""Two-qubit correlation measures and trajectory feature detectors.

Concurrence follows the spin-flip construction: with rho_tilde =
(sy x sy) rho* (sy x sy), the concurrence is max(0, l1 - l2 - l3 - l4) where
l_i are the descending square roots of the eigenvalues of rho*rho_tilde.
Those square roots are computed here as the singular values of
sqrt(rho) (sy x sy) sqrt(rho)^T, which is exact for the rank-deficient states
that occur on the positivity boundary of X-form trajectories (the plain
eigenvalue route loses ~1e-7 there).

The geometric discord is the minimal squared Hilbert-Schmidt distance to the
zero-discord states; for a measurement on atom m it evaluates to
(||x||^2 + ||T||_F^2 - k_max)/4 with x the Bloch vector of atom m, T the
correlation matrix and k_max the largest eigenvalue of x x^T + T T^T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import SymXState, pauli, tensor

__all__ = [
    "BlochForm",
    "FeatureReport",
    "analyze_series",
    "bloch_decompose",
    "concurrence",
    "concurrence_sym_x",
    "esd_windows",
    "gmqd",
    "gmqd_sym_x",
    "partial_transpose",
    "ppt_separable",
    "sample_density",
    "sample_sym_x",
    "sudden_change_points",
]

_SPIN_FLIP = tensor(pauli("y"), pauli("y")).real  # real antidiagonal (-1,1,1,-1)
_EIG_CLAMP = -1e-9


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix, clamping eigenvalue noise."""
    w, u = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w.min() < _EIG_CLAMP:
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {w.min():.3e}")
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def concurrence(rho: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix, in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    root = _sqrtm_psd(rho)
    lam = np.linalg.svd(root @ _SPIN_FLIP @ root.T, compute_uv=False)
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def concurrence_sym_x(state: SymXState) -> float:
    """Concurrence of an X-form state: max[0, 1-(sqrt(a)+sqrt(b))^2, 2|e|+a+b-1]."""
    a = max(state.a, 0.0)
    b = max(state.b, 0.0)
    return max(0.0,
               1.0 - (np.sqrt(a) + np.sqrt(b)) ** 2,
               2.0 * abs(state.e) + a + b - 1.0)


@dataclass
class BlochForm:
    """Local Bloch vectors and correlation matrix of a two-qubit state."""

    x: np.ndarray  # atom-1 Bloch vector, x_i = Tr(rho sigma_i x I)
    y: np.ndarray  # atom-2 Bloch vector
    t_matrix: np.ndarray  # T_ij = Tr(rho sigma_i x sigma_j)

    def reconstruct(self) -> np.ndarray:
        """Rebuild the density matrix from the Bloch data."""
        eye = np.eye(2, dtype=complex)
        rho = tensor(eye, eye).astype(complex)
        sig = [pauli(ax) for ax in "xyz"]
        for i in range(3):
            rho += self.x[i] * tensor(sig[i], eye)
            rho += self.y[i] * tensor(eye, sig[i])
            for j in range(3):
                rho += self.t_matrix[i, j] * tensor(sig[i], sig[j])
        return 0.25 * rho


def bloch_decompose(rho: np.ndarray) -> BlochForm:
    """Bloch vectors and correlation matrix of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    eye = np.eye(2, dtype=complex)
    sig = [pauli(ax) for ax in "xyz"]
    x = np.array([np.trace(rho @ tensor(s, eye)).real for s in sig])
    y = np.array([np.trace(rho @ tensor(eye, s)).real for s in sig])
    t_matrix = np.array([[np.trace(rho @ tensor(si, sj)).real for sj in sig]
                         for si in sig])
    return BlochForm(x=x, y=y, t_matrix=t_matrix)


def gmqd(rho: np.ndarray, measured_atom: int = 1) -> float:
    """Geometric measure of quantum discord, in [0, 1/2].

    ``measured_atom`` selects the side of the local measurement (1 or 2);
    the two coincide for exchange-symmetric states.
    """
    bloch = bloch_decompose(rho)
    t_mat = bloch.t_matrix
    if measured_atom == 1:
        vec, gram = bloch.x, t_mat @ t_mat.T
    elif measured_atom == 2:
        vec, gram = bloch.y, t_mat.T @ t_mat
    else:
        raise ValueError(f"measured_atom must be 1 or 2, got {measured_atom}")
    k_max = np.linalg.eigvalsh(np.outer(vec, vec) + gram)[-1]
    return max(0.0, 0.25 * (vec @ vec + (t_mat * t_mat).sum() - k_max))


def gmqd_sym_x(state: SymXState) -> float:
    """Geometric discord of an X-form state: min[D1, D2, D3]/4 with

    D1 = (-1+a+b+2e)^2 + (-1+a+b-2e)^2
    D2 = (a-b)^2 + (-1+2a+2b)^2 + (-1+a+b-2e)^2
    D3 = (a-b)^2 + (-1+2a+2b)^2 + (-1+a+b+2e)^2
    """
    a, b, e = state.a, state.b, state.e
    plus = (-1.0 + a + b + 2.0 * e) ** 2
    minus = (-1.0 + a + b - 2.0 * e) ** 2
    radial = (a - b) ** 2 + (-1.0 + 2.0 * a + 2.0 * b) ** 2
    return min(plus + minus, radial + minus, radial + plus) / 4.0


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Partial transpose over atom 2."""
    rho = np.asarray(rho, dtype=complex)
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_separable(rho: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff the partial transpose is positive within ``tol``.

    For two qubits positivity of the partial transpose is necessary and
    sufficient for separability.
    """
    pt = partial_transpose(rho)
    return bool(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T)).min() >= -tol)


def esd_windows(times, series, zero_tol: float = 1e-6) -> list[tuple[float, float]]:
    """Maximal intervals where ``series`` stays at zero (within zero_tol).

    A run that touches zero at a single sample only is not a window.  Returns
    (t_start, t_end) pairs in increasing order.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape:
        raise ValueError(f"length mismatch: {times.shape} times vs {series.shape} values")
    if not zero_tol > 0:
        raise ValueError(f"zero_tol must be positive, got {zero_tol}")
    mask = series <= zero_tol
    windows = []
    i = 0
    n = len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            if j > i:
                windows.append((float(times[i]), float(times[j])))
            i = j + 1
        else:
            i += 1
    return windows


def sudden_change_points(times, series, kink_threshold: float | None = None) -> list[float]:
    """Times where the slope of ``series`` jumps while the value is continuous.

    The detector flags samples whose normalized second difference
    |s[i+1] - 2 s[i] + s[i-1]| / dt (an estimate of the local slope jump)
    exceeds ``kink_threshold``.  By default the threshold is 50x the median
    of that quantity over the series, which is scale-free; a small floor
    keeps exactly-piecewise-linear series from tripping on roundoff.  Runs of
    adjacent flagged samples (a kink falling between grid points) collapse to
    the single strongest sample.  Samples whose first differences are far
    above the series' typical step (a value discontinuity rather than a
    slope one) are excluded.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape:
        raise ValueError(f"length mismatch: {times.shape} times vs {series.shape} values")
    if len(times) < 3:
        raise ValueError("need at least 3 samples to detect slope discontinuities")
    steps = np.diff(times)
    dt = steps[0]
    if not dt > 0 or np.abs(steps - dt).max() > 1e-9 * max(dt, 1.0):
        raise ValueError("time grid must be uniform and increasing")

    first = np.diff(series)
    kink = np.abs(series[2:] - 2.0 * series[1:-1] + series[:-2]) / dt
    scale = max(1.0, np.abs(series).max())
    if kink_threshold is None:
        floor = 1024.0 * np.finfo(float).eps * scale / dt
        kink_threshold = 50.0 * max(float(np.median(kink)), floor)
    elif not kink_threshold > 0:
        raise ValueError(f"kink_threshold must be positive, got {kink_threshold}")
    jump_tol = 10.0 * float(np.median(np.abs(first))) + 1e3 * np.finfo(float).eps * scale

    flagged = []
    for i in range(len(kink)):
        if kink[i] <= kink_threshold:
            continue
        if max(abs(first[i]), abs(first[i + 1])) > jump_tol:
            continue  # the value itself jumps; not a slope kink
        flagged.append(i)

    points = []
    k = 0
    while k < len(flagged):
        j = k
        while j + 1 < len(flagged) and flagged[j + 1] == flagged[j] + 1:
            j += 1
        cluster = flagged[k:j + 1]
        best = max(cluster, key=lambda idx: kink[idx])
        points.append(float(times[best + 1]))
        k = j + 1
    return points


@dataclass
class FeatureReport:
    """Detected features of one scalar series along a trajectory."""

    esd_windows: list[tuple[float, float]] = field(default_factory=list)
    sudden_change_times: list[float] = field(default_factory=list)
    steady_value: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "esd_windows": [[s, e] for s, e in self.esd_windows],
            "window_lengths": [e - s for s, e in self.esd_windows],
            "sudden_change_times": list(self.sudden_change_times),
            "steady_value": self.steady_value,
        }


def analyze_series(times, series, zero_tol: float = 1e-6) -> FeatureReport:
    """Feature report (zero windows, kinks, final value) for one series."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    return FeatureReport(
        esd_windows=esd_windows(times, series, zero_tol=zero_tol),
        sudden_change_times=sudden_change_points(times, series),
        steady_value=float(series[-1]),
    )


def sample_sym_x(rng: np.random.Generator) -> SymXState:
    """Random valid X-form state: (a, b) uniform on the simplex a+b <= 1,
    e uniform on [-sqrt(ab), sqrt(ab)]."""
    a, b = rng.uniform(size=2)
    if a + b > 1.0:
        a, b = 1.0 - a, 1.0 - b
    bound = np.sqrt(a * b)
    return SymXState(a=a, b=b, e=rng.uniform(-bound, bound))


def sample_density(rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random two-qubit mixture (Ginibre construction with the given rank)."""
    if rank is None:
        rank = int(rng.integers(1, 5))
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / rho.trace().real
