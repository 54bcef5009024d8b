"""Fixed operators and state parametrizations for two collectively damped atoms.

Two-atom basis ordering is {|gg>, |ge>, |eg>, |ee>} (index 0..3), with atom 1
as the left tensor factor.  The single-atom basis is {|g>, |e>}, and the Pauli
matrices are the textbook ones in that ordering, so sigma_z|g> = +|g> and
sigma_minus = |g><e| lowers the excited state.  This sign convention is what
makes the symmetric feedback operator couple |gg> to the triplet state
(|eg>+|ge>)/sqrt(2), which is required for the maximally entangled steady
state at perfect detection (see the acceptance suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BASIS_LABELS",
    "INITIAL_STATE_NAMES",
    "NotSymXFormError",
    "SymXState",
    "collective_lowering",
    "density_from_sym_x",
    "drive_hamiltonian",
    "feedback_operator",
    "initial_state",
    "pauli",
    "sym_x_from_density",
    "tensor",
    "validate_density",
]

BASIS_LABELS = ("gg", "ge", "eg", "ee")

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
_I2 = np.eye(2, dtype=complex)

# Hermiticity / trace / positivity tolerances for density-matrix validation.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-9


class NotSymXFormError(ValueError):
    """Raised when a density matrix is not of the symmetric X form."""


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {'x', 'y', 'z'}.

    The single-atom basis is ordered {|g>, |e>}; with this ordering
    sigma_z = |g><g| - |e><e| = diag(+1, -1).
    """
    try:
        return _SIGMA[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected 'x', 'y' or 'z'") from None


def tensor(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Kronecker product with atom 1 as the left factor.

    ``tensor(P, I)`` acts with P on atom 1, so e.g. tensor(sigma_x, I)|eg>
    equals |gg>.
    """
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    if not (np.all(np.isfinite(left.real)) and np.all(np.isfinite(left.imag))
            and np.all(np.isfinite(right.real)) and np.all(np.isfinite(right.imag))):
        raise ValueError("tensor factors must have finite entries")
    return np.kron(left, right)


def collective_lowering(gamma: float = 1.0) -> np.ndarray:
    """Collective decay operator gamma * (sm x I + I x sm), sm = |g><e|."""
    if not gamma > 0:
        raise ValueError(f"collective decay rate must be positive, got {gamma}")
    return gamma * (tensor(_SIGMA_MINUS, _I2) + tensor(_I2, _SIGMA_MINUS))


def drive_hamiltonian(omega: float) -> np.ndarray:
    """Laser drive omega * (sigma_x x I + I x sigma_x)."""
    sx = _SIGMA["x"]
    return omega * (tensor(sx, _I2) + tensor(_I2, sx))


def feedback_operator(lam: float, mu: float) -> np.ndarray:
    """Symmetric feedback operator.

    F = -lam * [mu * (sigma_x x sigma_z + sigma_z x sigma_x)
                + (sigma_x x I + I x sigma_x)]

    F is Hermitian for all real gains and annihilates the singlet
    (|eg> - |ge>)/sqrt(2) for every (lam, mu).  At mu = 0 it reduces to the
    plain collective sigma_x drive -lam*(sigma_x x I + I x sigma_x).
    """
    sx, sz = _SIGMA["x"], _SIGMA["z"]
    cross = tensor(sx, sz) + tensor(sz, sx)
    local = tensor(sx, _I2) + tensor(_I2, sx)
    return -lam * (mu * cross + local)


_KETS = {
    "gg": np.array([1.0, 0.0, 0.0, 0.0]),
    "ge": np.array([0.0, 1.0, 0.0, 0.0]),
    "eg": np.array([0.0, 0.0, 1.0, 0.0]),
    "ee": np.array([0.0, 0.0, 0.0, 1.0]),
}
_SQ2 = 1.0 / np.sqrt(2.0)

_NAMED_KETS = {
    "ee": _KETS["ee"],
    "gg": _KETS["gg"],
    "eg": _KETS["eg"],
    "eg_plus": _SQ2 * (_KETS["eg"] + _KETS["ge"]),
    "eg_minus": _SQ2 * (_KETS["eg"] - _KETS["ge"]),
    "eegg_plus": _SQ2 * (_KETS["ee"] + _KETS["gg"]),
    "eegg_minus": _SQ2 * (_KETS["ee"] - _KETS["gg"]),
}

INITIAL_STATE_NAMES = tuple(_NAMED_KETS)


def initial_state(name: str) -> np.ndarray:
    """Density matrix of a named pure initial state.

    Recognized names: ee, gg, eg, eg_plus, eg_minus, eegg_plus, eegg_minus,
    where eg_plus/eg_minus are (|eg> +/- |ge>)/sqrt(2) and
    eegg_plus/eegg_minus are (|ee> +/- |gg>)/sqrt(2).
    """
    try:
        ket = _NAMED_KETS[name]
    except KeyError:
        valid = ", ".join(INITIAL_STATE_NAMES)
        raise ValueError(f"unknown initial state {name!r}; expected one of: {valid}") from None
    return np.outer(ket, ket).astype(complex)


def validate_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, unit trace, and positivity of a 4x4 density matrix.

    Returns the input as a complex array.  Raises ValueError when any of the
    invariants is violated beyond tolerance.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"{name} must be 4x4, got shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITICITY_TOL:
        raise ValueError(f"{name} is not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = abs(rho.trace() - 1.0)
    if tr > TRACE_TOL:
        raise ValueError(f"{name} trace deviates from 1 by {tr:.3e}")
    wmin = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if wmin < -POSITIVITY_TOL:
        raise ValueError(f"{name} has negative eigenvalue {wmin:.3e}")
    return rho


@dataclass(frozen=True)
class SymXState:
    """The (a, b, e) parametrization of the symmetric X-form density matrix.

    a is the weight on |gg><gg|, b the weight on |ee><ee|, e the real
    coherence between |gg> and |ee|.  The middle 2x2 block is filled with
    c = (1 - a - b)/2.  Validity requires a, b in [0, 1], a + b <= 1 and
    e^2 <= a*b; violations within ``atol`` (numerical noise from integration
    or closed-form evaluation at the positivity boundary) are clamped.
    """

    a: float
    b: float
    e: float

    _ATOL = 1e-9

    def __post_init__(self):
        a, b, e = float(self.a), float(self.b), float(self.e)
        tol = self._ATOL
        if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(e)):
            raise ValueError("SymXState parameters must be finite")
        if a < -tol or b < -tol or a > 1 + tol or b > 1 + tol or a + b > 1 + tol:
            raise ValueError(f"invalid X-form weights a={a}, b={b}")
        a = min(max(a, 0.0), 1.0)
        b = min(max(b, 0.0), min(1.0, 1.0 - a))
        if e * e > a * b + tol:
            raise ValueError(f"coherence too large: e^2={e*e} > a*b={a*b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "e", e)

    @property
    def c(self) -> float:
        return 0.5 * (1.0 - self.a - self.b)


def density_from_sym_x(state: SymXState) -> np.ndarray:
    """Build the 4x4 density matrix from its (a, b, e) parametrization."""
    a, b, e, c = state.a, state.b, state.e, state.c
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a
    rho[3, 3] = b
    rho[0, 3] = rho[3, 0] = e
    rho[1:3, 1:3] = c
    return rho


# Index pairs that must vanish for the X form (everything off the pattern).
_X_ZERO_PATTERN = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2)]


def sym_x_from_density(rho: np.ndarray, tol: float = 1e-9) -> SymXState:
    """Extract (a, b, e) from a density matrix of the symmetric X form.

    Raises NotSymXFormError when any entry outside the X pattern exceeds
    ``tol``, when the four middle-block entries disagree pairwise beyond
    ``tol``, or when the corner coherence has imaginary part beyond ``tol``
    (e.g. for a trajectory that has left the invariant family).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    for i, j in _X_ZERO_PATTERN:
        if abs(rho[i, j]) > tol:
            raise NotSymXFormError(
                f"entry ({i},{j}) = {rho[i, j]:.3e} exceeds tol={tol:.1e}")
    mid = rho[1:3, 1:3].ravel()
    if np.abs(mid - mid[0]).max() > tol:
        raise NotSymXFormError("middle-block entries disagree beyond tol")
    if max(abs(rho[0, 0].imag), abs(rho[3, 3].imag), abs(mid[0].imag)) > tol:
        raise NotSymXFormError("diagonal blocks have imaginary parts beyond tol")
    if abs(rho[0, 3].imag) > tol or abs(rho[0, 3] - rho[3, 0].conj()) > tol:
        raise NotSymXFormError("corner coherence is not real symmetric within tol")
    return SymXState(a=rho[0, 0].real, b=rho[3, 3].real, e=rho[0, 3].real)
