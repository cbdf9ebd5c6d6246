"""Ground-state spin Hamiltonian of a coupled electron/nuclear spin-1/2 pair.

The Hamiltonian, expressed in Hz on the |m_S, m_I> product basis, is

    H/h = (g_e mu_B / h) B0 Sz - (g_n mu_N / h) B0 Iz + A S.I

with A the hyperfine constant in Hz.  At zero field the eigenstates are an
electron-nuclear singlet (energy -3A/4) and a degenerate triplet (A/4 each);
the S0 <-> T0 transition is first-order insensitive to field (a clock
transition).  Defaults are the 77Se+ 1s:A values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .units import CONSTANTS, Quantity

LABELS = ("S0", "T-", "T0", "T+")

# Spin-1/2 operators (dimensionless).
_SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
_SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
_SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
_ID = np.eye(2, dtype=complex)

_SZ_E = np.kron(_SZ, _ID)
_IZ_N = np.kron(_ID, _SZ)
_S_DOT_I = sum(np.kron(s, s) for s in (_SX, _SY, _SZ))

# Zero-field eigenbasis as columns, ordered (S0, T-, T0, T+); product basis
# order is (up,up), (up,dn), (dn,up), (dn,dn).
_SQ2 = 1.0 / math.sqrt(2.0)
ZERO_FIELD_BASIS = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [_SQ2, 0.0, _SQ2, 0.0],
        [-_SQ2, 0.0, _SQ2, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class SpinSystem:
    """g-factors, hyperfine constant (Hz) and static field (T)."""

    g_e: float = 2.0057
    g_n: float = 1.07
    hyperfine: float = 1.66e9  # Hz
    b0: float = 0.0  # T

    def __post_init__(self):
        if not self.g_e > 0:
            raise ValidationError(f"g_e must be positive, got {self.g_e}")
        if self.b0 < 0:
            raise ValidationError(f"b0 must be >= 0, got {self.b0}")
        for name in ("g_e", "g_n", "hyperfine", "b0"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @property
    def electron_zeeman_rate(self) -> float:
        """g_e mu_B / h, the electron Zeeman slope in Hz/T."""
        return self.g_e * CONSTANTS.bohr_magneton / CONSTANTS.planck

    @property
    def nuclear_zeeman_rate(self) -> float:
        """g_n mu_N / h in Hz/T."""
        return self.g_n * CONSTANTS.nuclear_magneton / CONSTANTS.planck


@dataclass(frozen=True)
class SpinMatrix:
    """4x4 Hermitian Hamiltonian matrix in Hz."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"spin matrix must be 4x4, got {m.shape}")
        object.__setattr__(self, "entries", m)
        _require_hermitian(m)

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class LevelSet:
    """Eigenenergies (Hz, ascending), labels, and eigenvector columns."""

    energies: np.ndarray
    labels: tuple
    eigenvectors: np.ndarray

    def energy(self, label: str) -> float:
        _require_label(label)
        return float(self.energies[self.labels.index(label)])

    def vector(self, label: str) -> np.ndarray:
        _require_label(label)
        return self.eigenvectors[:, self.labels.index(label)]


def _require_label(label: str):
    if label not in LABELS:
        raise ValidationError(f"unknown level label '{label}', expected one of {LABELS}")


def _require_hermitian(m: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > 1e-12 * scale:
        raise ValidationError("matrix is not Hermitian within 1e-12 relative")


def _hamiltonian_matrix(g_e: float, g_n: float, hyperfine: float, b0: float) -> np.ndarray:
    """Signed-field Hamiltonian in Hz; b0 may be negative for derivatives."""
    ze = g_e * CONSTANTS.bohr_magneton / CONSTANTS.planck * b0
    zn = g_n * CONSTANTS.nuclear_magneton / CONSTANTS.planck * b0
    return ze * _SZ_E - zn * _IZ_N + hyperfine * _S_DOT_I


def build_hamiltonian(sys: SpinSystem) -> SpinMatrix:
    """Assemble the spin Hamiltonian on the product basis, all terms in Hz."""
    return SpinMatrix(_hamiltonian_matrix(sys.g_e, sys.g_n, sys.hyperfine, sys.b0))


def _jacobi_eigh(matrix: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic complex Jacobi diagonalization for a small Hermitian matrix.

    Self-contained on purpose: the dimension is fixed at 4 and the rotation
    count is tiny, so no external eigensolver is needed.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(a))))
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if math.sqrt(off) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= tol * scale * 1e-4:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sign = 1.0 if tau >= 0 else -1.0
                t = sign / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # A <- J^H A J with J[p,p]=J[q,q]=c, J[p,q]=s*phase,
                # J[q,p]=-s*conj(phase).
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * phase * vp + c * vq
    return np.diag(a).real.copy(), v


def _assign_labels(eigenvectors: np.ndarray, reference: np.ndarray) -> tuple:
    """Label eigenvector columns by maximum overlap with a reference basis.

    Reference columns are ordered (S0, T-, T0, T+).  The best of the 24
    assignments wins; ties resolve deterministically by permutation order.
    """
    overlap = np.abs(reference.conj().T @ eigenvectors) ** 2
    best, best_score = None, -1.0
    for perm in itertools.permutations(range(4)):
        score = sum(overlap[perm[i], i] for i in range(4))
        if score > best_score + 1e-15:
            best, best_score = perm, score
    return tuple(LABELS[k] for k in best)


def eigensolve(m: SpinMatrix, reference_basis: np.ndarray | None = None) -> LevelSet:
    """Diagonalize; labels continue adiabatically from the zero-field basis.

    ``reference_basis`` columns (S0, T-, T0, T+ order) override the default
    zero-field basis so callers can step the field and track labels across
    mixing regions.
    """
    _require_hermitian(m.entries)
    evals, evecs = _jacobi_eigh(m.entries)
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]
    ref = ZERO_FIELD_BASIS if reference_basis is None else reference_basis
    labels = _assign_labels(evecs, ref)
    return LevelSet(energies=evals, labels=labels, eigenvectors=evecs)


def _levels_at_signed_field(sys: SpinSystem, b0: float, steps: int | None = None) -> LevelSet:
    if steps is None:
        # Mixing rotates over a field scale A h / (g_e mu_B); 5 mT steps keep
        # each rotation small for the default constants.
        steps = max(1, int(math.ceil(abs(b0) / 0.005)))
    ref = ZERO_FIELD_BASIS
    levels = eigensolve(SpinMatrix(_hamiltonian_matrix(sys.g_e, sys.g_n, sys.hyperfine, 0.0)))
    for k in range(1, steps + 1):
        b = b0 * k / steps
        levels = eigensolve(
            SpinMatrix(_hamiltonian_matrix(sys.g_e, sys.g_n, sys.hyperfine, b)), ref
        )
        ref = _label_ordered_basis(levels)
    return levels


def _label_ordered_basis(levels: LevelSet) -> np.ndarray:
    basis = np.empty((4, 4), dtype=complex)
    for k, label in enumerate(LABELS):
        basis[:, k] = levels.eigenvectors[:, levels.labels.index(label)]
    return basis


def level_structure(sys: SpinSystem, steps: int | None = None) -> LevelSet:
    """Labeled level set at the system field, stepping from zero field."""
    return _levels_at_signed_field(sys, sys.b0, steps)


def transition_frequency(levels: LevelSet, frm: str, to: str) -> Quantity:
    """|E_to - E_from| in Hz between two labeled levels."""
    _require_label(frm)
    _require_label(to)
    if frm == to:
        raise ValidationError(f"transition labels must differ, got '{frm}' twice")
    return Quantity(abs(levels.energy(to) - levels.energy(frm)), 0.0, "Hz")


def clock_transition_slope(sys: SpinSystem, frm: str, to: str, db: float = 1e-4) -> Quantity:
    """Central finite-difference d f / d B0 of a labeled transition, Hz/T.

    The field is stepped to sys.b0 +/- db with label continuation from zero
    field; db must be small against the hyperfine field scale A h/(g_e mu_B).
    """
    if not db > 0:
        raise ValidationError(f"db must be positive, got {db}")
    _require_label(frm)
    _require_label(to)
    if frm == to:
        raise ValidationError(f"transition labels must differ, got '{frm}' twice")
    f_plus = transition_frequency(_levels_at_signed_field(sys, sys.b0 + db), frm, to).value
    f_minus = transition_frequency(_levels_at_signed_field(sys, sys.b0 - db), frm, to).value
    return Quantity((f_plus - f_minus) / (2.0 * db), 0.0, "Hz/T")
