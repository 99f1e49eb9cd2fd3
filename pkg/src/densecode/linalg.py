"""Dense complex linear algebra: Kronecker products, partial traces,
Hermitian eigenproblems and entropy functionals.

All capacities downstream are in bits, so every entropy here uses log base 2.
Matrices are plain complex ``numpy`` arrays; states are validated with
:func:`validate_density_matrix` rather than wrapped in a class.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    LayoutError,
    NumericalError,
    ProbabilityError,
    SizeLimitError,
)

DEFAULT_MAX_DIM = 1024
MAX_DIM_ENV_VAR = "DENSECODE_MAX_DIM"

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
EIG_CLIP = 1e-12


def dimension_cap() -> int:
    """Hard cap on total Hilbert-space dimension (dense storage only).

    Overridable through the ``DENSECODE_MAX_DIM`` environment variable.
    """
    raw = os.environ.get(MAX_DIM_ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        cap = int(raw)
    except ValueError as exc:
        raise SizeLimitError(f"{MAX_DIM_ENV_VAR} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise SizeLimitError(f"{MAX_DIM_ENV_VAR} must be >= 2, got {cap}")
    return cap


def check_dim(dim: int) -> int:
    cap = dimension_cap()
    if dim > cap:
        raise SizeLimitError(f"dimension {dim} exceeds cap {cap}")
    return dim


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce input to a 2-d complex array, rejecting NaN/Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise NumericalError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise NumericalError(f"{name} contains non-finite entries")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product with the configured size cap enforced."""
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    check_dim(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))
    return np.kron(a, b)


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    """Left-fold Kronecker product: sender slots ascending, receiver last."""
    out = None
    for m in mats:
        out = m if out is None else kron(out, m)
    if out is None:
        return np.eye(1, dtype=complex)
    return as_complex_matrix(out)


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered local dimensions: ``k`` sender slots followed by one receiver slot.

    The receiver slot may be a product dimension (several physical receiver
    subsystems treated jointly).
    """

    sender_dims: tuple[int, ...]
    receiver_dim: int

    def __init__(self, sender_dims: Sequence[int], receiver_dim: int):
        sender_dims = tuple(int(d) for d in sender_dims)
        receiver_dim = int(receiver_dim)
        if len(sender_dims) < 1:
            raise LayoutError("need at least one sender slot")
        if any(d < 2 for d in sender_dims) or receiver_dim < 2:
            raise LayoutError("all slot dimensions must be >= 2")
        object.__setattr__(self, "sender_dims", sender_dims)
        object.__setattr__(self, "receiver_dim", receiver_dim)
        check_dim(self.total_dim)

    @property
    def k(self) -> int:
        """Number of sender slots."""
        return len(self.sender_dims)

    @property
    def dims(self) -> tuple[int, ...]:
        """All slot dimensions, senders first, receiver last."""
        return self.sender_dims + (self.receiver_dim,)

    @property
    def sender_dim(self) -> int:
        """Product dimension of the joint sender space."""
        return math.prod(self.sender_dims)

    @property
    def total_dim(self) -> int:
        return self.sender_dim * self.receiver_dim

    @property
    def receiver_slot(self) -> int:
        return self.k


def validate_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the array.

    Tolerances: ``1e-10`` max-norm Hermiticity, ``1e-10`` trace deviation,
    minimum eigenvalue ``>= -1e-10``.
    """
    rho = as_complex_matrix(rho, "rho")
    if rho.shape[0] != rho.shape[1]:
        raise NumericalError(f"density matrix must be square, got {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise LayoutError(f"expected dimension {dim}, got {rho.shape[0]}")
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > HERMITICITY_TOL:
        raise NumericalError(f"not Hermitian: max deviation {herm_dev:.3e}")
    trace_dev = abs(rho.trace() - 1.0)
    if trace_dev > TRACE_TOL:
        raise NumericalError(f"trace differs from 1 by {trace_dev:.3e}")
    min_eig = np.linalg.eigvalsh(rho)[0]
    if min_eig < -PSD_TOL:
        raise NumericalError(f"not positive semidefinite: min eigenvalue {min_eig:.3e}")
    return rho


def partial_trace(rho, layout: SubsystemLayout, keep) -> np.ndarray:
    """Reduced state on the slots in ``keep`` (kept in ascending slot order)."""
    rho = as_complex_matrix(rho, "rho")
    dims = layout.dims
    n = len(dims)
    if rho.shape != (layout.total_dim, layout.total_dim):
        raise LayoutError(
            f"state dimension {rho.shape[0]} does not match layout total {layout.total_dim}"
        )
    keep = sorted(set(int(s) for s in keep))
    if not keep:
        raise LayoutError("keep set must not be empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise LayoutError(f"keep indices {keep} out of range for {n} slots")

    tensor = rho.reshape(dims + dims)
    dropped = [s for s in range(n) if s not in keep]
    remaining = n
    for slot in sorted(dropped, reverse=True):
        tensor = np.trace(tensor, axis1=slot, axis2=slot + remaining)
        remaining -= 1
    out_dim = math.prod(dims[s] for s in keep)
    return tensor.reshape(out_dim, out_dim)


def permute_slots(rho, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor slots so output slot p carries input slot perm[p]."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise LayoutError(f"{perm} is not a permutation of {n} slots")
    total = math.prod(dims)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (total, total):
        raise LayoutError(f"state shape {rho.shape} does not match dims {dims}")
    tensor = rho.reshape(dims + dims)
    axes = perm + [n + p for p in perm]
    return tensor.transpose(axes).reshape(total, total)


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and eigenvectors of a Hermitian matrix."""
    m = as_complex_matrix(m, "m")
    dev = np.abs(m - m.conj().T).max()
    if dev > 1e-8:
        raise NumericalError(f"hermitian_eig: input deviates from Hermitian by {dev:.3e}")
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def _entropy_from_eigenvalues(w: np.ndarray) -> float:
    if w.min() < -PSD_TOL:
        raise NumericalError(
            f"entropy of indefinite operator: min eigenvalue {w.min():.3e}"
        )
    w = np.clip(w, 0.0, None)
    w = w[w > EIG_CLIP]
    return float(-(w * np.log2(w)).sum())


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits; eigenvalues below 1e-12 contribute zero."""
    rho = as_complex_matrix(rho, "rho")
    dev = np.abs(rho - rho.conj().T).max()
    if dev > 1e-8:
        raise NumericalError(f"entropy of non-Hermitian operator (dev {dev:.3e})")
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(rho))


def shannon_entropy(p) -> float:
    """Shannon entropy in bits of a probability vector (any shape)."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size and p.min() < -1e-12:
        raise ProbabilityError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ProbabilityError(f"probabilities sum to {p.sum()!r}, not 1")
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def herm_expm(h) -> np.ndarray:
    """Unitary exp(iH) of a Hermitian generator, via eigendecomposition."""
    h = as_complex_matrix(h, "h")
    dev = np.abs(h - h.conj().T).max()
    if dev > 1e-8:
        raise NumericalError(f"herm_expm: generator deviates from Hermitian by {dev:.3e}")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


# Seeded random fixtures shared by certification routines and tests.

def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from a QR decomposition with phase fixing."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases = phases / np.abs(phases)
    return q * phases


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / rho.trace()
