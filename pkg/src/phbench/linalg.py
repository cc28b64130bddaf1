"""Dense complex linear-algebra substrate.

Hermitian eigendecompositions, numerical null spaces, Kronecker products and
partial traces over cyclic qubit windows. Everything here is a thin,
contract-checked layer over numpy/LAPACK; all functions are pure and the
returned arrays are freshly allocated.

Conventions:
  * statevectors are 1-d complex arrays of length 2**N, with qubit 0 as the
    most significant bit of the basis index,
  * eigenvectors are returned as matrix columns.
"""

from __future__ import annotations

import numpy as np

# Entrywise tolerance for accepting a matrix as Hermitian.
HERMITIAN_ATOL = 1e-12

# Default relative eigenvalue threshold for the numerical kernel, with an
# absolute floor used when the spectrum is small (see `nullspace_hermitian`).
# True zeros of circuit-derived density matrices sit at the eigensolver's
# noise floor (~1e-14 of lambda_max) while genuinely small eigenvalues can
# reach ~1e-13 of lambda_max, so the threshold sits between the two; it also
# keeps the summed leakage of a full projector family below 1e-9.
KERNEL_TOL = 1e-12
KERNEL_ABS_FLOOR = 1e-13


def check_hermitian(m, atol=HERMITIAN_ATOL):
    """Return m as a complex array, raising if it is not square Hermitian.

    The check is entrywise: max |M - M^dag| must not exceed `atol`.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if deviation > atol:
        raise ValueError(
            "symmetry violation: matrix is not Hermitian, "
            f"max |M - M^dag| = {deviation:.3e} exceeds {atol:.1e}"
        )
    return m


def eigh(m, atol=HERMITIAN_ATOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    orthonormal eigenvectors as the columns of the second array, so that
    m @ vecs[:, k] == vals[k] * vecs[:, k].
    """
    m = check_hermitian(m, atol)
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def nullspace_hermitian(m, tol=KERNEL_TOL, atol=HERMITIAN_ATOL):
    """Orthonormal basis of the numerical kernel of a Hermitian PSD matrix.

    Eigenvectors whose eigenvalues fall at or below tol * lambda_max are
    considered kernel vectors; when lambda_max < 1 the threshold is floored
    at KERNEL_ABS_FLOOR so that exact zeros of small-trace density matrices
    are still picked up. Returns a (dim, k) array whose columns are the
    basis (k may be 0).

    Raises ValueError if the matrix is not PSD within the same threshold.
    """
    vals, vecs = eigh(m, atol)
    lam_max = float(vals[-1]) if vals.size else 0.0
    threshold = tol * lam_max
    if lam_max < 1.0:
        threshold = max(threshold, KERNEL_ABS_FLOOR)
    if vals.size and vals[0] < -threshold:
        raise ValueError(
            f"matrix is not PSD within tolerance: min eigenvalue {vals[0]:.3e} "
            f"< -{threshold:.3e}"
        )
    mask = vals <= threshold
    return vecs[:, mask]


def kron(a, b):
    """Kronecker product of two matrices (row-major index convention)."""
    return np.kron(np.asarray(a), np.asarray(b))


def num_qubits_of(state):
    """Number of qubits of a statevector, raising if its length is not 2**N."""
    state = np.asarray(state)
    if state.ndim != 1:
        raise ValueError(f"expected a 1-d statevector, got shape {state.shape}")
    n = int(state.shape[0]).bit_length() - 1
    if 2**n != state.shape[0]:
        raise ValueError(f"statevector length {state.shape[0]} is not a power of 2")
    return n


def _validate_cyclic_window(keep, num_qubits):
    keep = [int(q) for q in keep]
    if not 1 <= len(keep) <= num_qubits:
        raise ValueError(f"window length {len(keep)} not in 1..{num_qubits}")
    if any(not 0 <= q < num_qubits for q in keep):
        raise ValueError(f"qubit indices {keep} out of range for N={num_qubits}")
    for prev, cur in zip(keep, keep[1:]):
        if cur != (prev + 1) % num_qubits:
            raise ValueError(
                f"window {keep} is not a consecutive cyclic run of qubits"
            )
    if len(set(keep)) != len(keep):
        raise ValueError(f"window {keep} repeats qubit indices")
    return keep


def partial_trace(state, keep):
    """Reduced density matrix of a normalized statevector on a cyclic window.

    `keep` must be a consecutive run of qubit indices mod N (e.g. [5, 6, 7]
    or the wrapping [7, 0, 1] on 8 qubits). The row/column ordering of the
    result follows the order of `keep`, first index most significant.
    """
    state = np.asarray(state, dtype=complex)
    n_qubits = num_qubits_of(state)
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"statevector is not normalized: |v| = {norm!r}")
    keep = _validate_cyclic_window(keep, n_qubits)
    n = len(keep)
    rest = [q for q in range(n_qubits) if q not in keep]
    tensor = state.reshape([2] * n_qubits)
    tensor = np.transpose(tensor, keep + rest)
    mat = tensor.reshape(2**n, 2 ** (n_qubits - n))
    return mat @ mat.conj().T
