"""Parent Hamiltonians whose exact ground state is a given ansatz state.

The construction: compile the circuit at the chosen answer angles into a
ring MPS, widen cyclic windows until the reduced density matrix on every
window has a nontrivial null space, then sum the orthogonal projectors
onto those null spaces, one per anchor site. The resulting operator is a
PSD sum of projectors that annihilates the ansatz state, so the state is
its zero-energy ground state by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .circuit import AnsatzSpec, build_ansatz, expectation, simulate
from .mps import ansatz_to_mps, reduced_density

PAULI_DROP_DEFAULT = 1e-8

_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_STACK = np.stack([_PAULIS[p] for p in "IXYZ"])


class EmptyKernelError(ValueError):
    """The reduced density matrix has no numerical null space."""


@dataclass
class LocalTerm:
    """Projector onto the kernel of one window's reduced density matrix.

    `projector` is the 2**span square matrix acting on the cyclic window of
    qubits [anchor, anchor+span) mod N; `kernel_basis` holds orthonormal
    kernel vectors as columns and is rebuilt from the projector after
    deserialization.
    """

    anchor: int
    span: int
    projector: np.ndarray
    kernel_basis: np.ndarray | None = field(default=None, repr=False)

    def basis(self):
        if self.kernel_basis is None:
            vals, vecs = linalg.eigh(self.projector, atol=1e-9)
            self.kernel_basis = np.ascontiguousarray(vecs[:, vals > 0.5])
        return self.kernel_basis


@dataclass
class ParentHamiltonian:
    """Sum of kernel projectors, one anchored at every site of the ring."""

    num_qubits: int
    terms: list
    ansatz_spec: AnsatzSpec
    theta_ans: np.ndarray
    kernel_tol: float

    def __post_init__(self):
        if len(self.terms) != self.num_qubits:
            raise ValueError(
                f"expected one term per site ({self.num_qubits}), "
                f"got {len(self.terms)}"
            )


def minimal_support(mps, n_max, tol=linalg.KERNEL_TOL):
    """Smallest window length whose reduced densities all have null spaces.

    Scans n = 1, 2, ... and requires a nontrivial kernel at every anchor.
    Raises EmptyKernelError when no window length up to n_max works.
    """
    n_sites = mps.num_sites
    if not 1 <= n_max <= n_sites:
        raise ValueError(f"n_max {n_max} not in 1..{n_sites}")
    for n in range(1, n_max + 1):
        for anchor in range(n_sites):
            rho = reduced_density(mps, anchor, n)
            if linalg.nullspace_hermitian(rho, tol).shape[1] == 0:
                break
        else:
            return n
    raise EmptyKernelError(
        f"no window length up to {n_max} has a nontrivial kernel at every anchor"
    )


def kernel_projector(rho, tol=linalg.KERNEL_TOL):
    """Orthogonal projector onto the numerical kernel of a density matrix."""
    basis = linalg.nullspace_hermitian(rho, tol)
    if basis.shape[1] == 0:
        raise EmptyKernelError(
            "density matrix has full numerical rank; widen the window"
        )
    return basis @ basis.conj().T


def build_parent_hamiltonian(spec, theta_ans, kernel_tol=linalg.KERNEL_TOL):
    """Run the full recipe for one set of answer angles.

    Builds the MPS, finds the minimal window length, and assembles one
    kernel projector per anchor. The ansatz is two-site translation
    invariant, so only the anchor-0 and anchor-1 terms are computed
    directly; the rest reuse them, and two other anchors are spot-checked
    against directly computed projectors.
    """
    theta_ans = np.asarray(theta_ans, dtype=float)
    mps = ansatz_to_mps(spec, theta_ans)
    n_sites = spec.num_qubits
    span = minimal_support(mps, n_max=n_sites, tol=kernel_tol)

    prototypes = []
    for anchor in (0, 1):
        basis = linalg.nullspace_hermitian(
            reduced_density(mps, anchor, span), kernel_tol
        )
        prototypes.append((basis @ basis.conj().T, basis))

    terms = [
        LocalTerm(anchor, span, prototypes[anchor % 2][0], prototypes[anchor % 2][1])
        for anchor in range(n_sites)
    ]

    # Spot-check the translation-invariant reuse on two other anchors.
    picker = np.random.default_rng(n_sites)
    for anchor in picker.choice(np.arange(2, n_sites), size=2, replace=False):
        direct = kernel_projector(reduced_density(mps, int(anchor), span), kernel_tol)
        if np.max(np.abs(direct - terms[anchor].projector)) > 1e-9:
            raise AssertionError(
                f"translation-invariance check failed at anchor {anchor}"
            )

    ham = ParentHamiltonian(n_sites, terms, spec, theta_ans, kernel_tol)
    ground = expectation(simulate(build_ansatz(spec), theta_ans, n_sites), ham)
    if ground > 1e-9:
        raise AssertionError(
            f"generated Hamiltonian fails its exact-solution certificate: "
            f"E(theta_ans) = {ground:.3e}"
        )
    return ham


def dense_hamiltonian(ham):
    """Materialize the full 2**N x 2**N matrix (use only for diagonalization)."""
    n = ham.num_qubits
    if n > 13:
        raise ValueError(
            f"dense form of a {n}-qubit Hamiltonian is too large; capped at 13"
        )
    full = np.zeros((2**n, 2**n), dtype=complex)
    for term in ham.terms:
        window = [(term.anchor + t) % n for t in range(term.span)]
        rest = [q for q in range(n) if q not in window]
        w_bits = np.arange(2**term.span)
        base_w = np.zeros(2**term.span, dtype=np.int64)
        for t, q in enumerate(window):
            base_w |= ((w_bits >> (term.span - 1 - t)) & 1) << (n - 1 - q)
        r_bits = np.arange(2 ** (n - term.span))
        base_r = np.zeros(2 ** (n - term.span), dtype=np.int64)
        for t, q in enumerate(rest):
            base_r |= ((r_bits >> (len(rest) - 1 - t)) & 1) << (n - 1 - q)
        for r in base_r:
            idx = base_w + r
            full[idx[:, None], idx[None, :]] += term.projector
    return full


def exact_spectrum(ham):
    """All eigenvalues of the Hamiltonian, ascending (dense diagonalization)."""
    vals, _ = linalg.eigh(dense_hamiltonian(ham), atol=1e-9)
    return vals


# -- Pauli-basis expansion ------------------------------------------------------


@dataclass(frozen=True)
class PauliTerm:
    label: str
    coeff: float


def pauli_decomposition(term, drop_below=PAULI_DROP_DEFAULT):
    """Expand a local term as sum_P c_P P over tensor-product Pauli strings.

    c_P = Tr[P h] / 2**span. Strings with |c_P| < drop_below are omitted;
    the emitted order is lexicographic in I < X < Y < Z.
    """
    span = term.span
    coeffs = term.projector.reshape((2,) * (2 * span))
    for k in range(span):
        # contract current leading row/col axis pair with the Pauli stack
        coeffs = np.tensordot(coeffs, _PAULI_STACK, axes=([span - k, 0], [1, 2]))
    coeffs = coeffs / 2**span
    residue = float(np.max(np.abs(coeffs.imag)))
    if residue > 1e-10:
        raise ValueError(
            f"Pauli coefficients have imaginary residue {residue:.3e}; "
            "the input term is not Hermitian"
        )
    real = coeffs.real.reshape(-1)
    out = []
    for idx, label in enumerate(itertools.product("IXYZ", repeat=span)):
        if abs(real[idx]) >= drop_below:
            out.append(PauliTerm("".join(label), float(real[idx])))
    return out


def pauli_matrix(label):
    """Dense matrix of one Pauli string (left factor most significant)."""
    mat = np.array([[1.0 + 0j]])
    for ch in label:
        mat = np.kron(mat, _PAULIS[ch])
    return mat


def pauli_to_matrix(pauli_terms, span):
    """Reassemble sum_P c_P P as a dense matrix; oracle for the expansion."""
    out = np.zeros((2**span, 2**span), dtype=complex)
    for t in pauli_terms:
        if len(t.label) != span:
            raise ValueError(f"label {t.label!r} has length != {span}")
        out += t.coeff * pauli_matrix(t.label)
    return out


# -- JSON schema ---------------------------------------------------------------
#
# {"num_qubits": N, "depth": p, "theta_ans": [...], "kernel_tol": tol,
#  "terms": [{"anchor": i, "span": n,
#             "projector": {"real": [[...]], "imag": [[...]]},
#             "pauli": [{"label": "IXZ...", "coeff": c}, ...]   # optional
#            }, ...]}


def hamiltonian_to_jsonable(ham, include_pauli=False, drop_below=PAULI_DROP_DEFAULT):
    terms = []
    for t in ham.terms:
        entry = {
            "anchor": t.anchor,
            "span": t.span,
            "projector": {
                "real": t.projector.real.tolist(),
                "imag": t.projector.imag.tolist(),
            },
        }
        if include_pauli:
            entry["pauli"] = [
                {"label": p.label, "coeff": p.coeff}
                for p in pauli_decomposition(t, drop_below)
            ]
        terms.append(entry)
    return {
        "num_qubits": ham.num_qubits,
        "depth": ham.ansatz_spec.depth,
        "theta_ans": np.asarray(ham.theta_ans).tolist(),
        "kernel_tol": ham.kernel_tol,
        "terms": terms,
    }


def hamiltonian_from_jsonable(data):
    spec = AnsatzSpec(data["num_qubits"], data["depth"])
    terms = []
    for entry in data["terms"]:
        proj = np.asarray(entry["projector"]["real"], dtype=float) + 1j * np.asarray(
            entry["projector"]["imag"], dtype=float
        )
        terms.append(LocalTerm(entry["anchor"], entry["span"], proj))
    return ParentHamiltonian(
        num_qubits=data["num_qubits"],
        terms=terms,
        ansatz_spec=spec,
        theta_ans=np.asarray(data["theta_ans"], dtype=float),
        kernel_tol=float(data["kernel_tol"]),
    )
