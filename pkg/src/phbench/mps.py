"""Periodic matrix product states compiled from the brickwork circuit.

The circuit maps to a ring MPS by splitting every CZ gate into a pair of
COPY tensors joined by an unnormalized Hadamard-sign bond,

    CZ^{qr}_{ij} = sum_{m,n} COPY^{qm}_i  S^n_m  COPY^r_{nj},
    COPY^{ij}_k = (1-i)(1-j)(1-k) + ijk,   S_i^j = (-1)^{ij},

and contracting each qubit's wire in time order. One bond leg crosses each
ring link per depth unit, so the bond dimension is D = 2**depth. Site
tensors are stored as (2, D, D) arrays A[k][i] with leg order
(physical bit, left bond, right bond); amplitudes are the cyclic traces
Tr[A[0]_{i0} A[1]_{i1} ... A[N-1]_{i(N-1)}].

Reduced density matrices on cyclic windows are contracted through a
product of single-site transfer operators over the complementary sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative singular-value threshold for numerical ranks of the L-site
# amplitude map.
RANK_TOL = 1e-8

_EYE2 = np.eye(2, dtype=complex)
_HSIGN = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)  # (-1)**(i*j)


def _rx(angle):
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _rz(angle):
    return np.array(
        [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=complex
    )


@dataclass
class PeriodicMPS:
    """Ring MPS: per-site stacks of D x D matrices indexed by the physical bit.

    tensors[k] has shape (2, D, D); tensors[k][i] is the site-k matrix for
    physical value i. Sites produced by `ansatz_to_mps` alternate between
    two shared arrays (even/odd sublattice), which makes the two-site
    translation symmetry structural.
    """

    tensors: list = field(default_factory=list)

    def __post_init__(self):
        if not self.tensors:
            raise ValueError("an MPS needs at least one site tensor")
        shape = self.tensors[0].shape
        if len(shape) != 3 or shape[0] != 2 or shape[1] != shape[2]:
            raise ValueError(f"site tensors must have shape (2, D, D), got {shape}")
        for t in self.tensors:
            if t.shape != shape:
                raise ValueError("all site tensors must share one bond dimension")

    @property
    def num_sites(self):
        return len(self.tensors)

    @property
    def bond_dim(self):
        return self.tensors[0].shape[1]


def ansatz_to_mps(spec, theta):
    """Compile the brickwork circuit at the given angles into a ring MPS.

    Both sublattice wires are contracted once; the COPY leg attached to a
    site's rightward CZ absorbs the Hadamard-sign matrix, so every ring
    bond carries exactly one sign factor. Bond legs are grouped in depth
    order, unit 0 most significant.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.num_params,):
        raise ValueError(
            f"expected {spec.num_params} angles, got shape {theta.shape}"
        )
    even = _wire_tensor(spec.depth, theta, parity=0)
    odd = _wire_tensor(spec.depth, theta, parity=1)
    tensors = [even if k % 2 == 0 else odd for k in range(spec.num_qubits)]
    return PeriodicMPS(tensors)


def _attach_copy(wire, bond_factor):
    """Append a bond leg copying the physical leg, weighted by bond_factor."""
    nb = wire.ndim - 1
    return wire[..., None] * bond_factor.reshape((2,) + (1,) * nb + (2,))


def _wire_tensor(depth, theta, parity):
    """Contract one sublattice wire into its (2, D, D) site tensor.

    Even sites bond rightward in even layers and leftward in odd layers;
    odd sites do the opposite. The wire starts in |0>.
    """
    wire = np.array([1.0, 0.0], dtype=complex)
    sides = []
    for d in range(depth):
        for layer, angle in enumerate((theta[2 * d], theta[2 * d + 1])):
            bonds_right = layer == parity
            wire = np.tensordot(_rx(angle), wire, axes=([1], [0]))
            wire = _attach_copy(wire, _HSIGN if bonds_right else _EYE2)
            sides.append("R" if bonds_right else "L")
            wire = np.tensordot(_rz(angle), wire, axes=([1], [0]))
    left = [1 + i for i, s in enumerate(sides) if s == "L"]
    right = [1 + i for i, s in enumerate(sides) if s == "R"]
    dim = 2**depth
    return np.transpose(wire, [0] + left + right).reshape(2, dim, dim).copy()


def _site_product(tensors):
    """Stack of matrix products over sites: shape (2**L, D, D).

    Entry [(i_1...i_L), a, b] is (A_{i_1} ... A_{i_L})[a, b] with i_1 the
    most significant bit.
    """
    out = tensors[0]
    for t in tensors[1:]:
        # (M, D, D) x (2, D, D) -> (M, D, 2, D) -> (2M, D, D)
        out = np.tensordot(out, t, axes=([2], [1]))
        out = np.transpose(out, (0, 2, 1, 3))
        out = out.reshape(-1, out.shape[2], out.shape[3])
    return out


def mps_to_statevector(mps):
    """Evaluate all cyclic-trace amplitudes; exponential in the site count."""
    if mps.num_sites > 16:
        raise ValueError(
            f"refusing to materialize 2**{mps.num_sites} amplitudes; "
            "statevector conversion is capped at 16 sites"
        )
    prod = _site_product(mps.tensors)
    state = np.einsum("xaa->x", prod)
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"contracted state has norm {norm!r}, expected 1")
    return state


def transfer_operator(site_tensor):
    """Single-site transfer operator E = sum_i A_i (x) conj(A_i), D^2 x D^2."""
    a0, a1 = site_tensor[0], site_tensor[1]
    return np.kron(a0, a0.conj()) + np.kron(a1, a1.conj())


def reduced_density(mps, anchor, span):
    """Reduced density matrix on the cyclic window of `span` sites at `anchor`.

    The environment is the ordered product of transfer operators over the
    complementary sites; the window index ordering puts the anchor site's
    bit most significant. Result is Hermitian PSD with unit trace.
    """
    n_sites = mps.num_sites
    if not 1 <= span <= n_sites:
        raise ValueError(f"window length {span} not in 1..{n_sites}")
    anchor = int(anchor) % n_sites
    dim = mps.bond_dim
    window = [(anchor + t) % n_sites for t in range(span)]
    complement = [(anchor + span + t) % n_sites for t in range(n_sites - span)]

    env = np.eye(dim * dim, dtype=complex)
    for k in complement:
        env = env @ transfer_operator(mps.tensors[k])

    block = _site_product([mps.tensors[k] for k in window])  # (2**span, D, D)
    flat = block.reshape(-1, dim * dim)
    # env rows/cols are (b, d) / (a, c) pairs of (ket, bra) bonds; rearrange
    # to an ((a, b), (c, d)) matrix so the contraction is two matmuls.
    env4 = env.reshape(dim, dim, dim, dim)
    env_mat = np.transpose(env4, (2, 0, 3, 1)).reshape(dim * dim, dim * dim)
    rho = (flat @ env_mat) @ flat.conj().T
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > 1e-9:
        raise ValueError(f"reduced density has trace {trace!r}, expected 1")
    return rho


def gamma_map_rank(mps, length):
    """Numerical rank of the map from D x D matrices to `length`-site amplitudes.

    Builds the 2**length x D^2 matrix of site-tensor products over the
    sublattice pattern starting at site 0 and counts singular values above
    RANK_TOL relative to the largest. A full rank of D^2 means the map is
    injective on that window length.
    """
    if length < 1:
        raise ValueError(f"window length must be >= 1, got {length}")
    chain = [mps.tensors[t % 2] if mps.num_sites > 1 else mps.tensors[0]
             for t in range(length)]
    mat = _site_product(chain).reshape(2**length, -1)
    sing = np.linalg.svd(mat, compute_uv=False)
    if sing.size == 0 or sing[0] == 0.0:
        return 0
    return int(np.count_nonzero(sing > RANK_TOL * sing[0]))


def injectivity_length(mps, max_length=16):
    """Smallest window length whose amplitude map reaches full rank D^2.

    Returns None when no length up to `max_length` is injective.
    """
    if max_length > 16:
        raise ValueError("injectivity search is capped at window length 16")
    full = mps.bond_dim**2
    for length in range(1, max_length + 1):
        if gamma_map_rank(mps, length) == full:
            return length
    return None


# -- JSON schema ---------------------------------------------------------------
#
# {"num_sites": N, "bond_dim": D,
#  "site_tensors": [{"real": [[[...]]], "imag": [[[...]]]}, ...]}
# with each site entry of shape (2, D, D).


def mps_to_jsonable(mps):
    return {
        "num_sites": mps.num_sites,
        "bond_dim": mps.bond_dim,
        "site_tensors": [
            {"real": t.real.tolist(), "imag": t.imag.tolist()} for t in mps.tensors
        ],
    }


def mps_from_jsonable(data):
    tensors = [
        np.asarray(entry["real"], dtype=float) + 1j * np.asarray(entry["imag"], dtype=float)
        for entry in data["site_tensors"]
    ]
    mps = PeriodicMPS(tensors)
    if mps.num_sites != data["num_sites"] or mps.bond_dim != data["bond_dim"]:
        raise ValueError("MPS JSON header disagrees with its tensor payload")
    return mps
