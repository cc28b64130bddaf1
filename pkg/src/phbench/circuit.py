"""Translation-invariant brickwork ansatz on a qubit ring.

The circuit alternates layers of two-qubit blocks: "even" layers act on
bonds (0,1), (2,3), ... and "odd" layers on bonds (1,2), (3,4), ...,
(N-1,0). One depth unit is an even layer followed by an odd layer. Every
rotation gate in a layer shares that layer's single angle, so a depth-p
circuit has 2p independent parameters.

Each block with angle t applies RX(t) to both qubits, then CZ, then RZ(t)
to both qubits, with RX(t) = exp(-i t X / 2) and RZ(t) = exp(-i t Z / 2).
This intra-block order is a fixed convention of the package; it is
validated downstream by the reproduced kernel-support and injectivity
numbers of the generated problems.

Statevector indices are big-endian in the qubit label: qubit 0 is the most
significant bit of the basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GATE_KINDS = ("RX", "RZ", "CZ")


@dataclass(frozen=True)
class AnsatzSpec:
    """Shape of the ansatz: an even number of ring qubits and a depth."""

    num_qubits: int
    depth: int

    def __post_init__(self):
        if self.num_qubits < 4 or self.num_qubits % 2 != 0:
            raise ValueError(
                f"num_qubits must be an even integer >= 4, got {self.num_qubits}"
            )
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    @property
    def num_params(self):
        return 2 * self.depth


@dataclass(frozen=True)
class Gate:
    """One gate record: kind, target qubit(s), and the shared angle slot.

    Rotation gates carry a `param_slot` into the parameter vector; CZ gates
    carry none.
    """

    kind: str
    qubits: tuple
    param_slot: int | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CZ":
            if len(self.qubits) != 2 or self.param_slot is not None:
                raise ValueError("CZ acts on 2 qubits and takes no parameter")
        else:
            if len(self.qubits) != 1 or self.param_slot is None:
                raise ValueError(f"{self.kind} acts on 1 qubit and needs a param_slot")


def build_ansatz(spec):
    """Gate list for the brickwork ansatz, in application order.

    Per depth unit d: an even layer (bonds (2k, 2k+1), slot 2d) then an odd
    layer (bonds (2k+1, 2k+2 mod N), slot 2d+1). Each block emits
    RX a, RX b, CZ(a, b), RZ a, RZ b.
    """
    n = spec.num_qubits
    gates = []

    def block(a, b, slot):
        gates.append(Gate("RX", (a,), slot))
        gates.append(Gate("RX", (b,), slot))
        gates.append(Gate("CZ", (a, b)))
        gates.append(Gate("RZ", (a,), slot))
        gates.append(Gate("RZ", (b,), slot))

    for d in range(spec.depth):
        for k in range(n // 2):
            block(2 * k, 2 * k + 1, 2 * d)
        for k in range(n // 2):
            block(2 * k + 1, (2 * k + 2) % n, 2 * d + 1)
    return gates


def validate_gates(gates, num_params, num_qubits):
    for g in gates:
        if any(not 0 <= q < num_qubits for q in g.qubits):
            raise ValueError(f"gate {g} addresses qubits outside 0..{num_qubits - 1}")
        if g.param_slot is not None and not 0 <= g.param_slot < num_params:
            raise ValueError(
                f"gate {g} references parameter slot {g.param_slot} "
                f"but only {num_params} parameters were supplied"
            )


# -- in-place gate application ------------------------------------------------
#
# States are arrays whose last axis has length 2**N; leading axes, if any,
# are batch axes. Updates are strided views so no full-state copies are made
# beyond one temporary per RX.


def _apply_rx(state, qubit, num_qubits, angle):
    rest = 2 ** (num_qubits - qubit - 1)
    v = state.reshape(state.shape[:-1] + (2**qubit, 2, rest))
    c = math.cos(angle / 2.0)
    ms = -1j * math.sin(angle / 2.0)
    top = v[..., 0, :].copy()
    bot = v[..., 1, :]
    np.multiply(top, c, out=v[..., 0, :])
    v[..., 0, :] += ms * bot
    np.multiply(bot, c, out=v[..., 1, :])
    top *= ms
    v[..., 1, :] += top


def _apply_rz(state, qubit, num_qubits, angle):
    rest = 2 ** (num_qubits - qubit - 1)
    v = state.reshape(state.shape[:-1] + (2**qubit, 2, rest))
    v[..., 0, :] *= complex(math.cos(angle / 2.0), -math.sin(angle / 2.0))
    v[..., 1, :] *= complex(math.cos(angle / 2.0), math.sin(angle / 2.0))


def _apply_cz(state, qa, qb, num_qubits):
    qa, qb = sorted((qa, qb))
    mid = 2 ** (qb - qa - 1)
    rest = 2 ** (num_qubits - qb - 1)
    v = state.reshape(state.shape[:-1] + (2**qa, 2, mid, 2, rest))
    v[..., 1, :, 1, :] *= -1.0


def _apply_gate(state, gate, angle, num_qubits):
    if gate.kind == "RX":
        _apply_rx(state, gate.qubits[0], num_qubits, angle)
    elif gate.kind == "RZ":
        _apply_rz(state, gate.qubits[0], num_qubits, angle)
    else:
        _apply_cz(state, gate.qubits[0], gate.qubits[1], num_qubits)


def simulate(gates, theta, num_qubits):
    """Apply the gate list to |0...0> and return the final statevector."""
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameter vector contains non-finite entries")
    validate_gates(gates, theta.shape[0], num_qubits)
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    for g in gates:
        angle = theta[g.param_slot] if g.param_slot is not None else 0.0
        _apply_gate(state, g, angle, num_qubits)
    return state


# -- energies against a sum of local projector terms ---------------------------


def _window_matrix(state, anchor, span, num_qubits):
    """Reorder a (..., 2**N) state into (2**span, batch, 2**(N-span)).

    The window axis runs over the cyclic window [anchor, anchor+span) with
    the anchor site's bit most significant. Cyclic windows split the ring
    into at most four index blocks, so this is a cheap 4-axis transpose.
    """
    batch = int(np.prod(state.shape[:-1], dtype=int)) if state.ndim > 1 else 1
    anchor = int(anchor) % num_qubits
    if anchor + span <= num_qubits:
        pre = 2**anchor
        post = 2 ** (num_qubits - anchor - span)
        v = state.reshape(batch, pre, 2**span, post)
        out = np.transpose(v, (2, 0, 1, 3))
    else:
        head = anchor + span - num_qubits  # window part wrapping onto 0..
        mid = num_qubits - span
        v = state.reshape(batch, 2**head, 2**mid, 2 ** (num_qubits - anchor))
        out = np.transpose(v, (3, 1, 0, 2))
    return np.ascontiguousarray(out).reshape(2**span, batch, 2 ** (num_qubits - span))


def _term_values(states, term, num_qubits):
    """<s| h |s> for each state in a (batch, 2**N) array, one local term.

    Uses the kernel-basis factorization h = B B^dag when available, which
    makes the value a sum of squared norms (exactly nonnegative).
    """
    batch_shape = states.shape[:-1]
    w = _window_matrix(states, term.anchor, term.span, num_qubits)
    dim, batch, rest = w.shape
    flat = w.reshape(dim, batch * rest)
    basis = term.basis()
    if basis is not None:
        if basis.shape[1] == 0:
            return np.zeros(batch_shape)
        y = (basis.conj().T @ flat).reshape(-1, batch, rest)
        out = np.einsum("kbr,kbr->b", y, y.conj()).real
    else:
        y = (term.projector @ flat).reshape(dim, batch, rest)
        vals = np.einsum("kbr,kbr->b", w.conj(), y)
        residue = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
        if residue > 1e-10:
            raise ValueError(
                f"expectation of a supposedly Hermitian term has imaginary "
                f"residue {residue:.3e}"
            )
        out = vals.real
    return out.reshape(batch_shape)


def expectation(state, hamiltonian):
    """<state| H |state> for a sum of cyclic-window projector terms."""
    state = np.asarray(state, dtype=complex)
    num_qubits = hamiltonian.num_qubits
    if state.shape[-1] != 2**num_qubits:
        raise ValueError(
            f"state has {state.shape[-1]} amplitudes, expected {2**num_qubits}"
        )
    total = np.zeros(state.shape[:-1])
    for term in hamiltonian.terms:
        total = total + _term_values(state, term, num_qubits)
    if total.ndim == 0:
        return float(total)
    return total


def energy(theta, hamiltonian, spec=None, gates=None):
    """Ansatz energy E(theta) = <psi(theta)| H |psi(theta)>.

    The circuit defaults to the ansatz recorded in the Hamiltonian's
    provenance; pass `spec` (and optionally a prebuilt gate list) to
    evaluate another circuit of the same width.
    """
    spec = spec if spec is not None else hamiltonian.ansatz_spec
    if spec.num_qubits != hamiltonian.num_qubits:
        raise ValueError(
            f"ansatz acts on {spec.num_qubits} qubits but the Hamiltonian "
            f"has {hamiltonian.num_qubits}"
        )
    if gates is None:
        gates = build_ansatz(spec)
    state = simulate(gates, theta, spec.num_qubits)
    return expectation(state, hamiltonian)


def gradient_parameter_shift(theta, hamiltonian, spec=None, gates=None):
    """Exact gradient of E(theta) via two-point shifts of each rotation gate.

    For every rotation-gate occurrence g the contribution to its slot is
    (E[g at +pi/2] - E[g at -pi/2]) / 2, and shared slots sum their
    occurrences (chain rule). All shifted circuits are evaluated in one
    batched sweep: shifting occurrence g by s factors as
    U(theta + s) = U(theta) * U(s), so each branch state receives U(s)
    at its occurrence and then rides along with the unshifted tail.
    """
    spec = spec if spec is not None else hamiltonian.ansatz_spec
    theta = np.asarray(theta, dtype=float)
    if gates is None:
        gates = build_ansatz(spec)
    n = spec.num_qubits
    validate_gates(gates, theta.shape[0], n)

    slots_in_order = [g.param_slot for g in gates if g.param_slot is not None]
    batch = np.zeros((2 * len(slots_in_order), 2**n), dtype=complex)
    base = np.zeros(2**n, dtype=complex)
    base[0] = 1.0

    half = math.pi / 2.0
    count = 0
    for g in gates:
        if g.param_slot is not None:
            batch[count] = base
            batch[count + 1] = base
            if g.kind == "RX":
                _apply_rx(batch[count], g.qubits[0], n, half)
                _apply_rx(batch[count + 1], g.qubits[0], n, -half)
            else:
                _apply_rz(batch[count], g.qubits[0], n, half)
                _apply_rz(batch[count + 1], g.qubits[0], n, -half)
            count += 2
        angle = theta[g.param_slot] if g.param_slot is not None else 0.0
        _apply_gate(batch[:count], g, angle, n)
        _apply_gate(base, g, angle, n)

    energies = expectation(batch, hamiltonian)
    per_occurrence = 0.5 * (energies[0::2] - energies[1::2])
    grad = np.zeros(theta.shape[0])
    for slot, value in zip(slots_in_order, per_occurrence):
        grad[slot] += value
    return grad


def gradient_finite_difference(theta, hamiltonian, step=1e-5, spec=None, gates=None):
    """Central finite-difference gradient of E(theta), the shift-rule oracle."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    spec = spec if spec is not None else hamiltonian.ansatz_spec
    theta = np.asarray(theta, dtype=float)
    if gates is None:
        gates = build_ansatz(spec)
    grad = np.zeros(theta.shape[0])
    for j in range(theta.shape[0]):
        shifted = theta.copy()
        shifted[j] = theta[j] + step
        plus = energy(shifted, hamiltonian, spec, gates)
        shifted[j] = theta[j] - step
        minus = energy(shifted, hamiltonian, spec, gates)
        grad[j] = (plus - minus) / (2.0 * step)
    return grad


# -- gate-list JSON schema ------------------------------------------------------
#
# A gate list serializes to a JSON array of records
#   {"kind": "RX"|"RZ"|"CZ", "qubits": [q] or [q1, q2], "param_slot": int|null}
# in application order.


def gates_to_jsonable(gates):
    return [
        {"kind": g.kind, "qubits": list(g.qubits), "param_slot": g.param_slot}
        for g in gates
    ]


def gates_from_jsonable(records):
    return [
        Gate(rec["kind"], tuple(rec["qubits"]), rec.get("param_slot"))
        for rec in records
    ]
