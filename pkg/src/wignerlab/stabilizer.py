"""Pure stabilizer states: enumeration for prime d, tensor products, and
the maximally mixed reference state.

For prime d the d(d+1) single-qudit pure stabilizer states are the joint
eigenbases of the d+1 maximal cyclic Weyl subgroups, generated by Z and by
X Z^k for k = 0 .. d-1.  Composite single-particle dimensions are not
enumerated (their state set is much smaller and structurally different);
multi-qudit systems are covered through products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modring import omega_exponent_of
from .qmat import MATRIX_TOL, tensor
from .weyl import WeylLabel, weyl_matrix, weyl_measurement


def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % k for k in range(2, int(d**0.5) + 1))


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Fix global phase: largest-magnitude component made positive real."""
    vec = np.asarray(vec, dtype=complex)
    i = int(np.argmax(np.abs(vec) - 1e-12 * np.arange(len(vec))))
    return vec * (abs(vec[i]) / vec[i])


@dataclass(frozen=True)
class StabilizerState:
    """A pure state together with the phased Weyl operators fixing it.

    stabilizer_labels holds (label, k) pairs with W_label |psi> =
    exp(i*pi*k/d) |psi>; the phased operators omega^(-k/2) W_label form the
    stabilizer group.
    """

    vector: np.ndarray
    stabilizer_labels: tuple  # of (WeylLabel, int exponent in Z_2d)
    d: int

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > MATRIX_TOL:
            raise ValueError(f"state vector not normalized: |v| = {norm}")
        v = canonical_phase(v)
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @property
    def n(self) -> int:
        return len(self.stabilizer_labels[0][0].pairs)

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def check_stabilized(self, tol: float = MATRIX_TOL) -> bool:
        from .modring import omega_power

        for label, k in self.stabilizer_labels:
            w = weyl_matrix(label)
            if np.max(np.abs(w @ self.vector - omega_power(k, self.d) * self.vector)) > tol:
                return False
        return True


def _cyclic_group_exponents(base: WeylLabel, base_exp: int):
    """(label, exponent) for every power of a phased Weyl eigen-relation.

    If W_base |psi> = w2d^base_exp |psi| then W_base^j = w2d^phi_j W_(j*base)
    for a composition phase phi_j, so W_(j*base) has exponent
    j*base_exp - phi_j on the state.
    """
    from .weyl import compose_labels

    d = base.d
    out = []
    label = base
    phi = 0
    j = 1
    while True:
        out.append((label, (j * base_exp - phi) % (2 * d)))
        nxt, ph = compose_labels(label, base)
        phi = (phi + ph.value) % (2 * d)
        label = nxt
        j += 1
        if label.is_identity:
            out.append((label, (j * base_exp - phi) % (2 * d)))
            break
    return tuple(out)


def enumerate_pure_states(d: int) -> list[StabilizerState]:
    """All d(d+1) single-qudit pure stabilizer states, prime d."""
    if not _is_prime(d):
        raise ValueError(f"enumeration requires prime d, got {d}")
    bases = [WeylLabel.single(1, 0, d)]  # Z
    bases += [WeylLabel.single(k, 1, d) for k in range(d)]  # X Z^k up to phase
    states = []
    for base in bases:
        decomp = weyl_measurement(base)
        for k, proj in decomp.terms:
            # rank-1 for nonzero labels at prime d
            vals, vecs = np.linalg.eigh(proj)
            vec = canonical_phase(vecs[:, int(np.argmax(vals))])
            if any(abs(np.vdot(s.vector, vec)) > 1 - 1e-9 for s in states):
                continue
            st = StabilizerState(
                vector=vec,
                stabilizer_labels=_cyclic_group_exponents(base, k),
                d=d,
            )
            if not st.check_stabilized():
                raise AssertionError("enumerated state fails its stabilizer relations")
            states.append(st)
    return states


def product_states(states: list[StabilizerState]) -> StabilizerState:
    """Tensor product with per-factor stabilizer labels embedded."""
    if not states:
        raise ValueError("need at least one factor")
    d = states[0].d
    if any(s.d != d for s in states):
        raise ValueError("all factors must share one dimension d")
    vec = states[0].vector
    for s in states[1:]:
        vec = np.kron(vec, s.vector)
    n = sum(len(s.stabilizer_labels[0][0].pairs) for s in states)
    labels = []
    offset = 0
    for s in states:
        ns = len(s.stabilizer_labels[0][0].pairs)
        for label, k in s.stabilizer_labels:
            pairs = [(0, 0)] * n
            pairs[offset:offset + ns] = list(label.pairs)
            labels.append((WeylLabel(tuple(pairs), d), k))
        offset += ns
    return StabilizerState(vector=vec, stabilizer_labels=tuple(labels), d=d)


def maximally_mixed(d: int, n: int = 1) -> np.ndarray:
    return np.eye(d**n, dtype=complex) / d**n


def parse_basis(basis: str, d: int) -> WeylLabel:
    """Basis names for state files: 'Z', 'X', or 'XZ^k'."""
    basis = basis.strip()
    if basis == "Z":
        return WeylLabel.single(1, 0, d)
    if basis == "X":
        return WeylLabel.single(0, 1, d)
    if basis.startswith("XZ^"):
        k = int(basis[3:])
        return WeylLabel.single(k, 1, d)
    raise ValueError(f"unknown basis {basis!r}; expected Z, X, or XZ^k")


def state_from_basis(basis: str, eigenvalue_exponent: int, d: int) -> StabilizerState:
    """The eigenstate of the named basis operator with eigenvalue
    omega^eigenvalue_exponent."""
    base = parse_basis(basis, d)
    k = (2 * eigenvalue_exponent) % (2 * d)
    decomp = weyl_measurement(base)
    if k not in decomp.exponents:
        raise ValueError(
            f"omega^{eigenvalue_exponent} is not an eigenvalue of basis {basis!r}")
    proj = decomp.projector(k)
    vals, vecs = np.linalg.eigh(proj)
    vec = canonical_phase(vecs[:, int(np.argmax(vals))])
    return StabilizerState(vector=vec,
                           stabilizer_labels=_cyclic_group_exponents(base, k), d=d)
