"""Propagator, Choi matrix, and Kraus extraction for qubit channels.

The chain is: exponentiate a generator matrix into a propagator F, fold F
into the Choi matrix S over the Hermitian operator basis, diagonalize S,
and assemble one Kraus operator per positive eigenvalue. Channel equality
is always decided at the Choi level, never by comparing raw operators:
distinct Kraus sets related by unitary mixing describe the same channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompleteKrausSet,
    InvalidState,
    NegativeTime,
    NotCompletelyPositive,
    NotTracePreserving,
)
from .linalg import SIGMA_I, hermitian_basis, hermitian_eig, matrix_exp, max_nonhermiticity

#: default eigenvalue cutoff below which Kraus operators are dropped
WEIGHT_CUTOFF = 1e-12

#: eigenvalues below this are a genuine complete-positivity violation
CP_TOLERANCE = -1e-10

# trace tensor T[r, n, s, m] = tr(G_r G_n G_s G_m); the Choi matrix is a
# contraction of the propagator against it.
_G = hermitian_basis()
_TRACE_TENSOR = np.einsum("rab,nbc,scd,mda->rnsm", _G, _G, _G, _G)
_TRACE_TENSOR.flags.writeable = False


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators with the eigenvalue weights they came from.

    ``weights`` defaults to tr(E^dag E) per operator, which equals the Choi
    eigenvalue whenever the operator was built from a normalized eigenvector.
    At most four operators are allowed for a qubit channel.
    """

    operators: tuple[np.ndarray, ...]
    weights: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        ops = []
        for op in self.operators:
            arr = np.array(op, dtype=complex)
            if arr.shape != (2, 2):
                raise ValueError(f"Kraus operators must be 2x2, got {arr.shape}")
            arr.flags.writeable = False
            ops.append(arr)
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        if len(ops) > 4:
            raise ValueError(f"a qubit channel has at most 4 Kraus operators, got {len(ops)}")
        if self.weights is None:
            weights = tuple(float(np.trace(op.conj().T @ op).real) for op in ops)
        else:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != len(ops):
                raise ValueError("weights and operators must have equal length")
        object.__setattr__(self, "operators", tuple(ops))
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def completeness_residual(self) -> float:
        """Largest entrywise deviation of sum(E^dag E) from the identity."""
        acc = sum(op.conj().T @ op for op in self.operators)
        return float(np.abs(acc - SIGMA_I).max())


def identity_kraus_set() -> KrausSet:
    """The do-nothing channel."""
    return KrausSet((SIGMA_I,), (2.0,))


def propagate(generator_matrix: np.ndarray, t: float) -> np.ndarray:
    """Propagator F = exp(L t) for a constant generator matrix L."""
    if t < 0.0:
        raise NegativeTime(f"propagation time must be >= 0, got {t}")
    return matrix_exp(np.asarray(generator_matrix, dtype=float), t)


def choi_from_propagator(
    propagator: np.ndarray,
    basis: np.ndarray | None = None,
    *,
    cp_tol: float = CP_TOLERANCE,
) -> np.ndarray:
    """Choi matrix of the channel encoded by a propagator.

    Checks trace preservation (first row (1,0,0,0) within 1e-10) and
    complete positivity (eigenvalues >= cp_tol); the returned matrix is
    Hermitian with trace 2.
    """
    f = np.asarray(propagator, dtype=complex)
    if f.shape != (4, 4):
        raise ValueError(f"propagator must be 4x4, got {f.shape}")
    row_dev = float(np.abs(f[0] - np.array([1.0, 0, 0, 0])).max())
    if row_dev > 1e-10:
        raise NotTracePreserving(
            f"first propagator row deviates from (1,0,0,0) by {row_dev:.3e}"
        )
    if basis is None:
        tensor = _TRACE_TENSOR
    else:
        g = np.asarray(basis, dtype=complex)
        tensor = np.einsum("rab,nbc,scd,mda->rnsm", g, g, g, g)
    choi = np.einsum("sr,rnsm->nm", f, tensor)
    choi = (choi + choi.conj().T) / 2.0
    smallest = float(np.min(hermitian_eig(choi)[0]))
    if smallest < cp_tol:
        raise NotCompletelyPositive(
            f"Choi eigenvalue {smallest:.3e} below tolerance {cp_tol:.1e}"
        )
    return choi


def kraus_from_choi(
    choi: np.ndarray,
    basis: np.ndarray | None = None,
    cutoff: float = WEIGHT_CUTOFF,
) -> KrausSet:
    """Kraus operators from the eigendecomposition of a Choi matrix.

    One operator sqrt(d_i) sum_j u_ji G_j per eigenvalue d_i above ``cutoff``,
    ordered by descending eigenvalue. Eigenvalues in [-1e-10, cutoff] are
    treated as numerical zeros and dropped; anything below -1e-10 raises
    NotCompletelyPositive.
    """
    s = np.asarray(choi, dtype=complex)
    if max_nonhermiticity(s) > 1e-12:
        raise ValueError("Choi matrix must be Hermitian within 1e-12")
    g = hermitian_basis() if basis is None else np.asarray(basis, dtype=complex)
    values, vectors = hermitian_eig(s)
    if values[-1] < CP_TOLERANCE:
        raise NotCompletelyPositive(
            f"Choi eigenvalue {values[-1]:.3e} below tolerance {CP_TOLERANCE:.1e}"
        )
    operators = []
    weights = []
    for i, d in enumerate(values):
        if d <= cutoff:
            continue
        operators.append(np.sqrt(d) * np.tensordot(vectors[:, i], g, axes=(0, 0)))
        weights.append(float(d))
    return KrausSet(tuple(operators), tuple(weights))


def kraus_to_choi(kset: KrausSet, basis: np.ndarray | None = None) -> np.ndarray:
    """Choi matrix of the channel a Kraus set implements."""
    g = hermitian_basis() if basis is None else np.asarray(basis, dtype=complex)
    coeffs = np.einsum("jab,iba->ji", g, np.stack(kset.operators))
    return coeffs @ coeffs.conj().T


def apply_channel(kset: KrausSet, rho: np.ndarray) -> np.ndarray:
    """Channel action sum_k E_k rho E_k^dag on a density operator."""
    state = np.asarray(rho, dtype=complex)
    if state.shape != (2, 2):
        raise InvalidState(f"density operator must be 2x2, got {state.shape}")
    if max_nonhermiticity(state) > 1e-10:
        raise InvalidState("density operator must be Hermitian")
    trace = complex(np.trace(state))
    if abs(trace - 1.0) > 1e-10:
        raise InvalidState(f"density operator must have unit trace, got {trace}")
    if float(np.min(np.linalg.eigvalsh(state))) < -1e-12:
        raise InvalidState("density operator must be positive semidefinite")
    out = np.zeros((2, 2), dtype=complex)
    for op in kset.operators:
        out += op @ state @ op.conj().T
    return out


def choi_distance(first: KrausSet, second: KrausSet) -> float:
    """Frobenius distance between the Choi matrices of two Kraus sets.

    Zero exactly when both sets implement the same channel. Both sets must
    be complete within 1e-8.
    """
    for name, kset in (("first", first), ("second", second)):
        residual = kset.completeness_residual()
        if residual > 1e-8:
            raise IncompleteKrausSet(
                f"{name} Kraus set has completeness residual {residual:.3e}"
            )
    return float(np.linalg.norm(kraus_to_choi(first) - kraus_to_choi(second)))


def kraus_set_to_dict(kset: KrausSet) -> dict:
    """JSON-ready document: operators as [re, im] pairs plus diagnostics."""
    choi_values = hermitian_eig(kraus_to_choi(kset))[0]
    return {
        "operators": [
            [[[float(x.real), float(x.imag)] for x in row] for row in op]
            for op in kset.operators
        ],
        "weights": [float(w) for w in kset.weights],
        "diagnostics": {
            "completeness_residual": kset.completeness_residual(),
            "choi_eigenvalues": [float(v) for v in choi_values],
        },
    }


def kraus_set_from_dict(doc: dict) -> KrausSet:
    """Rebuild a KrausSet from its JSON document."""
    operators = tuple(
        np.array([[complex(re, im) for re, im in row] for row in op])
        for op in doc["operators"]
    )
    weights = tuple(float(w) for w in doc["weights"]) if "weights" in doc else None
    return KrausSet(operators, weights)
