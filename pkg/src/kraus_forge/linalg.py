"""Fixed-size complex linear algebra for single-qubit channel work.

Provides the 2x2 operator constants, the orthonormal Hermitian operator
basis, a cyclic Jacobi eigensolver for small Hermitian matrices, and a
scaling-and-squaring matrix exponential. All functions are pure and never
mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceFailure, NonHermitianInput, OverflowDetected


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


SIGMA_I = _frozen(np.eye(2, dtype=complex))
SIGMA_X = _frozen(np.array([[0, 1], [1, 0]], dtype=complex))
SIGMA_Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=complex))
SIGMA_Z = _frozen(np.array([[1, 0], [0, -1]], dtype=complex))

# Lowering/raising operators in the sigma_z eigenbasis. SIGMA_MINUS sends the
# upper level (index 0) to the lower level (index 1).
SIGMA_MINUS = _frozen(np.array([[0, 0], [1, 0]], dtype=complex))
SIGMA_PLUS = _frozen(np.array([[0, 1], [0, 0]], dtype=complex))

# Basis order is load-bearing: it fixes the row/column layout of every 4x4
# generator and propagator in this package.
_BASIS = _frozen(np.stack([SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z]) / np.sqrt(2.0))


def hermitian_basis() -> np.ndarray:
    """Orthonormal Hermitian operator basis (I, sx, sy, sz)/sqrt(2).

    Returns a read-only array of shape (4, 2, 2) with trace(G_k G_l) = d_kl.
    """
    return _BASIS


def max_nonhermiticity(matrix: np.ndarray) -> float:
    """Largest entrywise deviation |M - M^dag|."""
    m = np.asarray(matrix)
    return float(np.abs(m - m.conj().T).max())


def hermitian_eig(
    matrix: np.ndarray,
    *,
    hermiticity_tol: float = 1e-12,
    max_sweeps: int = 60,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as the matching columns of a unitary
    matrix. Each eigenvector is rephased so that its largest-magnitude
    component is real and positive (ties broken by the lowest index); this
    pins the output across runs and platforms.

    Raises NonHermitianInput if ``matrix`` deviates from Hermiticity by more
    than ``hermiticity_tol``, and ConvergenceFailure if the off-diagonal mass
    does not vanish within ``max_sweeps`` cyclic sweeps.
    """
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {a.shape}")
    deviation = max_nonhermiticity(a)
    if deviation > hermiticity_tol:
        raise NonHermitianInput(
            f"max |M - M^dag| = {deviation:.3e} exceeds {hermiticity_tol:.1e}"
        )
    a = (a + a.conj().T) / 2.0
    n = a.shape[0]
    vectors = np.eye(n, dtype=complex)

    scale = float(np.linalg.norm(a))
    if scale > 0.0:
        off_tol = 1e-15 * scale
        for _ in range(max_sweeps):
            off = max(
                abs(a[p, q]) for p in range(n - 1) for q in range(p + 1, n)
            )
            if off <= off_tol:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mag = abs(a[p, q])
                    if mag <= 1e-300:
                        continue
                    phase = a[p, q] / mag
                    beta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                    sgn = 1.0 if beta >= 0.0 else -1.0
                    t = -sgn / (abs(beta) + np.hypot(1.0, beta))
                    c = 1.0 / np.hypot(1.0, t)
                    s = t * c
                    rot = np.eye(n, dtype=complex)
                    rot[p, p] = c
                    rot[q, q] = c
                    rot[p, q] = -s * phase
                    rot[q, p] = s * np.conj(phase)
                    a = rot.conj().T @ a @ rot
                    vectors = vectors @ rot
            a = (a + a.conj().T) / 2.0
        else:
            raise ConvergenceFailure(
                f"off-diagonal mass did not settle within {max_sweeps} sweeps"
            )

    values = a.diagonal().real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for i in range(n):
        pivot = vectors[int(np.argmax(np.abs(vectors[:, i]))), i]
        vectors[:, i] *= np.conj(pivot) / abs(pivot)
    return values, vectors


# Degree-13 diagonal Pade approximant coefficients and its 1-norm threshold
# (Higham 2005). Below the threshold the kernel's backward error is under
# double-precision roundoff; the squaring phase doubles the norm budget per
# step, so inputs with ||M*s||_1 up to ~2^60 * 5.37 are representable.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_PADE13_THETA = 5.371920351148152


def matrix_exp(matrix: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(matrix * scale) by scaling and squaring with a degree-13 Pade kernel.

    The scaled matrix is divided by a power of two until its 1-norm is below
    5.3719, evaluated with the [13/13] diagonal Pade approximant, and squared
    back up. A zero input returns the exact identity.

    Raises OverflowDetected for non-finite input or when the scaling stage
    exceeds the representable range.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        x = a * float(scale)
    if not np.all(np.isfinite(x)):
        raise OverflowDetected("non-finite entries in the scaled matrix")
    n = x.shape[0]
    eye = np.eye(n, dtype=x.dtype)
    norm1 = float(np.abs(x).sum(axis=0).max())
    if norm1 == 0.0:
        return eye.copy()
    squarings = max(0, int(np.ceil(np.log2(norm1 / _PADE13_THETA))))
    if squarings > 60:
        raise OverflowDetected(
            f"1-norm {norm1:.3e} would need {squarings} squarings"
        )
    x = x / (2.0**squarings)

    b = _PADE13
    x2 = x @ x
    x4 = x2 @ x2
    x6 = x2 @ x4
    u = x @ (
        x6 @ (b[13] * x6 + b[11] * x4 + b[9] * x2)
        + b[7] * x6
        + b[5] * x4
        + b[3] * x2
        + b[1] * eye
    )
    v = (
        x6 @ (b[12] * x6 + b[10] * x4 + b[8] * x2)
        + b[6] * x6
        + b[4] * x4
        + b[2] * x2
        + b[0] * eye
    )
    result = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    if not np.all(np.isfinite(result)):
        raise OverflowDetected("matrix exponential overflowed while squaring")
    return result
