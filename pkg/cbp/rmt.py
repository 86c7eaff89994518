"""
Largest eigenvalue of GUE matrices, the distributional oracle of Vplus.

The Hermitian matrix H = A + iB is embedded in the real symmetric matrix

    [[A, -B],
     [B,  A]]

of order 2M, which has the spectrum of H with doubled multiplicities, and is
diagonalized by cyclic Jacobi rotations.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator, Philox

from cbp.common import get_setting
from cbp.exceptions import ConvergenceError, InterfaceError
from cbp.model import replica_seed

log = logging.getLogger(__name__)

# off-diagonal real and imaginary parts each N(0, T/2), or each N(0, T)
VARIANCE_CONVENTIONS = ('split', 'full')


@dataclass(frozen=True)
class GueSample:
    M: int
    variance: float
    lambda_max: float
    seed: int
    residual: float = 0.0
    sweeps: int = 0


def sample_gue_matrix(M: int, T: float, seed: int, convention: Optional[str] = None) -> np.ndarray:
    """A complex Hermitian M x M matrix with diagonal N(0, T)"""
    if M < 1:
        raise InterfaceError("matrix order must be >= 1, got {}".format(M))
    if not T > 0:
        raise InterfaceError("the entry variance must be positive, got {}".format(T))
    convention = convention or get_setting('CBP_GUE_VARIANCE_CONVENTION')
    if convention not in VARIANCE_CONVENTIONS:
        raise InterfaceError("unknown GUE variance convention {!r}".format(convention))
    rng = Generator(Philox(int(seed)))
    off_sd = math.sqrt(T / 2.0) if convention == 'split' else math.sqrt(T)
    diagonal = rng.standard_normal(M) * math.sqrt(T)
    upper = np.triu(rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M)), k=1) * off_sd
    return upper + upper.conj().T + np.diag(diagonal)


def real_embedding(H: np.ndarray) -> np.ndarray:
    A, B = H.real, H.imag
    return np.block([[A, -B], [B, A]])


def jacobi_eigen(S: np.ndarray, max_sweeps: Optional[int] = None,
                 tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues and eigenvectors (columns) of a real symmetric matrix

    Cyclic Jacobi sweeps until the off-diagonal Frobenius norm is
    <= tol * the Frobenius norm of S. The off-diagonal norm is summed from
    the entries themselves: the difference of the total and the diagonal
    norm has a rounding floor near sqrt(eps) * |S|.
    """
    max_sweeps = int(get_setting('CBP_JACOBI_MAX_SWEEPS')) if max_sweeps is None else max_sweeps
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(float(np.linalg.norm(A)), np.finfo(float).tiny)
    upper = np.triu_indices(n, 1)
    sweeps = 0
    while True:
        off = float(np.linalg.norm(A[upper])) * math.sqrt(2.0)
        if off <= tol * scale:
            break
        if sweeps >= max_sweeps:
            raise ConvergenceError("Jacobi eigensolver did not converge in {} sweeps (order {})".format(
                max_sweeps, n), report=sweeps)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * col_p - s * col_q, s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * row_p - s * row_q, s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vec_p, vec_q = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vec_p - s * vec_q, s * vec_p + c * vec_q
    return np.diag(A).copy(), V, sweeps


def lambda_max(H: np.ndarray, max_sweeps: Optional[int] = None) -> Tuple[float, float, int]:
    """(largest eigenvalue, relative residual, sweeps) of a Hermitian matrix"""
    S = real_embedding(H) if np.iscomplexobj(H) else np.asarray(H, dtype=float)
    values, vectors, sweeps = jacobi_eigen(S, max_sweeps)
    k = int(np.argmax(values))
    v = vectors[:, k]
    residual = float(np.linalg.norm(S @ v - values[k] * v) / np.linalg.norm(v))
    tolerance = 1e-10 * max(1.0, float(np.linalg.norm(S)))
    if residual > tolerance:
        raise ConvergenceError("eigenvector residual {:.3g} exceeds {:.3g}".format(residual, tolerance),
                               report=sweeps)
    return float(values[k]), residual, sweeps


def sample_gue_lambda_max(M: int, T: float, seed: int, convention: Optional[str] = None) -> GueSample:
    """Sample H and return its largest eigenvalue"""
    H = sample_gue_matrix(M, T, seed, convention)
    value, residual, sweeps = lambda_max(H)
    return GueSample(M=M, variance=T, lambda_max=value, seed=int(seed), residual=residual, sweeps=sweeps)


def sample_gue_batch(M: int, T: float, samples: int, base_seed: int,
                     convention: Optional[str] = None) -> np.ndarray:
    """lambda_max of `samples` matrices with replica seeds derived from base_seed"""
    return np.array([sample_gue_lambda_max(M, T, replica_seed(base_seed, k), convention).lambda_max
                     for k in range(samples)])


def ks_distance(samples_a: Sequence[float], samples_b: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|

    Both empirical CDFs are evaluated at every point of the merged sample.
    """
    a = np.sort(np.asarray(samples_a, dtype=float))
    b = np.sort(np.asarray(samples_b, dtype=float))
    if not len(a) or not len(b):
        raise InterfaceError("both samples must be non-empty")
    merged = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, merged, side='right') / len(a)
    cdf_b = np.searchsorted(b, merged, side='right') / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))
