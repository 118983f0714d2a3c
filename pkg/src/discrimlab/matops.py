"""Dense Hermitian matrix kernel.

Operators are plain complex ``numpy`` arrays. ``hermitian`` is the single
entry point that validates and symmetrizes user input; everything downstream
assumes its arguments already went through it (or were built from such
arrays by Hermitian-preserving operations).

Matrix functions of PSD operators act on the support only: eigenvalues that
are numerically zero are clamped, so ``psd_power(A, 0)`` is the support
projection and negative powers are pseudo-inverses.
"""

from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, PreconditionError, ResourceError

TOL_HERM = 1e-12
PSD_TOL = 1e-9
SUPPORT_CUT = 1e-10
IMAG_TOL = 1e-10
TENSOR_CAP = 4096

# input asymmetry above this (relative) is rejected instead of symmetrized
_ASYMMETRY_REJECT = 1e-6


class Spectrum(NamedTuple):
    """Eigen-decomposition with eigenvalues sorted in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian(m):
    """Return ``m`` as a symmetrized complex Hermitian array.

    Small asymmetries (rounding from file formats or products) are removed
    by ``(M + M^dagger)/2``; a gross asymmetry is a caller bug and raises.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise PreconditionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > _ASYMMETRY_REJECT * scale:
        raise PreconditionError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
    # always symmetrize so the stored diagonal is exactly real
    return 0.5 * (a + a.conj().T)


def sym(a):
    return 0.5 * (a + a.conj().T)


def real_scalar(z, scale=1.0):
    """Drop a negligible imaginary part; a large one signals a bug upstream."""
    z = complex(z)
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(scale), abs(z.real)):
        raise ValueError(f"unexpected imaginary residue {z.imag:.3g} in a real quantity")
    return z.real


def real_trace(a):
    return real_scalar(np.trace(a))


def eig_hermitian(h):
    """Descending eigen-decomposition of a Hermitian matrix.

    Backed by LAPACK ``heevd`` through ``numpy.linalg.eigh``; its internal
    iteration cap surfaces as ``LinAlgError``, which is rethrown with the
    residual of the best available decomposition.
    """
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        # fall back to the divide-and-conquer-free driver before giving up
        try:
            import scipy.linalg

            w, v = scipy.linalg.eigh(h, driver="ev")
        except Exception:
            raise ConvergenceError(
                "Hermitian eigensolver did not converge", residual=float("nan")
            ) from exc
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def psd_tolerance(trace_norm_value):
    return PSD_TOL * max(1.0, trace_norm_value)


def psd_spectrum(a, name="operator"):
    """Spectrum of a PSD operator with numerically-zero eigenvalues clamped.

    Raises ``DomainError`` if the most negative eigenvalue is below
    ``-1e-9 * max(1, ||A||_1)``.
    """
    w, v = np.linalg.eigh(a)
    w = w[::-1]
    v = v[:, ::-1]
    tol = psd_tolerance(float(np.sum(np.abs(w))))
    if w[-1] < -tol:
        raise DomainError(
            f"{name} is not PSD: min eigenvalue {w[-1]:.6g} < -{tol:.3g}",
            min_eigenvalue=float(w[-1]),
        )
    cut = SUPPORT_CUT * max(w[0], 0.0)
    w = np.where(w > cut, w, 0.0)
    return Spectrum(w, v)


def check_psd(a, name="operator"):
    psd_spectrum(a, name)
    return a


def _spectral_apply(spec, f):
    w, v = spec
    pos = w > 0
    if not np.any(pos):
        return np.zeros((v.shape[0], v.shape[0]), dtype=complex)
    vp = v[:, pos]
    return sym((vp * f(w[pos])) @ vp.conj().T)


def psd_power(a, s):
    """``A^s`` taken on the support of a PSD operator ``A``."""
    spec = psd_spectrum(a)
    if s == 0:
        return _spectral_apply(spec, np.ones_like)
    return _spectral_apply(spec, lambda x: x**s)


def support_projection(a):
    return psd_power(a, 0)


def sqrtm_psd(a):
    return psd_power(a, 0.5)


def abs_op(x):
    """``|X| = (X^2)^{1/2}`` for Hermitian ``X``."""
    w, v = np.linalg.eigh(x)
    return sym((v * np.abs(w)) @ v.conj().T)


def positive_part(x):
    """``X_+ = (|X| + X)/2``, computed spectrally."""
    w, v = np.linalg.eigh(x)
    return sym((v * np.maximum(w, 0.0)) @ v.conj().T)


def negative_part(x):
    """``X_- = (|X| - X)/2`` so that ``X = X_+ - X_-``."""
    return positive_part(-x)


def positive_projector(x):
    """Projector onto the strictly positive eigenspace ``{X > 0}``."""
    w, v = np.linalg.eigh(x)
    vp = v[:, w > 0]
    return vp @ vp.conj().T


def trace_norm(x):
    return float(np.sum(np.abs(np.linalg.eigvalsh(x))))


def op_norm(x):
    w = np.linalg.eigvalsh(x)
    return float(max(abs(w[0]), abs(w[-1])))


def min_eig(x):
    return float(np.linalg.eigvalsh(x)[0])


def max_eig(x):
    return float(np.linalg.eigvalsh(x)[-1])


def is_rank_one(a):
    """Rank one iff the second-largest eigenvalue is at most 1e-9 of the largest."""
    w = np.linalg.eigvalsh(a)[::-1]
    if w[0] <= 0:
        return False
    return len(w) == 1 or w[1] <= 1e-9 * w[0]


def numerical_rank(a):
    w = np.linalg.eigvalsh(a)
    top = max(w[-1], 0.0)
    return int(np.sum(w > SUPPORT_CUT * top)) if top > 0 else 0


def tensor_power(a, n, cap=TENSOR_CAP):
    """n-fold Kronecker power, refusing to exceed ``cap`` rows."""
    if n < 1:
        raise PreconditionError("tensor power needs n >= 1")
    d = a.shape[0]
    if d**n > cap:
        raise ResourceError(f"dimension {d}^{n} = {d**n} exceeds tensor cap {cap}")
    out = a
    for _ in range(n - 1):
        out = np.kron(out, a)
    return out


def direct_sum(a, b):
    da, db = a.shape[0], b.shape[0]
    out = np.zeros((da + db, da + db), dtype=complex)
    out[:da, :da] = a
    out[da:, da:] = b
    return out


def ket(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    return v


def projector(v, normalize=True):
    """``|v><v|``, optionally normalizing ``v`` first."""
    v = ket(v)
    if normalize:
        v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
