"""PCA on column covariance and ordinary least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# above this width the dense M x M eigensolve is replaced by power iteration
DENSE_PCA_MAX_DIM = 512
_RANK_TOL = 1e-10


@dataclass
class PCAResult:
    components: np.ndarray  # (k, M), k <= requested d
    eigenvalues: np.ndarray  # (k,)
    degenerate: bool  # True when fewer than d informative directions exist


@dataclass
class OLSResult:
    coef: np.ndarray
    residuals: np.ndarray
    stderr: np.ndarray
    sigma2: float


def _fix_signs(rows: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(rows), axis=1)
    signs = np.sign(rows[np.arange(rows.shape[0]), idx])
    signs[signs == 0] = 1.0
    return rows * signs[:, None]


def _power_iteration(cov: np.ndarray, d: int, rng: np.random.Generator, iters: int = 2000, tol: float = 1e-13):
    """Block power iteration with a few extra columns and a Rayleigh-Ritz finish."""
    m = cov.shape[0]
    k = min(m, d + 4)
    q, _ = np.linalg.qr(rng.normal(size=(m, k)))
    prev = np.full(k, np.inf)
    for _ in range(iters):
        q, _ = np.linalg.qr(cov @ q)
        ritz = np.linalg.eigvalsh(q.T @ cov @ q)[::-1]
        if np.all(np.abs(ritz - prev) <= tol * max(abs(ritz[0]), 1e-300)):
            break
        prev = ritz
    vals, vecs = np.linalg.eigh(q.T @ cov @ q)
    order = np.argsort(vals)[::-1][:d]
    return vals[order], (q @ vecs[:, order]).T


def pca_top_d(matrix, d: int, method: str = "auto", seed: int = 0) -> PCAResult:
    """Top-``d`` principal directions of the rows of ``matrix`` (|A| x M).

    Directions are unit rows of the column covariance of the mean-centered
    input, ordered by decreasing eigenvalue; each row's largest-magnitude
    entry is positive.
    """
    x = np.asarray(getattr(matrix, "data", matrix), dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("pca_top_d expects a 2-D matrix")
    n, m = x.shape
    if n < 2:
        raise ValueError("need at least two rows")
    if d < 1 or d > min(n, m):
        raise ValueError(f"d={d} must lie in [1, {min(n, m)}]")
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / (n - 1)
    if method == "auto":
        method = "dense" if m <= DENSE_PCA_MAX_DIM else "power"
    if method == "dense":
        vals, vecs = np.linalg.eigh(cov)
        order = np.argsort(vals)[::-1][:d]
        vals, rows = vals[order], vecs[:, order].T
    elif method == "power":
        vals, rows = _power_iteration(cov, d, np.random.default_rng(seed))
    else:
        raise ValueError(f"unknown method {method!r}")
    top = max(float(vals[0]), 0.0) if len(vals) else 0.0
    keep = vals > _RANK_TOL * max(top, 1e-300)
    if top == 0.0:
        keep[:] = False
    degenerate = bool(keep.sum() < d)
    rows = _fix_signs(rows[keep]) if keep.any() else np.zeros((0, m))
    return PCAResult(components=rows, eigenvalues=vals[keep], degenerate=degenerate)


def ols_fit(design, target) -> OLSResult:
    """Least squares via QR with classical standard errors."""
    x = np.asarray(getattr(design, "data", design), dtype=np.float64)
    y = np.asarray(getattr(target, "data", target), dtype=np.float64).reshape(-1)
    n, k = x.shape
    if n <= k:
        raise ValueError(f"need more observations than regressors (n={n}, k={k})")
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1e-300):
        raise np.linalg.LinAlgError("design matrix is rank deficient")
    coef = np.linalg.solve(r, q.T @ y)
    resid = y - x @ coef
    sigma2 = float(resid @ resid) / (n - k)
    rinv = np.linalg.solve(r, np.eye(k))
    cov_diag = np.sum(rinv * rinv, axis=1)
    return OLSResult(coef=coef, residuals=resid, stderr=np.sqrt(cov_diag * sigma2), sigma2=sigma2)
