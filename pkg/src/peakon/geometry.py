"""Curvature of the peakon metric.

Closed forms are evaluated through the gap variables
``u = exp(q2 - q1)`` and ``v = exp(q3 - q2)``, both in (0, 1) on the
ordered domain, so nothing overflows however large the positions are.
The finite-difference routines form an independent oracle: they only
see the metric ``g = E^-1`` and apply the textbook Christoffel and
curvature formulas.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import product
from typing import Optional

import mpmath
import numpy as np
import scipy.linalg

from .core import check_positions, e_matrix, metric_matrix
from .errors import (
    DegeneratePlane,
    ExponentOverflow,
    NotPositiveDefinite,
    StepTooLarge,
    WrongArity,
)

CHRISTOFFEL_STEP = 1e-5
OVERFLOW_LIMIT = 300.0


def _require(q, n):
    q = check_positions(q)
    if q.size != n:
        raise WrongArity(f"expected {n} peaks, got {q.size}")
    return q


def _kappa_of_gap(z):
    # (e^z - 2) / (e^z + 1)^2 rewritten with w = e^-z to stay finite
    w = np.exp(-z)
    return (w - 2.0 * w * w) / (1.0 + w) ** 2


def gauss_curvature_2d(q) -> float:
    """Gauss curvature of the twopeakon metric; negative below gap ``ln 2``."""
    q = _require(q, 2)
    return float(_kappa_of_gap(q[0] - q[1]))


# ---------------------------------------------------------------------------
# finite-difference oracle


def _christoffel_from_metric(metric, inverse, q, step):
    """Christoffel symbols ``G[k][i][j]`` by central differences of ``metric``.

    Works on plain Python scalars so the same code runs in float64 and in
    mpmath extended precision.
    """
    n = len(q)
    dg = []
    for r in range(n):
        qp = list(q)
        qm = list(q)
        qp[r] += step
        qm[r] -= step
        gp, gm = metric(qp), metric(qm)
        dg.append([[(gp[a][b] - gm[a][b]) / (2 * step) for b in range(n)] for a in range(n)])
    ginv = inverse(q)
    return [
        [
            [
                sum(ginv[k][r] * (dg[j][i][r] + dg[i][j][r] - dg[r][i][j]) for r in range(n)) / 2
                for j in range(n)
            ]
            for i in range(n)
        ]
        for k in range(n)
    ]


def _check_step(q, step):
    gaps = q[:-1] - q[1:]
    if gaps.size and np.min(gaps) < 10 * step:
        raise StepTooLarge(f"gaps {gaps} must be at least 10*step={10 * step:g}")


def christoffel_fd(q, step: float = CHRISTOFFEL_STEP) -> np.ndarray:
    """Christoffel symbols ``G[k, i, j]`` (upper index first) of :func:`metric_matrix`."""
    q = check_positions(q)
    _check_step(q, step)
    G = _christoffel_from_metric(
        lambda x: metric_matrix(x).tolist(),
        lambda x: e_matrix(x).tolist(),
        [float(x) for x in q],
        step,
    )
    return np.array(G, dtype=float)


def christoffel_2d_analytic(q) -> np.ndarray:
    """Twopeakon Christoffel symbols in the original position coordinates.

    Obtained from the diagonal form of the metric in ``s1 = (q1+q2)/2``,
    ``s2 = (q1-q2)/2``; the change of coordinates is linear, so the symbols
    transform as a tensor.
    """
    q = _require(q, 2)
    w = np.exp(-(q[0] - q[1]))  # = exp(-2 s2)
    Gs = np.zeros((2, 2, 2))
    Gs[0, 0, 1] = Gs[0, 1, 0] = w / (1 + w)
    Gs[1, 0, 0] = -w * (1 - w) / (1 + w) ** 2
    Gs[1, 1, 1] = -w / -np.expm1(-(q[0] - q[1]))
    dq_ds = np.array([[1.0, 1.0], [1.0, -1.0]])
    ds_dq = np.array([[0.5, 0.5], [0.5, -0.5]])
    return np.einsum("ka,abc,bi,cj->kij", dq_ds, Gs, ds_dq, ds_dq)


def _mp_metric(q):
    n = len(q)
    E = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            E[i, j] = mpmath.exp(-abs(q[i] - q[j]))
    g = E**-1
    return [[g[i, j] for j in range(n)] for i in range(n)]


def _mp_gram(q):
    n = len(q)
    return [[mpmath.exp(-abs(q[i] - q[j])) for j in range(n)] for i in range(n)]


def riemann_tensor_fd(q, dps: int = 50, inner_step="1e-15", outer_step="1e-12") -> np.ndarray:
    """Covariant Riemann tensor ``R[i, j, k, l] = g(R(d_k, d_l) d_j, d_i)``.

    Christoffel symbols come from central differences of ``E^-1`` (inverted
    numerically, not through any closed form) and their derivatives from a
    second round of central differences.  Both rounds run in ``dps``-digit
    arithmetic so nested differencing stays far below double-precision
    roundoff.
    """
    q = check_positions(q)
    with mpmath.workdps(dps):
        h_in = mpmath.mpf(inner_step)
        h_out = mpmath.mpf(outer_step)
        _check_step(q, float(max(h_in, h_out)))
        x = [mpmath.mpf(float(v)) for v in q]
        n = len(x)

        def gamma(y):
            return _christoffel_from_metric(_mp_metric, _mp_gram, y, h_in)

        G = gamma(x)
        dG = []
        for c in range(n):
            xp = list(x)
            xm = list(x)
            xp[c] += h_out
            xm[c] -= h_out
            a, b = gamma(xp), gamma(xm)
            dG.append(
                [
                    [[(a[r][s][t] - b[r][s][t]) / (2 * h_out) for t in range(n)] for s in range(n)]
                    for r in range(n)
                ]
            )
        g = _mp_metric(x)
        R = np.zeros((n, n, n, n))
        for j, k, l in product(range(n), repeat=3):
            up = [
                dG[k][a][l][j]
                - dG[l][a][k][j]
                + sum(G[a][k][e] * G[e][l][j] - G[a][l][e] * G[e][k][j] for e in range(n))
                for a in range(n)
            ]
            for i in range(n):
                R[i, j, k, l] = float(sum(g[i][a] * up[a] for a in range(n)))
    return R


def gauss_curvature_fd(q, **kwargs) -> float:
    """Gauss curvature ``R_1212 / det g`` from :func:`riemann_tensor_fd`."""
    q = _require(q, 2)
    R = riemann_tensor_fd(q, **kwargs)
    return float(R[0, 1, 0, 1] / np.linalg.det(metric_matrix(q)))


# ---------------------------------------------------------------------------
# closed forms, threepeakon


@dataclass(frozen=True)
class RiemannComponents3D:
    """The six independent covariant components; the rest follow by symmetry."""

    r1212: float
    r2323: float
    r1313: float
    r1213: float
    r1223: float
    r1323: float

    def tensor(self) -> np.ndarray:
        """Expand to the full 3x3x3x3 array using ``R_ijkl = R_klij = -R_jikl``."""
        R = np.zeros((3, 3, 3, 3))
        pairs = {
            (0, 1, 0, 1): self.r1212,
            (1, 2, 1, 2): self.r2323,
            (0, 2, 0, 2): self.r1313,
            (0, 1, 0, 2): self.r1213,
            (0, 1, 1, 2): self.r1223,
            (0, 2, 1, 2): self.r1323,
        }
        for (i, j, k, l), val in pairs.items():
            for a, b, c, d in ((i, j, k, l), (k, l, i, j)):
                R[a, b, c, d] = val
                R[b, a, c, d] = -val
                R[a, b, d, c] = -val
                R[b, a, d, c] = val
        return R

    def component(self, i, j, k, l) -> float:
        """Component with 1-based indices, e.g. ``component(1, 2, 1, 3)``."""
        return float(self.tensor()[i - 1, j - 1, k - 1, l - 1])

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_tensor(cls, R) -> "RiemannComponents3D":
        R = np.asarray(R)
        return cls(
            r1212=float(R[0, 1, 0, 1]),
            r2323=float(R[1, 2, 1, 2]),
            r1313=float(R[0, 2, 0, 2]),
            r1213=float(R[0, 1, 0, 2]),
            r1223=float(R[0, 1, 1, 2]),
            r1323=float(R[0, 2, 1, 2]),
        )


def riemann_fd(q, **kwargs) -> RiemannComponents3D:
    """Independent components of :func:`riemann_tensor_fd` for a threepeakon."""
    return RiemannComponents3D.from_tensor(riemann_tensor_fd(_require(q, 3), **kwargs))


def _gap_vars(q):
    return np.exp(q[1] - q[0]), np.exp(q[2] - q[1])


def _q_components(u, v) -> dict:
    """Curvature components rescaled by ``det E``; regular up to the collision set."""
    d3 = (1 + u) * (1 + v)
    return {
        "1212": (3 * u * u * v**3 + 2 * u * u * v * v - 2 * u * u * v - 2 * u * u - u * v * v + u * v + u)
        / ((1 + u) * d3),
        "2323": (3 * u**3 * v * v + 2 * u * u * v * v - 2 * u * v * v - 2 * v * v - u * u * v + u * v + v)
        / ((1 + v) * d3),
        "1313": u * v / d3,
        "1213": -u * v * v / d3,
        "1223": u * u * v * v / d3,
        "1323": -u * u * v / d3,
    }


def curvature_q_matrix(q) -> np.ndarray:
    """Symmetric matrix ``Q`` with ``kappa = <Q z, z> / <E z, z>`` on bivector coordinates ``z``."""
    q = _require(q, 3)
    c = _q_components(*_gap_vars(q))
    return np.array(
        [
            [c["2323"], -c["1323"], c["1223"]],
            [-c["1323"], c["1313"], -c["1213"]],
            [c["1223"], -c["1213"], c["1212"]],
        ]
    )


def riemann_3d(q) -> RiemannComponents3D:
    """Closed-form covariant Riemann components of the threepeakon metric."""
    q = _require(q, 3)
    if np.max(np.abs(q)) > OVERFLOW_LIMIT:
        raise ExponentOverflow(f"|q| exceeds {OVERFLOW_LIMIT}: {q}")
    u, v = _gap_vars(q)
    c = _q_components(u, v)
    # det E = (1 - u^2)(1 - v^2); expm1 keeps it accurate for small gaps
    det_e = np.expm1(2 * (q[1] - q[0])) * np.expm1(2 * (q[2] - q[1]))
    return RiemannComponents3D(**{f"r{k}": float(val / det_e) for k, val in c.items()})


def bivector(a, b) -> np.ndarray:
    """Coordinates ``(a2 b3 - a3 b2, a3 b1 - a1 b3, a1 b2 - a2 b1)`` of ``a ^ b``."""
    return np.cross(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def _orthonormal_pair(a, b):
    Qm, _ = np.linalg.qr(np.column_stack([a, b]))
    return Qm[:, 0], Qm[:, 1]


def sectional_curvature_3d(q, a, b) -> float:
    """Sectional curvature of the plane spanned by ``a`` and ``b``.

    Uses the reduction to ``<Q z, z> / <E z, z>`` with ``z = a x b``.
    The pair is orthonormalized (Euclidean) first purely for conditioning;
    the quotient does not depend on the basis of the plane.
    """
    q = _require(q, 3)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (3,) or b.shape != (3,):
        raise WrongArity("plane vectors must have 3 components")
    zeta = bivector(a, b)
    if np.linalg.norm(zeta) < 1e-12 * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)):
        raise DegeneratePlane(f"vectors {a} and {b} do not span a plane")
    zeta = bivector(*_orthonormal_pair(a, b))
    Q = curvature_q_matrix(q)
    E = e_matrix(q)
    return float(zeta @ Q @ zeta / (zeta @ E @ zeta))


def sectional_curvature_direct(q, a, b, R=None) -> float:
    """Sectional curvature by full contraction ``R_ijkl a_i b_j a_k b_l / |a ^ b|_g^2``."""
    q = check_positions(q)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if R is None:
        R = riemann_3d(q).tensor()
    g = metric_matrix(q)
    area = (a @ g @ a) * (b @ g @ b) - (a @ g @ b) ** 2
    if area <= 0:
        raise DegeneratePlane(f"vectors {a} and {b} do not span a plane")
    return float(np.einsum("ijkl,i,j,k,l->", R, a, b, a, b) / area)


@dataclass(frozen=True)
class CurvatureEigenvalues:
    lambda1: float
    lambda2: float
    lambda3: float

    def max(self) -> float:
        return max(self.lambda1, self.lambda2, self.lambda3)

    def as_tuple(self) -> tuple:
        return (self.lambda1, self.lambda2, self.lambda3)


EIGEN_RESIDUAL_TOL = 1e-8


def curvature_eigenvalues(q, check: bool = True) -> CurvatureEigenvalues:
    """Closed-form eigenvalues of ``E^-1 Q``; the largest bounds every sectional curvature.

    ``lambda1`` and ``lambda3`` equal the twopeakon Gauss curvature of the
    gaps ``q2 - q3`` and ``q1 - q2``.  With ``check`` each value is
    confirmed as an eigenvalue by a null-vector residual.
    """
    q = _require(q, 3)
    u, v = _gap_vars(q)
    lam = CurvatureEigenvalues(
        lambda1=float((v - 2 * v * v) / (1 + v) ** 2),
        lambda2=float(u * v / ((1 + u) * (1 + v))),
        lambda3=float((u - 2 * u * u) / (1 + u) ** 2),
    )
    if check:
        M = np.linalg.solve(e_matrix(q), curvature_q_matrix(q))
        for val in lam.as_tuple():
            A = M - val * np.eye(3)
            vec = np.linalg.svd(A)[2][-1]
            res = np.linalg.norm(A @ vec)
            if res > EIGEN_RESIDUAL_TOL:
                raise ArithmeticError(
                    f"closed-form eigenvalue {val} fails residual check ({res:.2e}) at q={q}"
                )
    return lam


def rayleigh_max(A, B) -> tuple[float, np.ndarray]:
    """Largest ``<A z, z> / <B z, z>``: the top eigenpair of ``B^-1 A``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise WrongArity(f"A and B must be square of equal size, got {A.shape}, {B.shape}")
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("B is not positive definite") from exc
    vals, vecs = scipy.linalg.eigh(0.5 * (A + A.T), 0.5 * (B + B.T))
    return float(vals[-1]), vecs[:, -1]


@dataclass(frozen=True)
class CurvatureReport:
    q: tuple
    kappa: Optional[float] = None
    riemann: Optional[RiemannComponents3D] = None
    eigenvalues: Optional[CurvatureEigenvalues] = None
    sectional: Optional[float] = None

    def as_dict(self) -> dict:
        out = {"q": list(self.q)}
        if self.kappa is not None:
            out["kappa"] = self.kappa
        if self.riemann is not None:
            out["riemann"] = self.riemann.as_dict()
        if self.eigenvalues is not None:
            out["eigenvalues"] = list(self.eigenvalues.as_tuple())
        if self.sectional is not None:
            out["sectional"] = self.sectional
        return out


def curvature_report(q, plane=None) -> CurvatureReport:
    """Gauss curvature for n=2; Riemann components, eigenvalues and optional plane curvature for n=3."""
    q = check_positions(q)
    if q.size == 2:
        if plane is not None:
            raise WrongArity("a plane can only be given for three peaks")
        return CurvatureReport(q=tuple(q.tolist()), kappa=gauss_curvature_2d(q))
    if q.size == 3:
        sec = None
        if plane is not None:
            a, b = plane
            sec = sectional_curvature_3d(q, a, b)
        return CurvatureReport(
            q=tuple(q.tolist()),
            riemann=riemann_3d(q),
            eigenvalues=curvature_eigenvalues(q),
            sectional=sec,
        )
    raise WrongArity(f"curvature needs 2 or 3 peaks, got {q.size}")
