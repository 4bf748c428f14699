"""Information-form algebra for 4-state position-velocity Gaussians.

The state layout is [px, py, vx, vy] (m, m, m/s, m/s).  A message is the
pair (lam, eta) with lam = C**-1 and eta = C**-1 @ mu, so a product of
Gaussian densities is an entrywise sum of the pairs: exact, inversion-free,
and order-independent up to floating-point summation.  Rank-deficient
evidence -- a position fix that says nothing about velocity -- is simply a
lam with a zero velocity block, and the uninformative message is lam = 0,
eta = 0 (the limit of covariance tending to infinity).  Moment form is
recovered only at reporting boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

STATE_DIM = 4

#: Constant 2x4 selector mapping a state vector to its position components.
POSITION_PROJECTOR = np.array([[1.0, 0.0, 0.0, 0.0],
                               [0.0, 1.0, 0.0, 0.0]])
POSITION_PROJECTOR.setflags(write=False)

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
COLSPACE_RTOL = 1e-8
#: An eigenvalue below -EIG_FLOOR_RTOL * scale marks a division result
#: indefinite (beyond floating-point noise) and triggers the floor policy.
EIG_FLOOR_RTOL = 1e-10
#: Absolute information floor; directions with less information than this
#: (sigma beyond ~1e6) are treated as unobserved.
INFO_ATOL = 1e-12


class DegenerateMessageError(ValueError):
    """Moments were requested from a rank-deficient message."""

    def __init__(self, nullity: int):
        self.nullity = nullity
        super().__init__(
            f"information matrix is singular (null-space dimension {nullity})"
        )


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InfoMessage:
    """Gaussian in information form over the 4-dim state.

    ``lam`` is the 4x4 symmetric PSD information matrix (1/m^2 in the
    position block, 1/(m/s)^2 in the velocity block); ``eta = lam @ mean``.
    ``indefinite`` records that an eigenvalue floor was applied after a
    message division (consensus residue); the stored matrix is PSD again.
    Instances are immutable; all operations return new messages.
    """

    lam: np.ndarray
    eta: np.ndarray
    indefinite: bool = False

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        eta = np.asarray(self.eta, dtype=float).reshape(-1)
        if lam.shape != (STATE_DIM, STATE_DIM) or eta.shape != (STATE_DIM,):
            raise ValueError(f"expected 4x4/4 arrays, got {lam.shape}/{eta.shape}")
        scale = np.abs(lam).max()
        if scale > 0 and np.abs(lam - lam.T).max() > SYMMETRY_RTOL * scale:
            raise ValueError("information matrix is not symmetric")
        object.__setattr__(self, "lam", _freeze(_symmetrize(lam)))
        object.__setattr__(self, "eta", _freeze(eta))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "InfoMessage":
        """The uninformative message (covariance tending to infinity)."""
        return cls(np.zeros((STATE_DIM, STATE_DIM)), np.zeros(STATE_DIM))

    # -- diagnostics -------------------------------------------------------

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.lam)

    def rank(self, atol: float = INFO_ATOL) -> int:
        w = self.eigenvalues()
        tol = max(atol, PSD_RTOL * max(w.max(), 0.0))
        return int(np.sum(w > tol))

    def is_psd(self) -> bool:
        w = self.eigenvalues()
        scale = max(np.abs(w).max(), 0.0)
        return bool(w.min() >= -PSD_RTOL * max(scale, 1.0))

    def validate(self) -> None:
        """Check the message invariants; raises ValueError on violation."""
        if not self.is_psd():
            raise ValueError("information matrix has a negative eigenvalue")
        # eta must lie in the column space of lam
        sol, *_ = np.linalg.lstsq(self.lam, self.eta, rcond=None)
        resid = np.linalg.norm(self.lam @ sol - self.eta)
        ref = max(np.linalg.norm(self.eta), 1.0)
        if resid > COLSPACE_RTOL * ref:
            raise ValueError("eta is not in the column space of lam")

    def mean_where_defined(self) -> np.ndarray:
        """Least-squares mean; components in null directions are zero."""
        sol, *_ = np.linalg.lstsq(self.lam, self.eta, rcond=None)
        return sol


@dataclass(frozen=True, eq=False)
class MomentGaussian:
    """Moment-form Gaussian: mean (m, m/s) and SPD covariance."""

    mu: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (STATE_DIM, STATE_DIM) or mu.shape != (STATE_DIM,):
            raise ValueError(f"expected 4x4/4 arrays, got {cov.shape}/{mu.shape}")
        object.__setattr__(self, "mu", _freeze(mu))
        object.__setattr__(self, "cov", _freeze(_symmetrize(cov)))


def info_product(msgs: Sequence[InfoMessage]) -> InfoMessage:
    """Product of Gaussian densities: entrywise sum of (lam, eta) pairs.

    Exact -- no inversion is performed -- and deterministic for a fixed
    argument order (summation runs left to right).
    """
    if len(msgs) == 0:
        raise ValueError("info_product requires at least one message")
    lam = np.zeros((STATE_DIM, STATE_DIM))
    eta = np.zeros(STATE_DIM)
    for m in msgs:
        lam = lam + m.lam
        eta = eta + m.eta
    return InfoMessage(_symmetrize(lam), eta)


def info_divide(num: InfoMessage, den: InfoMessage, floor: bool = True) -> InfoMessage:
    """Quotient of Gaussian densities: entrywise difference of pairs.

    Division undoes a previous product exactly.  When the numerator is only
    an approximate sum (consensus residue), the difference can pick up a
    genuinely negative eigenvalue; with ``floor=True`` negative eigenvalues
    are clamped to zero, eta is projected onto the retained column space,
    and the result is flagged ``indefinite``.  With ``floor=False`` the raw
    difference is returned with the flag set.
    """
    lam = _symmetrize(num.lam - den.lam)
    eta = num.eta - den.eta
    w = np.linalg.eigvalsh(lam)
    scale = max(np.abs(w).max(), 1.0)
    if w[0] >= -EIG_FLOOR_RTOL * scale:
        return InfoMessage(lam, eta)
    if not floor:
        # caller opted out: hand back the indefinite matrix, flagged
        msg = InfoMessage.__new__(InfoMessage)
        object.__setattr__(msg, "lam", _freeze(lam))
        object.__setattr__(msg, "eta", _freeze(eta))
        object.__setattr__(msg, "indefinite", True)
        return msg
    w_full, v = np.linalg.eigh(lam)
    keep = w_full > 0.0
    lam_f = (v[:, keep] * w_full[keep]) @ v[:, keep].T
    eta_f = v[:, keep] @ (v[:, keep].T @ eta)
    return InfoMessage(_symmetrize(lam_f), eta_f, indefinite=True)


def to_moments(m: InfoMessage) -> MomentGaussian:
    """Invert a full-rank message to moment form via Cholesky.

    Raises DegenerateMessageError naming the null-space dimension when the
    information matrix is singular.
    """
    try:
        c, low = scipy.linalg.cho_factor(m.lam, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises its own
        raise DegenerateMessageError(STATE_DIM - m.rank()) from exc
    except scipy.linalg.LinAlgError:
        raise DegenerateMessageError(STATE_DIM - m.rank()) from None
    cov = scipy.linalg.cho_solve((c, low), np.eye(STATE_DIM))
    mu = scipy.linalg.cho_solve((c, low), m.eta)
    return MomentGaussian(mu, cov)


def from_moments(g: MomentGaussian) -> InfoMessage:
    """Convert moment form back to information form (cov must be SPD)."""
    c, low = scipy.linalg.cho_factor(g.cov, lower=True)
    lam = scipy.linalg.cho_solve((c, low), np.eye(STATE_DIM))
    eta = scipy.linalg.cho_solve((c, low), g.mu)
    return InfoMessage(_symmetrize(lam), eta)


def lift_position_observation(z: np.ndarray, r: np.ndarray) -> InfoMessage:
    """Lift a 2-d position observation N(z, r) to a rank-2 state message.

    lam = P.T @ r^-1 @ P carries information only in the position block;
    the velocity block is zero (infinite variance in the velocity domain).
    """
    z = np.asarray(z, dtype=float).reshape(2)
    r = np.asarray(r, dtype=float)
    if r.shape != (2, 2):
        raise ValueError(f"observation covariance must be 2x2, got {r.shape}")
    try:
        c, low = scipy.linalg.cho_factor(_symmetrize(r), lower=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        raise ValueError("observation covariance is not positive definite")
    r_inv = scipy.linalg.cho_solve((c, low), np.eye(2))
    r_inv = _symmetrize(r_inv)
    lam = np.zeros((STATE_DIM, STATE_DIM))
    lam[:2, :2] = r_inv
    eta = np.zeros(STATE_DIM)
    eta[:2] = r_inv @ z
    return InfoMessage(lam, eta)


def position_marginal(m: InfoMessage) -> tuple[np.ndarray, np.ndarray]:
    """Marginal of the position block, in 2-d information form (J, h).

    Computed as the generalized Schur complement
    J = lam_pp - lam_pv pinv(lam_vv) lam_vp (and likewise for h), which is
    exact for PSD matrices because the cross block lies in the range of the
    velocity block.  Works for full-rank, position-only, and uninformative
    messages alike; J may itself be singular.
    """
    lam, eta = m.lam, m.eta
    lpp, lpv, lvv = lam[:2, :2], lam[:2, 2:], lam[2:, 2:]
    w, v = np.linalg.eigh(lvv)
    cutoff = max(INFO_ATOL, PSD_RTOL * max(np.abs(lam).max(), 1.0) * 1e-2)
    inv_w = np.where(w > cutoff, 1.0 / np.maximum(w, cutoff), 0.0)
    lvv_pinv = (v * inv_w) @ v.T
    j = _symmetrize(lpp - lpv @ lvv_pinv @ lpv.T)
    h = eta[:2] - lpv @ lvv_pinv @ eta[2:]
    return j, h
