"""Optimal attack against given protection investments.

The attacker targets one agent, trading expected stolen documents against
a quadratic targeting cost (omega / 2) * sum(a_i**2) over probability
vectors a on the simplex.  The problem is strictly concave, so the KKT
conditions pin down a unique solution, found exactly by an active-set
water-filling scan: with v_i = (1 - q_i) * docs_i,

    omega = sum_i max(0, v_i + lam),      a_i = max(0, v_i + lam) / omega.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissemination import star_docs

# Values of v_i + lam within this of zero are treated as inactive, so the
# corresponding a_i is an exact 0 rather than a denormalized positive.
BOUNDARY_TOL = 1e-12

_SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class AttackSolution:
    """Optimal attack vector with its KKT multiplier and active set."""

    a: np.ndarray
    lam: float
    active: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "a", a)
        active = np.asarray(self.active, dtype=int)
        active.flags.writeable = False
        object.__setattr__(self, "active", active)

    @property
    def n_star(self) -> int:
        """Number of agents attacked with positive probability."""
        return len(self.active)


def _as_security(q, n: int | None = None) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if n is not None and q.shape != (n,):
        raise ValueError(f"expected {n} investments, got shape {q.shape}")
    if (q < -1e-12).any() or (q > 1.0 + 1e-12).any():
        raise ValueError("investments must lie in [0, 1]")
    return np.clip(q, 0.0, 1.0)


def optimal_attack(q, docs, omega: float) -> AttackSolution:
    """Solve the attacker's simplex-constrained quadratic program exactly.

    Sorts v_i = (1 - q_i) * docs_i descending (stable, so ties break by
    agent index) and scans for the largest prefix k whose water level
    lam_k = (omega - sum of top k) / k keeps the k-th value positive.
    """
    q = _as_security(q)
    docs = np.atleast_1d(np.asarray(docs, dtype=float))
    if docs.shape != q.shape:
        raise ValueError("q and docs must have the same length")
    if omega < 1.0:
        raise ValueError(f"omega must be >= 1, got {omega}")
    if (docs < 1.0 - 1e-9).any():
        raise ValueError("expected documents are always >= 1 on a connected graph")
    n = q.size
    v = (1.0 - q) * docs
    if n == 1:
        return AttackSolution(np.ones(1), float(omega - v[0]), np.arange(1))
    if v.max() == v.min():
        # All-equal values: the solution is exactly uniform.
        return AttackSolution(np.full(n, 1.0 / n), float(omega / n - v[0]), np.arange(n))
    order = np.argsort(-v, kind="stable")
    vs = v[order]
    ks = np.arange(1, n + 1)
    lams = (omega - np.cumsum(vs)) / ks
    positive = vs + lams > BOUNDARY_TOL
    k = int(np.nonzero(positive)[0][-1]) + 1
    lam = float(lams[k - 1])
    # One correction pass pins the simplex sum to machine precision.
    lam += (1.0 - np.maximum(v + lam, 0.0).sum() / omega) * omega / k
    a = np.maximum(v + lam, 0.0) / omega
    a[v + lam <= BOUNDARY_TOL] = 0.0
    return AttackSolution(a, lam, np.nonzero(a > 0.0)[0])


def kkt_residual(sol: AttackSolution, q, docs, omega: float) -> float:
    """Worst violation of the stationarity/slackness conditions at sol."""
    q = _as_security(q)
    docs = np.asarray(docs, dtype=float)
    v = (1.0 - q) * docs
    active = np.zeros(q.size, dtype=bool)
    active[sol.active] = True
    res = 0.0
    if active.any():
        res = float(np.abs(v[active] - omega * sol.a[active] + sol.lam).max())
    if (~active).any():
        res = max(res, float(np.maximum(v[~active] + sol.lam, 0.0).max()))
    return res


def attack_sensitivity(sol: AttackSolution, docs, omega: float) -> np.ndarray:
    """Jacobian of the optimal attack: entry (i, j) is d a_i / d q_j.

    For active agents, d a_i / d q_i = -((k - 1) / (omega k)) * docs_i and
    d a_i / d q_j = docs_j / (omega k) with k the active-set size; rows and
    columns of inactive agents are zero.  The formula is valid in the
    interior of the current active-set region; at a region boundary only
    one-sided derivatives exist and they are not represented here.
    """
    docs = np.asarray(docs, dtype=float)
    n = sol.a.size
    jac = np.zeros((n, n))
    act = sol.active
    k = sol.n_star
    if k <= 1:
        return jac
    block = np.tile(docs[act] / (omega * k), (k, 1))
    np.fill_diagonal(block, -(k - 1) * docs[act] / (omega * k))
    jac[np.ix_(act, act)] = block
    return jac


def breach_probabilities(a, q, reach) -> np.ndarray:
    """Probability each agent's document is stolen, for all agents at once."""
    a = np.asarray(a, dtype=float)
    q = _as_security(q)
    reach = np.asarray(reach, dtype=float)
    return reach @ (a * (1.0 - q))


def breach_probability(i: int, a, q, reach) -> float:
    """Probability agent i's document is stolen: sum_j a_j (1-q_j) reach[i, j]."""
    return float(breach_probabilities(a, q, reach)[i])


def expected_stolen(a, q, docs) -> float:
    """Expected number of stolen documents: sum_j a_j (1-q_j) docs_j."""
    a = np.asarray(a, dtype=float)
    q = _as_security(q)
    docs = np.asarray(docs, dtype=float)
    return float(a @ ((1.0 - q) * docs))


def attacker_payoff(a, q, docs, omega: float) -> float:
    """Expected stolen documents minus the quadratic targeting cost."""
    a = np.asarray(a, dtype=float)
    if abs(a.sum() - 1.0) > _SIMPLEX_TOL or (a < -_SIMPLEX_TOL).any():
        raise ValueError("attack vector must lie on the probability simplex")
    return expected_stolen(a, q, docs) - 0.5 * omega * float(a @ a)


def star_attack(
    n: int, p: float, q_center: float, q_leaf: float, omega: float
) -> tuple[float, float]:
    """Optimal attack on a star with symmetric leaf investments.

    Returns (a_center, a_leaf).  With gap = (1-q_center) * docs_center -
    (1-q_leaf) * docs_leaf, the solution is the all-in corner (1, 0) when
    omega <= gap, the leaves-only corner (0, 1/(n-1)) when
    omega <= -(n-1) * gap, and otherwise interior:

        a_center = 1/n + (1 - 1/n) * gap / omega
        a_leaf   = 1/n - gap / (n * omega)
    """
    if n < 3:
        raise ValueError(f"star attack formula needs n >= 3, got {n}")
    if omega < 1.0:
        raise ValueError(f"omega must be >= 1, got {omega}")
    hub_docs, leaf_docs = star_docs(n, p)
    gap = (1.0 - q_center) * hub_docs - (1.0 - q_leaf) * leaf_docs
    if omega <= gap:
        return 1.0, 0.0
    if omega <= -(n - 1) * gap:
        return 0.0, 1.0 / (n - 1)
    return 1.0 / n + (1.0 - 1.0 / n) * gap / omega, 1.0 / n - gap / (n * omega)
