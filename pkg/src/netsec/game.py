"""Equilibria and social optima of the two-stage security game.

Defenders pick investments q first; the attacker best-responds.  Against a
random (uniform) attack both the Nash equilibrium and the social optimum
have closed forms on any graph.  Against a strategic attack, closed forms
exist when every agent expects the same document count (vertex-transitive
networks); general graphs are handled by best-response dynamics and
projected gradient ascent on welfare.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attack import (
    AttackSolution,
    breach_probabilities,
    expected_stolen,
    optimal_attack,
)
from .dissemination import (
    Dissemination,
    Params,
    complete_docs,
    ring_docs,
    star_docs,
)
from .graph import COMPLETE, RING, Graph

NASH_RANDOM = "nash-random"
OPT_RANDOM = "opt-random"
NASH_STRATEGIC = "nash-strategic"
OPT_STRATEGIC = "opt-strategic"

REGIMES = (NASH_RANDOM, OPT_RANDOM, NASH_STRATEGIC, OPT_STRATEGIC)

_HOMOGENEITY_TOL = 1e-9


class NonConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations.

    Carries the last iterate and its residual so callers can inspect or
    restart.
    """

    def __init__(self, message, last_q=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_q = last_q
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class GameOutcome:
    """Investments with the induced attack, per-agent rewards, and welfare."""

    q: np.ndarray
    attack_vector: np.ndarray
    rewards: np.ndarray
    welfare: float
    regime: str
    attack: AttackSolution | None = None

    def __post_init__(self):
        for name in ("q", "attack_vector", "rewards"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def evaluate_outcome(
    diss: Dissemination, params: Params, q, regime: str
) -> GameOutcome:
    """Assemble a GameOutcome for given investments under a regime.

    Strategic regimes face the attacker's best response; random regimes
    face the uniform attack.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    q = np.asarray(q, dtype=float)
    n = diss.n
    docs = diss.expected_docs
    sol = None
    if regime in (NASH_STRATEGIC, OPT_STRATEGIC):
        sol = optimal_attack(q, docs, params.omega)
        a = sol.a
    else:
        a = np.full(n, 1.0 / n)
    rewards = 1.0 - breach_probabilities(a, q, diss.reach) - 0.5 * params.alpha * q**2
    welfare = n - expected_stolen(a, q, docs) - 0.5 * params.alpha * float(q @ q)
    return GameOutcome(q, a, rewards, welfare, regime, attack=sol)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def nash_random(n: int, alpha: float) -> np.ndarray:
    """Equilibrium against a uniform random attack: q_i = 1 / (alpha n).

    Independent of the transmission probability and of the topology.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    return np.full(n, 1.0 / (alpha * n))


def social_optimum_random(docs, alpha: float) -> np.ndarray:
    """Socially optimal investments against a random attack: docs_i / (alpha n)."""
    docs = np.atleast_1d(np.asarray(docs, dtype=float))
    n = docs.size
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if (docs > n + 1e-9).any() or (docs < 1.0 - 1e-9).any():
        raise ValueError("expected documents must lie in [1, n]")
    return docs / (alpha * n)


def _homogeneous_docs(docs, n: int | None) -> tuple[float, int]:
    arr = np.atleast_1d(np.asarray(docs, dtype=float))
    if arr.size > 1:
        if arr.max() - arr.min() > _HOMOGENEITY_TOL:
            raise ValueError(
                "expected-document entries differ; this closed form only "
                "applies when all agents expect the same count"
            )
        if n is None:
            n = arr.size
        elif n != arr.size:
            raise ValueError(f"docs has length {arr.size} but n={n}")
        return float(arr.mean()), n
    if n is None:
        raise ValueError("n is required when docs is a scalar")
    return float(arr[0]), n


def social_optimum_strategic_vt(docs, n: int | None = None, alpha: float = 1.0) -> np.ndarray:
    """Social optimum against a strategic attack on a vertex-transitive network.

    Equals the random-attack optimum docs / (alpha n): the optimal uniform
    investments make the attack probabilities uniform, voiding the
    attacker's strategic edge.
    """
    d, n = _homogeneous_docs(docs, n)
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    return np.full(n, d / (alpha * n))


def nash_strategic_vt(
    docs, n: int | None = None, alpha: float = 1.0, omega: float = 1.0
) -> np.ndarray:
    """Equilibrium against a strategic attack on a vertex-transitive network.

    q_i = ((n - d) d + omega) / ((n - d) d + alpha n omega) with d the
    common expected-document count.
    """
    d, n = _homogeneous_docs(docs, n)
    if alpha < 1.0 or omega < 1.0:
        raise ValueError("alpha and omega must be >= 1")
    spread = (n - d) * d
    return np.full(n, (spread + omega) / (spread + alpha * n * omega))


# ---------------------------------------------------------------------------
# Iterative solvers
# ---------------------------------------------------------------------------

def _coupled_reward_gradient(i, q, docs, reach, alpha, omega):
    """d reward_i / d q_i with the attacker re-solved at q.

    Equals a_i - sum_j (d a_j / d q_i)(1 - q_j) reach[i, j] - alpha q_i;
    the middle term vanishes when agent i is not attacked.
    """
    sol = optimal_attack(q, docs, omega)
    if sol.a[i] <= 0.0:
        return -alpha * q[i], sol
    k = sol.n_star
    others = sol.active[sol.active != i]
    coupling = (
        docs[i]
        / (omega * k)
        * (((1.0 - q[others]) * reach[i, others]).sum() - (k - 1) * (1.0 - q[i]))
    )
    return sol.a[i] - coupling - alpha * q[i], sol


def _best_response(i, q, docs, reach, alpha, omega, gtol=1e-10):
    """Maximize agent i's concave reward over q_i in [0, 1].

    Bisection on the reward gradient (which starts positive at 0), with
    Newton steps from the known curvature whenever they stay inside the
    bracket.
    """
    work = q.copy()

    def grad(x):
        work[i] = x
        return _coupled_reward_gradient(i, work, docs, reach, alpha, omega)

    g_lo, _ = grad(0.0)
    if g_lo <= 0.0:
        return 0.0
    g_hi, _ = grad(1.0)
    if g_hi >= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    x = 0.5
    for _ in range(200):
        g, sol = grad(x)
        if abs(g) <= gtol:
            return x
        if g > 0.0:
            lo = x
        else:
            hi = x
        if sol.a[i] > 0.0 and sol.n_star > 1:
            curvature = -2.0 * docs[i] * (sol.n_star - 1) / (omega * sol.n_star) - alpha
        else:
            curvature = -alpha
        newton = x - g / curvature
        x = newton if lo < newton < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def best_response_dynamics(
    g: Graph,
    diss: Dissemination,
    params: Params,
    q0=None,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> GameOutcome:
    """Cyclic best-response iteration for the strategic investment game.

    Agents update in fixed ascending order; convergence is measured as the
    largest investment change over a full sweep.  Raises
    NonConvergenceError (carrying the last iterate) past max_iter sweeps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.n != diss.n:
        raise ValueError("graph and dissemination disagree on the number of agents")
    docs = np.asarray(diss.expected_docs, dtype=float)
    reach = diss.reach
    n = g.n
    q = np.full(n, 0.5) if q0 is None else np.asarray(q0, dtype=float).copy()
    if q.shape != (n,):
        raise ValueError(f"q0 must have length {n}")
    delta = np.inf
    for _ in range(max_iter):
        delta = 0.0
        for i in range(n):
            updated = _best_response(i, q, docs, reach, params.alpha, params.omega)
            delta = max(delta, abs(updated - q[i]))
            q[i] = updated
        if delta <= tol:
            return evaluate_outcome(diss, params, q, NASH_STRATEGIC)
    raise NonConvergenceError(
        f"best-response dynamics did not converge in {max_iter} sweeps "
        f"(last sweep moved {delta:.3e})",
        last_q=q,
        residual=delta,
        iterations=max_iter,
    )


def _welfare(q, docs, alpha, omega):
    sol = optimal_attack(q, docs, omega)
    return docs.size - expected_stolen(sol.a, q, docs) - 0.5 * alpha * float(q @ q)


def _welfare_gradient(q, docs, alpha, omega):
    """Gradient of welfare through the attacker's best response.

    On the active set, d welfare / d q_i = docs_i (2 a_i - 1/k) - alpha q_i
    with k active agents; inactive agents only feel their own cost.  Uses
    the active-region sensitivity formula, so it is a supergradient choice
    at active-set boundaries.
    """
    sol = optimal_attack(q, docs, omega)
    grad = -alpha * q
    act = sol.active
    grad[act] += docs[act] * (2.0 * sol.a[act] - 1.0 / sol.n_star)
    return grad, sol


def _directional_curvature(direction, sol, docs, alpha, omega):
    """-d'Hd for the welfare Hessian of the current active-set region.

    Within a region the welfare is an exact quadratic with
    -d'Hd = alpha |d|^2 + (2/omega) sum((w - mean w)^2), w = docs*d on the
    active set, so an exact maximizing line step is available.
    """
    w = docs[sol.active] * direction[sol.active]
    centered = w @ w - w.sum() ** 2 / sol.n_star
    return alpha * float(direction @ direction) + 2.0 / omega * float(centered)


def social_optimum_numeric(
    g: Graph,
    diss: Dissemination,
    params: Params,
    tol: float = 1e-8,
    max_iter: int = 20_000,
    seed: int = 0,
) -> GameOutcome:
    """Welfare maximization over investments by projected gradient ascent.

    Runs from uniform starts {0.1, 0.5, 0.9} plus five seeded random
    starts, taking the exact maximizing line step of the current
    active-set region's quadratic (halved when a step across a region
    kink loses welfare) with box projection onto [0, 1]^n; the
    best-welfare converged run wins.  Convergence is a projected gradient
    norm <= tol at a fixed reference step.  On graphs without a
    homogeneity guarantee the winner is the best stationary point found,
    not a certified global optimum.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.n != diss.n:
        raise ValueError("graph and dissemination disagree on the number of agents")
    docs = np.asarray(diss.expected_docs, dtype=float)
    alpha, omega = params.alpha, params.omega
    n = g.n
    ref_step = 1.0 / (alpha + 2.0 * float(docs.max()) ** 2 / omega)
    rng = np.random.default_rng(seed)
    starts = [np.full(n, c) for c in (0.1, 0.5, 0.9)]
    starts += [rng.random(n) for _ in range(5)]

    best_q, best_welfare = None, -np.inf
    failures = 0
    for q0 in starts:
        q = q0.copy()
        value = _welfare(q, docs, alpha, omega)
        converged = False
        for _ in range(max_iter):
            grad, sol = _welfare_gradient(q, docs, alpha, omega)
            if np.abs(np.clip(q + ref_step * grad, 0.0, 1.0) - q).max() <= tol * ref_step:
                converged = True
                break
            # Ascend along the gradient restricted to coordinates free to move.
            blocked = ((q <= 0.0) & (grad < 0.0)) | ((q >= 1.0) & (grad > 0.0))
            direction = np.where(blocked, 0.0, grad)
            curvature = _directional_curvature(direction, sol, docs, alpha, omega)
            step = float(grad @ direction) / curvature
            # The step is exact for the region's quadratic; backtrack only if
            # crossing an active-set kink actually loses welfare.
            accepted = False
            while step > 1e-16:
                trial = np.clip(q + step * direction, 0.0, 1.0)
                trial_value = _welfare(trial, docs, alpha, omega)
                if trial_value >= value - 1e-12:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break  # wedged against a kink at machine precision
            q, value = trial, trial_value
        if converged:
            if value > best_welfare:
                best_q, best_welfare = q, value
        else:
            failures += 1
    if best_q is None:
        raise NonConvergenceError(
            f"no projected-gradient start converged within {max_iter} iterations "
            f"({failures} starts attempted)",
            iterations=max_iter,
        )
    return evaluate_outcome(diss, params, best_q, OPT_STRATEGIC)


# ---------------------------------------------------------------------------
# Over- vs under-investment crossover
# ---------------------------------------------------------------------------

def unique_crossover_condition(docs_value: float, n: int, alpha: float) -> bool:
    """Sufficient condition for a single over-to-under-investment crossover.

    Literal evaluation of 2 (n - d) d >= (n - 2 d)(alpha n - 1); always
    true once d >= n/2 since the right side is then non-positive.
    """
    d = float(docs_value)
    if not 1.0 - 1e-9 <= d <= n + 1e-9:
        raise ValueError(f"docs must lie in [1, n], got {d}")
    return 2.0 * (n - d) * d >= (n - 2.0 * d) * (alpha * n - 1.0)


def _vt_docs(topology: str, n: int, p: float) -> float:
    if topology == RING:
        return ring_docs(n, p)
    if topology == COMPLETE:
        return complete_docs(n, p)
    raise ValueError(
        f"closed-form crossover needs a ring or complete topology, got {topology!r}"
    )


def investment_gap(topology: str, n: int, p: float, alpha: float, omega: float) -> float:
    """Equilibrium minus optimal investment at p (positive = over-investment)."""
    d = _vt_docs(topology, n, p)
    return float(nash_strategic_vt(d, n, alpha, omega)[0]) - d / (alpha * n)


def find_crossover_p(
    topology: str,
    n: int,
    alpha: float,
    omega: float,
    tol: float = 1e-10,
    details: bool = False,
):
    """Transmission probability where equilibrium investments are optimal.

    Bisects the gap between strategic equilibrium and strategic optimum on
    (0, 1), after checking it is positive near 0 and negative near 1.
    With details=True also returns every sign change found on a fine grid
    and the interval where the unique-crossover condition holds.
    """
    if alpha < 1.0 or omega < 1.0:
        raise ValueError("alpha and omega must be >= 1")
    eps = 1e-9

    def gap(p):
        return investment_gap(topology, n, p, alpha, omega)

    if not (gap(eps) > 0.0 > gap(1.0 - eps)):
        raise ValueError(
            "no over-to-under-investment sign change on (0, 1); "
            f"gap({eps})={gap(eps):.3e}, gap(1-{eps})={gap(1.0 - eps):.3e}"
        )

    def bisect(lo, hi, f_lo):
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            f_mid = gap(mid)
            if f_mid == 0.0:
                return mid
            if (f_mid > 0.0) == (f_lo > 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    p_star = bisect(eps, 1.0 - eps, gap(eps))
    if not details:
        return p_star

    grid = np.linspace(eps, 1.0 - eps, 1001)
    values = np.array([gap(p) for p in grid])
    crossings = []
    for idx in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        crossings.append(bisect(grid[idx], grid[idx + 1], values[idx]))
    holds = np.array(
        [unique_crossover_condition(_vt_docs(topology, n, p), n, alpha) for p in grid]
    )
    interval = None
    if holds.any():
        interval = (float(grid[holds][0]), float(grid[holds][-1]))
    return p_star, {
        "sign_changes": crossings,
        "condition_interval": interval,
        "condition_everywhere": bool(holds.all()),
    }


# ---------------------------------------------------------------------------
# Star-graph strategies (uniform-attack vs sacrificial lamb)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarUniformStrategy:
    """Investments that equalize attack probabilities on a star."""

    q_center: float
    q_leaf: float
    welfare: float
    clamped: bool


@dataclass(frozen=True)
class StarLambStrategy:
    """Minimal investments that steer the whole attack onto one bare leaf."""

    feasible: bool
    welfare_bound: float
    q_center_min: float
    q_leaf_min: float


def star_uniform_attack_strategy(n: int, p: float, alpha: float) -> StarUniformStrategy:
    """Best investments among those making the attack uniform on a star.

    The a = 1/n attack requires (1-q_center) docs_center =
    (1-q_leaf) docs_leaf; optimizing welfare along that line gives the
    leaf level in closed form and the center level follows.  Values are
    clamped to [0, 1] (flagged) if the formula exits the box; welfare is
    evaluated at the uniform attack either way.
    """
    if n < 3:
        raise ValueError(f"needs n >= 3, got {n}")
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    hub, leaf = star_docs(n, p)
    ratio = leaf / hub
    q_leaf = (leaf / alpha - ratio + ratio**2) / (ratio**2 + n - 1)
    clamped = not 0.0 <= q_leaf <= 1.0
    q_leaf = min(1.0, max(0.0, q_leaf))
    q_center = 1.0 - (1.0 - q_leaf) * ratio
    stolen = ((1.0 - q_center) * hub + (n - 1) * (1.0 - q_leaf) * leaf) / n
    welfare = n - stolen - 0.5 * alpha * (q_center**2 + (n - 1) * q_leaf**2)
    return StarUniformStrategy(q_center, q_leaf, welfare, clamped)


def star_sacrificial_lamb(n: int, p: float, alpha: float, omega: float) -> StarLambStrategy:
    """Welfare bound for leaving one leaf unprotected to absorb the attack.

    The attack concentrates on the bare leaf as long as q_leaf >=
    omega / docs_leaf and q_center >= (omega + docs_center - docs_leaf) /
    docs_center; both fit in [0, 1] exactly when omega <= docs_leaf.  The
    bound evaluates welfare at those minimal levels.
    """
    if n < 3:
        raise ValueError(f"needs n >= 3, got {n}")
    if alpha < 1.0 or omega < 1.0:
        raise ValueError("alpha and omega must be >= 1")
    hub, leaf = star_docs(n, p)
    q_leaf_min = omega / leaf
    q_center_min = (omega + hub - leaf) / hub
    feasible = q_leaf_min <= 1.0 and q_center_min <= 1.0
    bound = n - leaf - 0.5 * alpha * (
        (1.0 - leaf / hub + omega / hub) ** 2 + (n - 2) * omega**2 / leaf**2
    )
    return StarLambStrategy(feasible, bound, q_center_min, q_leaf_min)
