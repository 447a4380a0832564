"""Document-spread probabilities on a network.

Each agent's document spreads over an independent random subgraph in which
every edge survives with probability p.  The reach matrix holds, for each
ordered pair (i, j), the probability that j ends up holding i's document;
the expected-documents vector is its column sum.  Three routes compute the
same quantities: exact enumeration over edge subsets (the ground-truth
oracle), per-topology closed forms, and Monte Carlo.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import COMPLETE, CUSTOM, RING, STAR, TOPOLOGIES, Graph

METHOD_EXACT = "exact"
METHOD_CLOSED = "closed"
METHOD_MC = "mc"

# 2**edges subsets are enumerated; beyond this the walk is unreasonably slow.
MAX_EXACT_EDGES = 22

# Exact integer binomials below this; log-gamma above to avoid float overflow.
_EXACT_BINOM_MAX = 30

_CLAMP_WARN_TOL = 1e-9
_MC_CHUNK = 50_000


@dataclass(frozen=True)
class Params:
    """Game parameters: transmission probability and cost coefficients.

    alpha scales the defenders' quadratic cost, omega the attacker's; both
    must be >= 1, which the equilibrium boundary arguments rely on.
    """

    p: float
    alpha: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"transmission probability must be in [0, 1], got {self.p}")
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if self.omega < 1.0:
            raise ValueError(f"omega must be >= 1, got {self.omega}")


@dataclass(frozen=True)
class Dissemination:
    """Reach probabilities and expected document counts.

    reach[i, j] is the probability that agent j holds agent i's document
    after it spreads; the diagonal is 1 (an agent always holds its own).
    expected_docs[i] sums column i of reach.  std_err is populated by the
    Monte Carlo route only.
    """

    reach: np.ndarray
    expected_docs: np.ndarray
    method: str
    std_err: np.ndarray | None = None

    def __post_init__(self):
        for name in ("reach", "expected_docs", "std_err"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.reach.shape[0]


def expected_documents(diss: Dissemination) -> np.ndarray:
    """Per-agent expected document count: column sums of the reach matrix."""
    return diss.reach.sum(axis=0)


# ---------------------------------------------------------------------------
# Exact enumeration over edge subsets
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _subset_counts(edges: tuple[tuple[int, int], ...], n: int):
    """Connectivity counts over all 2**m edge subsets, binned by subset size.

    Returns (pair_counts, all_counts) where pair_counts[i, j, k] is the
    number of k-edge subsets in which i and j are connected and
    all_counts[k] the number in which the whole vertex set is.  These
    counts are independent of p, so one walk serves every p value.
    """
    m = len(edges)
    pair_counts = np.zeros((n, n, m + 1))
    all_counts = np.zeros(m + 1)
    eu = [e[0] for e in edges]
    ev = [e[1] for e in edges]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << m):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        mm = mask
        while mm:
            e = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            ru, rv = find(eu[e]), find(ev[e])
            if ru != rv:
                parent[rv] = ru
        roots = [find(v) for v in range(n)]
        k = mask.bit_count()
        for i, j in pairs:
            if roots[i] == roots[j]:
                pair_counts[i, j, k] += 1.0
        if roots.count(roots[0]) == n:
            all_counts[k] += 1.0
    pair_counts += np.transpose(pair_counts, (1, 0, 2))
    pair_counts.flags.writeable = False
    all_counts.flags.writeable = False
    return pair_counts, all_counts


def _subset_weights(m: int, p: float) -> np.ndarray:
    ks = np.arange(m + 1)
    return p**ks * (1.0 - p) ** (m - ks)


def reach_exact(g: Graph, p: float) -> Dissemination:
    """Exact reach matrix by enumerating all 2**m edge subsets.

    Each subset of size k carries weight p**k (1-p)**(m-k); an ordered
    pair accumulates the weight of every subset connecting it.  This is
    the ground-truth oracle the other methods are checked against.
    """
    _check_p(p)
    m = g.edge_count
    if m > MAX_EXACT_EDGES:
        raise ValueError(
            f"exact enumeration supports at most {MAX_EXACT_EDGES} edges, "
            f"got {m}; use the closed form or Monte Carlo"
        )
    pair_counts, _ = _subset_counts(g.edges, g.n)
    reach = pair_counts @ _subset_weights(m, p)
    np.fill_diagonal(reach, 1.0)
    return Dissemination(reach, reach.sum(axis=0), METHOD_EXACT)


def connected_probability_exact(g: Graph, p: float) -> float:
    """Probability the whole Bernoulli-thinned graph stays connected (exact)."""
    _check_p(p)
    m = g.edge_count
    if m > MAX_EXACT_EDGES:
        raise ValueError(f"exact enumeration supports at most {MAX_EXACT_EDGES} edges")
    _, all_counts = _subset_counts(g.edges, g.n)
    return float(all_counts @ _subset_weights(m, p))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _lchoose(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _binom_term(a: int, b: int, base: float, exp: int) -> float:
    """C(a, b) * base**exp without overflow for large a."""
    if a <= _EXACT_BINOM_MAX:
        return math.comb(a, b) * base**exp
    if base == 0.0:
        return 0.0 if exp > 0 else math.exp(_lchoose(a, b))
    return math.exp(_lchoose(a, b) + exp * math.log(base))


def _clamp_probability(value: float, context: str) -> float:
    if value < -_CLAMP_WARN_TOL or value > 1.0 + _CLAMP_WARN_TOL:
        warnings.warn(
            f"{context} produced {value!r}, outside [0, 1] beyond tolerance; clamping",
            RuntimeWarning,
            stacklevel=3,
        )
    return min(1.0, max(0.0, value))


def _all_reach_table(k: int, p: float) -> list[float]:
    """Q[1..k]: probability one document reaches all of a complete graph."""
    q = [0.0] * (k + 1)
    q[1] = 1.0
    if k >= 2:
        q[2] = p  # single edge must survive
    one_minus = 1.0 - p
    for s in range(3, k + 1):
        stranded = sum(
            _binom_term(s - 1, ell - 1, one_minus, ell * (s - ell)) * q[ell]
            for ell in range(1, s)
        )
        q[s] = _clamp_probability(1.0 - stranded, f"all-reach recursion at k={s}")
    return q


def complete_connected_probability(k: int, p: float) -> float:
    """Probability a document reaches every agent of a complete graph on k nodes.

    Computed by recursion on the size of the component stranded around the
    source; equals the probability that the Bernoulli-thinned K_k stays
    connected.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_p(p)
    return _all_reach_table(k, p)[k]


def complete_pair_reach(n: int, p: float) -> float:
    """Reach probability between two distinct agents of a complete graph."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    _check_p(p)
    if n == 2:
        return p
    if n == 3:
        return p + p**2 - p**3
    q = _all_reach_table(n, p)
    one_minus = 1.0 - p
    total = sum(
        _binom_term(n - 2, k - 2, one_minus, k * (n - k)) * q[k]
        for k in range(2, n + 1)
    )
    return _clamp_probability(total, f"complete-graph pair reach at n={n}")


def complete_pair_bounds(n: int, p: float) -> tuple[float, float]:
    """(lower, upper) envelope for the complete-graph pair reach probability.

    The lower bound keeps only length-<=2 paths; the upper bound only asks
    that some edge reaches the destination.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    _check_p(p)
    lower = 1.0 - (1.0 - p) * (1.0 - p**2) ** (n - 2)
    upper = 1.0 - (1.0 - p) ** (n - 1)
    return lower, upper


def ring_pair_reach(n: int, p: float, dist: int) -> float:
    """Reach probability on a ring between agents at the given distance."""
    if dist == 0:
        return 1.0
    return p**dist + p ** (n - dist) - p**n


def ring_docs(n: int, p: float) -> float:
    """Expected documents per agent on a ring, in polynomial form.

    The rational form has a removable singularity at p=1; the polynomial
    1 + 2*sum(p**l) - (n-1)*p**n does not.
    """
    return 1.0 + 2.0 * sum(p**ell for ell in range(1, n)) - (n - 1) * p**n


def star_docs(n: int, p: float) -> tuple[float, float]:
    """(hub, leaf) expected documents on a star."""
    return 1.0 + (n - 1) * p, 1.0 + p + (n - 2) * p**2


def complete_docs(n: int, p: float) -> float:
    """Expected documents per agent on a complete graph."""
    return 1.0 + (n - 1) * complete_pair_reach(n, p)


def topology_docs(topology: str, n: int, p: float) -> np.ndarray:
    """Per-agent expected documents for a named topology family."""
    _check_p(p)
    if topology == RING:
        if n < 3:
            raise ValueError("ring needs n >= 3")
        return np.full(n, ring_docs(n, p))
    if topology == STAR:
        hub, leaf = star_docs(n, p)
        docs = np.full(n, leaf)
        docs[0] = hub
        return docs
    if topology == COMPLETE:
        return np.full(n, complete_docs(n, p))
    raise ValueError(f"no closed form for topology {topology!r}")


def reach_closed_form(g: Graph, p: float) -> Dissemination:
    """Closed-form reach matrix for ring, star, and complete topologies."""
    _check_p(p)
    n = g.n
    if g.topology == STAR:
        reach = np.full((n, n), p**2)
        reach[0, :] = reach[:, 0] = p
    elif g.topology == RING:
        reach = np.empty((n, n))
        for d in range(1, n // 2 + 1):
            val = ring_pair_reach(n, p, d)
            for i in range(n):
                reach[i, (i + d) % n] = reach[(i + d) % n, i] = val
    elif g.topology == COMPLETE:
        reach = np.full((n, n), complete_pair_reach(n, p))
    else:
        raise ValueError(
            f"no closed form for topology {g.topology!r}; "
            "use exact enumeration or Monte Carlo"
        )
    np.fill_diagonal(reach, 1.0)
    return Dissemination(reach, reach.sum(axis=0), METHOD_CLOSED)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def _component_labels(present: np.ndarray, edges, n: int) -> np.ndarray:
    """Per-sample component labels by min-label propagation along edges."""
    labels = np.broadcast_to(np.arange(n, dtype=np.int32), present.shape[:1] + (n,)).copy()
    changed = True
    while changed:
        changed = False
        for e, (u, v) in enumerate(edges):
            on = present[:, e]
            lu, lv = labels[:, u], labels[:, v]
            low = np.minimum(lu, lv)
            upd = on & (lu > low)
            if upd.any():
                labels[upd, u] = low[upd]
                changed = True
            upd = on & (lv > low)
            if upd.any():
                labels[upd, v] = low[upd]
                changed = True
    return labels


def reach_monte_carlo(
    g: Graph, p: float, samples: int, seed: int = 0
) -> Dissemination:
    """Monte Carlo reach estimate from `samples` spreads per source agent.

    Every source uses its own RNG stream derived from (seed, source), so
    estimates are reproducible and independent of any batching.  The
    estimate is symmetrized by pair averaging (the true matrix is
    symmetric, so this halves variance without bias) and std_err holds the
    binomial standard error of each averaged entry.
    """
    _check_p(p)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    n, edges = g.n, g.edges
    m = len(edges)
    counts = np.zeros((n, n))
    for src in range(n):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed & (2**64 - 1), spawn_key=(src,))
        )
        done = 0
        while done < samples:
            c = min(_MC_CHUNK, samples - done)
            present = rng.random((c, m)) < p
            labels = _component_labels(present, edges, n)
            counts[src] += (labels == labels[:, src : src + 1]).sum(axis=0)
            done += c
    raw = counts / samples
    reach = 0.5 * (raw + raw.T)
    np.fill_diagonal(reach, 1.0)
    std_err = np.sqrt(reach * (1.0 - reach) / (2.0 * samples))
    np.fill_diagonal(std_err, 0.0)
    return Dissemination(reach, reach.sum(axis=0), METHOD_MC, std_err=std_err)


def disseminate(
    g: Graph,
    p: float,
    method: str = METHOD_EXACT,
    samples: int = 100_000,
    seed: int = 0,
) -> Dissemination:
    """Dispatch to one of the three computation routes by name."""
    if method == METHOD_EXACT:
        return reach_exact(g, p)
    if method == METHOD_CLOSED:
        return reach_closed_form(g, p)
    if method == METHOD_MC:
        return reach_monte_carlo(g, p, samples, seed)
    raise ValueError(f"unknown method {method!r}; expected exact, closed, or mc")


# ---------------------------------------------------------------------------
# Coverage threshold
# ---------------------------------------------------------------------------

def _mean_docs(topology: str, n: int, p: float) -> float:
    return float(topology_docs(topology, n, p).mean())


def p_for_half_coverage(g: Graph, tolerance: float = 1e-9) -> float:
    """Transmission probability at which mean expected documents hit n/2.

    Uses bisection on the closed-form mean, which is strictly increasing
    in p.  On the (non-homogeneous) star this targets the mean over
    agents; per-class thresholds differ and are not what this reports.
    """
    if g.topology not in TOPOLOGIES:
        raise ValueError(f"closed-form topologies only, got {g.topology!r}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = g.n
    target = n / 2.0
    if _mean_docs(g.topology, n, 1.0) < target:
        raise AssertionError("unreachable: mean docs at p=1 equals n >= n/2")
    if _mean_docs(g.topology, n, 0.0) >= target - tolerance:
        return 0.0  # n=2 boundary: one document is already half of n
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = _mean_docs(g.topology, n, mid)
        if abs(val - target) <= tolerance:
            return mid
        if val < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"transmission probability must be in [0, 1], got {p}")
