"""Entropy maximisation over supports and the marginal-entropy minimax.

The central program maximises the theta-weighted sum of marginal Shannon
entropies over all probability distributions on a support set.  It is
concave, and the solver (exponentiated-gradient ascent on the simplex)
certifies its optimum through a first-order duality gap: for concave F,
F(P*) <= F(P) + max_j grad_j - grad . P over the simplex.

`max_min_entropy` solves max_P min_i H(P_i), equal by minimax duality to
min_theta max_P H_theta(P); the dual side runs a cutting-plane loop over the
theta simplex and the primal side polishes with an SLSQP solve, so the pair
comes with an explicit duality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .supports import SupportSet, is_diagonal

LN2 = math.log(2.0)

#: default certificate tolerance (bits) for the inner concave program
INNER_TOL = 1e-9

#: duality gap tolerance (bits) for the minimax program
MINIMAX_TOL = 1e-6


def shannon_entropy(p) -> float:
    """Entropy in bits; 0 log 0 = 0."""
    arr = np.asarray(p, dtype=float)
    if arr.size and (arr.min() < -1e-12 or abs(arr.sum() - 1.0) > 1e-9):
        raise ValueError("not a probability vector")
    pos = arr[arr > 0]
    return float(-(pos * np.log2(pos)).sum())


def binary_entropy(x: float) -> float:
    if x < -1e-12 or x > 1 + 1e-12:
        raise ValueError("argument outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


def kl_divergence(p, q) -> float:
    """Relative entropy D(p || q) in bits; requires supp p inside supp q."""
    parr = np.asarray(p, dtype=float)
    qarr = np.asarray(q, dtype=float)
    if parr.shape != qarr.shape:
        raise ValueError("shape mismatch")
    mask = parr > 0
    if np.any(qarr[mask] <= 0):
        raise ValueError("kl divergence undefined: q vanishes where p does not")
    return float((parr[mask] * (np.log2(parr[mask]) - np.log2(qarr[mask]))).sum())


# ---------------------------------------------------------------------------
# theta weights


@dataclass(frozen=True)
class ThetaWeights:
    """Probability weights over the k legs or over bipartitions of the legs.

    Bipartition keys are canonical frozensets containing leg 0.
    """

    mode: str                               # "legs" or "bipartitions"
    items: tuple[tuple[object, float], ...]

    def __post_init__(self):
        if self.mode not in ("legs", "bipartitions"):
            raise ValueError(f"unknown theta mode {self.mode!r}")
        total = 0.0
        for key, w in self.items:
            if w < -1e-12:
                raise ValueError("negative theta weight")
            total += w
            if self.mode == "legs" and not isinstance(key, int):
                raise ValueError("leg keys must be integers")
            if self.mode == "bipartitions":
                if not isinstance(key, frozenset) or 0 not in key:
                    raise ValueError("bipartition keys are frozensets containing leg 0")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"theta weights sum to {total}, expected 1")

    @classmethod
    def uniform(cls, k: int) -> "ThetaWeights":
        return cls("legs", tuple((i, 1.0 / k) for i in range(k)))

    @classmethod
    def from_legs(cls, weights) -> "ThetaWeights":
        ws = [float(w) for w in weights]
        return cls("legs", tuple((i, w) for i, w in enumerate(ws)))

    @classmethod
    def from_bipartitions(cls, mapping: dict, k: int) -> "ThetaWeights":
        items = []
        for side, w in mapping.items():
            side = frozenset(int(x) for x in side)
            if not side or len(side) >= k:
                raise ValueError("bipartition side must be proper and nonempty")
            if 0 not in side:
                side = frozenset(range(k)) - side
            items.append((side, float(w)))
        items.sort(key=lambda kv: sorted(kv[0]))
        return cls("bipartitions", tuple(items))

    @property
    def k_hint(self) -> int | None:
        if self.mode == "legs":
            return len(self.items)
        return None

    def leg_array(self, k: int) -> np.ndarray:
        if self.mode != "legs":
            raise ValueError("theta is not in legs mode")
        arr = np.zeros(k)
        for leg, w in self.items:
            if leg < 0 or leg >= k:
                raise ValueError(f"leg {leg} out of range for k={k}")
            arr[leg] += w
        return arr

    def bipartition_sides(self, k: int) -> tuple[tuple[frozenset, float], ...]:
        """View as bipartition weights; legs mode maps leg j to the side {j}
        (marginal entropies are side-symmetric for pure states)."""
        if self.mode == "bipartitions":
            return self.items
        return tuple((frozenset({leg}), w) for leg, w in self.items)

    def support(self) -> tuple:
        return tuple(key for key, w in self.items if w > 0)

    def is_noncrossing(self, k: int) -> bool:
        """No pair of weighted bipartitions crosses."""
        sides = [set(key) if isinstance(key, frozenset) else {key}
                 for key, w in self.items if w > 0]
        full = set(range(k))
        for s1, s2 in combinations(sides, 2):
            for a in (s1, full - s1):
                for b in (s2, full - s2):
                    if a <= b or b <= a or not (a & b):
                        break
                else:
                    continue
                break
            else:
                return False
        return True


def permute_theta(theta: ThetaWeights, perm) -> ThetaWeights:
    if theta.mode != "legs":
        raise ValueError("only legs mode can be permuted here")
    arr = [w for _, w in sorted(theta.items)]
    k = len(arr)
    out = [0.0] * k
    for new, old in enumerate(perm):
        out[new] = arr[old]
    return ThetaWeights.from_legs(out)


# ---------------------------------------------------------------------------
# distributions on a support


def marginal_vectors(support: SupportSet, probs: np.ndarray) -> list[np.ndarray]:
    out = []
    for i in range(support.k):
        v = np.zeros(support.bounds[i])
        for p, w in zip(support.points, probs):
            v[p[i]] += w
        out.append(v)
    return out


@dataclass(frozen=True)
class Distribution:
    """Probability distribution on the points of a support set."""

    support: SupportSet
    probs: np.ndarray
    marginals: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (len(self.support),):
            raise ValueError("probability vector length must match the support")
        if probs.min() < -1e-12 or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        margs = tuple(marginal_vectors(self.support, probs))
        for m in margs:
            m.setflags(write=False)
        object.__setattr__(self, "marginals", margs)

    def marginal_entropies(self) -> np.ndarray:
        return np.array([shannon_entropy(m) for m in self.marginals])

    def h_theta(self, theta: ThetaWeights) -> float:
        w = theta.leg_array(self.support.k)
        return float(w @ self.marginal_entropies())


# ---------------------------------------------------------------------------
# the concave program: maximise H_theta over distributions on a support


@dataclass(frozen=True)
class HThetaResult:
    value: float                 # bits
    distribution: Distribution
    gap: float                   # certified suboptimality bound, bits
    kkt_residual: float          # spread of the active-gradient components
    iterations: int
    exact_power: int | None = None   # 2**value as an exact integer, when known


def _solver_arrays(support: SupportSet, theta_arr: np.ndarray):
    m = len(support)
    idx = []
    used = []
    for i in range(support.k):
        vals = support.values(i)
        lookup = {v: j for j, v in enumerate(vals)}
        idx.append(np.array([lookup[p[i]] for p in support.points]))
        used.append(vals)
    return m, idx, used


def max_H_theta(support: SupportSet, theta: ThetaWeights,
                tol: float = INNER_TOL, max_iter: int = 20000) -> HThetaResult:
    """Maximise the theta-weighted marginal entropy over P(support).

    Exponentiated-gradient ascent with a first-order optimality certificate;
    the reported gap bounds the distance to the true optimum.  Supports that
    form a diagonal are solved exactly.
    """
    if len(support) == 0:
        raise ValueError("empty support")
    k = support.k
    theta_arr = theta.leg_array(k)
    if len(support) == 1:
        dist = Distribution(support, np.array([1.0]))
        return HThetaResult(0.0, dist, 0.0, 0.0, 0, exact_power=1)
    if is_diagonal(support):
        m = len(support)
        dist = Distribution(support, np.full(m, 1.0 / m))
        return HThetaResult(math.log2(m), dist, 0.0, 0.0, 0, exact_power=m)

    m, idx, _ = _solver_arrays(support, theta_arr)
    active = [i for i in range(k) if theta_arr[i] > 0]
    counts = [np.max(idx[i]) + 1 for i in range(k)]

    def evaluate(p):
        f = 0.0
        grad = np.zeros(m)
        for i in active:
            marg = np.bincount(idx[i], weights=p, minlength=counts[i])
            marg = np.maximum(marg, 1e-300)
            f += theta_arr[i] * float(-(marg * np.log2(marg)).sum())
            grad -= theta_arr[i] * np.log2(marg[idx[i]])
        return f, grad

    logp = np.full(m, -math.log(m))
    eta = 0.5
    prev_f = -np.inf
    gap = np.inf
    kkt = np.inf
    it = 0
    polish_at = {600, 2000, 6000, 14000, max_iter}
    p = np.full(m, 1.0 / m)
    for it in range(1, max_iter + 1):
        logp -= logp.max()
        p = np.exp(logp)
        p /= p.sum()
        f, grad = evaluate(p)
        gap = float(grad.max() - grad @ p)
        if gap <= tol:
            break
        if it in polish_at:
            p2 = _face_polish(p, evaluate, tol)
            if p2 is not None:
                f2, grad2 = evaluate(p2)
                gap2 = float(grad2.max() - grad2 @ p2)
                if f2 >= f and gap2 < gap:
                    p, f, grad, gap = p2, f2, grad2, gap2
                    logp = np.log(np.maximum(p, 1e-300))
                    if gap <= tol:
                        break
        if f < prev_f - 1e-13:
            eta = max(eta * 0.5, 1e-3)
        else:
            eta = min(eta * 1.05, 64.0)   # boundary mass decays at rate eta
        prev_f = f
        logp = logp + eta * grad
    _, grad = evaluate(p)
    mask = p > 1e-10
    kkt = float(grad[mask].max() - grad[mask].min()) if mask.any() else 0.0
    dist = Distribution(support, p)
    value = float(sum(theta_arr[i] * shannon_entropy(dist.marginals[i]) for i in active))
    return HThetaResult(value, dist, gap, kkt, it)


def _face_polish(p: np.ndarray, evaluate, tol: float) -> np.ndarray | None:
    """Refine a near-optimal point with a short projected-ascent run on the
    face of currently active coordinates."""
    import warnings

    from scipy.optimize import minimize

    warnings.filterwarnings("ignore", message="Values in x were outside bounds",
                            category=RuntimeWarning)
    m = p.size
    act = p > 1e-12
    if not act.any():
        return None

    def negf(x):
        q = np.zeros(m)
        q[act] = np.maximum(x, 1e-300)
        q /= q.sum()
        f, grad = evaluate(q)
        # gradient of -f(q(x)) through the normalisation
        g = -(grad - grad @ q) / x.sum()
        return -f, g[act]

    x0 = p[act] / p[act].sum()
    res = minimize(negf, x0, jac=True, method="SLSQP",
                   bounds=[(1e-15, 1.0)] * int(act.sum()),
                   constraints=[{"type": "eq", "fun": lambda x: x.sum() - 1.0,
                                 "jac": lambda x: np.ones_like(x)}],
                   options={"maxiter": 200, "ftol": 1e-16})
    q = np.zeros(m)
    q[act] = np.maximum(res.x, 0.0)
    total = q.sum()
    if total <= 0:
        return None
    return q / total


def h_theta_of_support(support: SupportSet, theta: ThetaWeights, **kw) -> float:
    return max_H_theta(support, theta, **kw).value


# ---------------------------------------------------------------------------
# minimax: max_P min_i H(P_i) == min_theta max_P H_theta(P)


@dataclass(frozen=True)
class MinimaxEntropyResult:
    value: float                     # primal value, bits
    dual_value: float                # best evaluated dual bound, bits
    gap: float
    distribution: Distribution
    theta: ThetaWeights
    exact_power: int | None = None


def _slsqp_polish(support: SupportSet, start: np.ndarray) -> np.ndarray:
    from scipy.optimize import minimize

    k = support.k
    m = len(support)
    _, idx, _ = _solver_arrays(support, np.ones(k))
    counts = [np.max(ix) + 1 for ix in idx]

    def margs(p):
        return [np.maximum(np.bincount(idx[i], weights=p, minlength=counts[i]), 1e-15)
                for i in range(k)]

    def neg_t(x):
        return -x[-1]

    def neg_t_grad(x):
        g = np.zeros(m + 1)
        g[-1] = -1.0
        return g

    cons = [{"type": "eq",
             "fun": lambda x: np.array([x[:m].sum() - 1.0]),
             "jac": lambda x: np.concatenate([np.ones(m), [0.0]])[None, :]}]

    def make_con(i):
        def fun(x):
            mg = np.maximum(np.bincount(idx[i], weights=np.abs(x[:m]),
                                        minlength=counts[i]), 1e-15)
            h = float(-(mg * np.log2(mg)).sum())
            return np.array([h - x[-1]])

        def jac(x):
            mg = np.maximum(np.bincount(idx[i], weights=np.abs(x[:m]),
                                        minlength=counts[i]), 1e-15)
            g = np.zeros(m + 1)
            g[:m] = -(np.log2(mg[idx[i]]) + 1.0 / LN2)
            g[-1] = -1.0
            return g[None, :]

        return {"type": "ineq", "fun": fun, "jac": jac}

    for i in range(k):
        cons.append(make_con(i))
    p0 = np.maximum(start, 1e-9)
    p0 = p0 / p0.sum()
    t0 = min(shannon_entropy(mg / mg.sum()) for mg in margs(p0))
    x0 = np.concatenate([p0, [t0]])
    res = minimize(neg_t, x0, jac=neg_t_grad, method="SLSQP",
                   bounds=[(0.0, 1.0)] * m + [(0.0, None)], constraints=cons,
                   options={"maxiter": 400, "ftol": 1e-14})
    p = np.abs(res.x[:m])
    total = p.sum()
    return p / total if total > 0 else np.full(m, 1.0 / m)


def max_min_entropy(support: SupportSet, tol: float = MINIMAX_TOL,
                    inner_tol: float = 1e-10, max_rounds: int = 80
                    ) -> MinimaxEntropyResult:
    """Saddle value of the marginal-entropy game on a support.

    Dual side: cutting planes on g(theta) = max_P H_theta(P) over the theta
    simplex (each evaluated maximiser yields the valid cut g >= theta . h).
    Primal side: SLSQP on max t s.t. H(P_i) >= t.  The returned pair carries
    the explicit duality gap.
    """
    from scipy.optimize import linprog

    if len(support) == 0:
        raise ValueError("empty support")
    k = support.k
    if is_diagonal(support):
        m = len(support)
        dist = Distribution(support, np.full(m, 1.0 / m))
        theta = ThetaWeights.uniform(k)
        return MinimaxEntropyResult(math.log2(m), math.log2(m), 0.0, dist, theta,
                                    exact_power=m)

    cuts = []          # rows of marginal entropy vectors
    evals = []         # (dual value, theta, distribution)
    theta_vec = np.full(k, 1.0 / k)
    lower = -np.inf
    for _ in range(max_rounds):
        res = max_H_theta(support, ThetaWeights.from_legs(theta_vec), tol=inner_tol)
        hvec = res.distribution.marginal_entropies()
        evals.append((res.value, theta_vec.copy(), res.distribution))
        cuts.append(hvec)
        upper = min(e[0] for e in evals)
        # LP: minimise z subject to theta . h_s <= z over the simplex, with
        # a tiny L1 pull toward the uniform theta to break ties
        ncuts = len(cuts)
        nvar = k + 1 + k            # theta, z, slack |theta - uniform|
        a_ub = np.zeros((ncuts + 2 * k, nvar))
        b_ub = np.zeros(ncuts + 2 * k)
        a_ub[:ncuts, :k] = np.array(cuts)
        a_ub[:ncuts, k] = -1.0
        for i in range(k):
            a_ub[ncuts + 2 * i, i] = 1.0
            a_ub[ncuts + 2 * i, k + 1 + i] = -1.0
            b_ub[ncuts + 2 * i] = 1.0 / k
            a_ub[ncuts + 2 * i + 1, i] = -1.0
            a_ub[ncuts + 2 * i + 1, k + 1 + i] = -1.0
            b_ub[ncuts + 2 * i + 1] = -1.0 / k
        c = np.zeros(nvar)
        c[k] = 1.0
        c[k + 1:] = 1e-12
        a_eq = np.zeros((1, nvar))
        a_eq[0, :k] = 1.0
        lp = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.array([1.0]),
                     bounds=[(0.0, 1.0)] * k + [(None, None)] + [(0.0, 1.0)] * k,
                     method="highs")
        if not lp.success:
            break
        # the tie-break penalty can lift z above the pure cut bound by at
        # most its total weight
        lower = float(lp.x[k]) - 1e-12 * k
        new_theta = np.maximum(lp.x[:k], 0.0)
        new_theta /= new_theta.sum()
        if upper - lower <= min(tol, 1e-8) * 0.5:
            theta_vec = new_theta
            break
        if np.linalg.norm(new_theta - theta_vec) < 1e-14:
            break
        theta_vec = new_theta

    dual_value, dual_theta, dual_dist = min(evals, key=lambda e: e[0])

    # primal polish from the best candidates
    best_p = None
    best_v = -np.inf
    seeds = [dual_dist.probs, np.full(len(support), 1.0 / len(support))]
    active = sorted(evals, key=lambda e: e[0])[:3]
    if len(active) > 1:
        seeds.append(np.mean([e[2].probs for e in active], axis=0))
    for seed in seeds:
        p = _slsqp_polish(support, np.asarray(seed))
        v = min(shannon_entropy(m) for m in
                (mv / mv.sum() for mv in marginal_vectors(support, p)))
        if v > best_v:
            best_v, best_p = v, p
    dist = Distribution(support, best_p)
    value = float(min(shannon_entropy(np.asarray(m)) for m in dist.marginals))
    gap = dual_value - value
    theta = ThetaWeights.from_legs(np.maximum(dual_theta, 0.0) / np.maximum(dual_theta, 0.0).sum())
    return MinimaxEntropyResult(value, dual_value, gap, dist, theta)


def entropy_trick_check(x: float, y: float) -> float:
    """Numerically maximise 2^(p x + (1-p) y + h(p)) over p in [0, 1]."""
    if x < 0 or y < 0:
        raise ValueError("arguments must be nonnegative")

    def val(p):
        return 2.0 ** (p * x + (1 - p) * y + binary_entropy(p))

    grid = np.linspace(0.0, 1.0, 4097)
    vals = [val(p) for p in grid]
    j = int(np.argmax(vals))
    lo = grid[max(j - 1, 0)]
    hi = grid[min(j + 1, len(grid) - 1)]
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    for _ in range(200):
        if val(c) < val(d):
            a = c
        else:
            b = d
        c, d = b - phi * (b - a), a + phi * (b - a)
        if b - a < 1e-14:
            break
    best = max(val(a), val(b), val((a + b) / 2), vals[j])
    return float(best)
