"""Headline pipelines: the z(n) root equation, asymptotic subrank of tight
3-supports, the cap-set bound, degeneration lower bounds, exact combinatorial
slice rank, and asymptotic slice rank via a theta minimisation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .entropy import MinimaxEntropyResult, ThetaWeights, max_min_entropy
from .errors import BudgetExceededError
from .quantum import AscentOptions, lower_quantum_functional, state_array
from .supports import (CombDegenerationCertificate, SupportSet,
                       TightnessReport, check_comb_degeneration, check_tight,
                       is_antichain, is_free, relabel_support,
                       tight_antichain_relabel)
from .support_functionals import support_at_basis
from .tensors import (BasisTuple, Tensor, binomial_basis_matrix,
                      cap_set_tensor, invert_matrix, prime_field)


# ---------------------------------------------------------------------------
# z(n)


@dataclass(frozen=True)
class ZResult:
    n: int
    z: float
    gamma: float


def z_of_n(n: int) -> ZResult:
    """Solve the gamma root equation and evaluate z(n).

    gamma is the unique positive root of 1/(g-1) - n/(g^n - 1) = (n-1)/3,
    and z = (g^n - 1)/(g - 1) * g^(-2(n-1)/3).
    """
    from scipy.optimize import brentq

    if n < 2:
        raise ValueError("n must be >= 2")

    def f(g):
        # delta = g - 1; g^n - 1 via expm1/log1p avoids cancellation near 1
        delta = g - 1.0
        return 1.0 / delta - n / math.expm1(n * math.log1p(delta)) - (n - 1.0) / 3.0

    lo, hi = 1.0 + 1e-9, 4.0
    while f(lo) * f(hi) > 0 and hi < 2 ** 40:
        hi *= 2.0
    gamma = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    z = math.expm1(n * math.log1p(gamma - 1.0)) / (gamma - 1.0) \
        * gamma ** (-2.0 * (n - 1.0) / 3.0)
    return ZResult(n, float(z), float(gamma))


def reduced_polymult_support(n: int) -> SupportSet:
    """The tight set of triples in {0..n-1}^3 summing to n-1."""
    pts = [p for p in iter_product(range(n), repeat=3) if sum(p) == n - 1]
    return SupportSet((n, n, n), tuple(pts))


def modular_sum_support(m: int) -> SupportSet:
    """Triples in {0..m-1}^3 with coordinate sum m-1 modulo m."""
    pts = [p for p in iter_product(range(m), repeat=3) if sum(p) % m == m - 1]
    return SupportSet((m, m, m), tuple(pts))


# ---------------------------------------------------------------------------
# asymptotic subrank of tight 3-supports


@dataclass(frozen=True)
class AsymptoticSubrankResult:
    value: float
    log2_value: float
    tightness: TightnessReport
    minimax: MinimaxEntropyResult


def asympt_subrank_tight3(support: SupportSet, tol: float = 1e-6
                          ) -> AsymptoticSubrankResult:
    """max_P min_i 2^H(P_i) on a tight 3-support."""
    if support.k != 3:
        raise ValueError("only order-3 supports are handled")
    report = check_tight(support)
    if not report.tight:
        raise ValueError("support is not tight; the formula does not apply")
    mm = max_min_entropy(support, tol=tol)
    return AsymptoticSubrankResult(2.0 ** mm.value, mm.value, report, mm)


@dataclass(frozen=True)
class DegenerationBound:
    value: float
    certificate: CombDegenerationCertificate
    inner: AsymptoticSubrankResult


def degeneration_lower_bound(big: SupportSet, small: SupportSet
                             ) -> DegenerationBound:
    """Lower bound the big support's asymptotic subrank through a
    combinatorial degeneration onto a tight subset."""
    cert = check_comb_degeneration(big, small)
    if cert is None:
        raise ValueError("no combinatorial degeneration certificate found")
    inner = asympt_subrank_tight3(small)
    return DegenerationBound(inner.value, cert, inner)


# ---------------------------------------------------------------------------
# cap sets


@dataclass(frozen=True)
class CapsetReport:
    m: int
    p: int
    value: float
    z: ZResult
    relabeling: tuple[int, ...]           # applied to leg 3 before the transform
    transformed_support: SupportSet
    target_support: SupportSet
    degeneration: CombDegenerationCertificate
    modular_support: SupportSet


def _is_power_of(m: int, p: int) -> bool:
    if m < 2:
        return False
    while m % p == 0:
        m //= p
    return m == 1


def capset_bound(m: int, p: int) -> CapsetReport:
    """Certified asymptotic bound for progression-free sets modulo m.

    Builds the modular-sum tensor over F_p, relabels the third leg by the
    cyclic shift x -> x + 1 mod m, changes to the binomial basis, and checks
    that the resulting support is exactly the tight set of triples summing to
    m - 1.  A combinatorial degeneration from the modular-sum support onto
    that tight set is verified as well; the bound itself is z(m).
    """
    if not _is_power_of(m, p):
        raise ValueError("m must be a power of the prime p")
    dom = prime_field(p)
    t = cap_set_tensor(m, p)

    # shift leg 3 so the support becomes "sum = m-1 mod m"
    shift = [(x + 1) % m for x in range(m)]
    b = binomial_basis_matrix(m, p)
    perm = np.empty((m, m), dtype=object)
    for w in range(m):
        for z in range(m):
            perm[w, z] = 1 if z == shift[w] else 0
    b_inv = invert_matrix(b, dom)
    third = np.tensordot(b_inv, perm, axes=(1, 0)) % p
    coeff_maps = [b_inv, b_inv, third]
    coeff = t
    for leg, mmap in enumerate(coeff_maps):
        coeff = _apply_single_leg(coeff, leg, mmap)
    transformed = SupportSet.from_tensor(coeff)
    target = reduced_polymult_support(m)
    if set(transformed.points) != set(target.points):
        raise RuntimeError("binomial basis transform did not produce the tight support")

    shifted_support = modular_sum_support(m)
    cert = check_comb_degeneration(shifted_support, target)
    if cert is None or not cert.verify(shifted_support, target):
        raise RuntimeError("combinatorial degeneration certificate failed")
    z = z_of_n(m)
    return CapsetReport(m=m, p=p, value=z.z, z=z, relabeling=tuple(shift),
                        transformed_support=transformed, target_support=target,
                        degeneration=cert, modular_support=shifted_support)


def _apply_single_leg(t: Tensor, leg: int, mat) -> Tensor:
    from .tensors import identity_matrix, restrict

    maps = [mat if i == leg else identity_matrix(t.dims[i], t.domain)
            for i in range(t.k)]
    return restrict(t, maps)


# ---------------------------------------------------------------------------
# slice rank


@dataclass(frozen=True)
class SliceCover:
    size: int
    slices: tuple[tuple[int, int], ...]   # (leg, value) pairs covering the support


def slicerank_exact_combinatorial(support: SupportSet, budget: int = 5000
                                  ) -> SliceCover:
    """Exact slice rank of an antichain-supported pattern.

    Equals the minimum total number of (leg, value) slices covering every
    support point; solved by branch and bound on the uncovered points.
    Tight supports are accepted too: sorting each leg by the tightness
    weights turns them into antichains without changing the cover number.
    """
    if not is_antichain(support):
        tight = check_tight(support)
        if not tight.tight:
            raise ValueError("exact combinatorial slice rank needs an "
                             "antichain (or tight) support")
        relabeled = relabel_support(
            support, tight_antichain_relabel(support, tight.certificate))
        assert is_antichain(relabeled)
    pts = list(support.points)
    if not pts:
        raise ValueError("empty support")
    if len(pts) > budget:
        raise BudgetExceededError(f"support larger than budget {budget}")
    k = support.k

    best: list[tuple[int, int]] = [(0, v) for v in support.values(0)]

    def covered(p, chosen) -> bool:
        return any(p[leg] == val for leg, val in chosen)

    def extend(chosen):
        nonlocal best
        if len(chosen) >= len(best):
            return
        uncovered = [p for p in pts if not covered(p, chosen)]
        if not uncovered:
            best = list(chosen)
            return
        # cheap lower bound: a slice covers at most max-count points
        max_cover = 1
        for leg in range(k):
            counts: dict[int, int] = {}
            for p in uncovered:
                counts[p[leg]] = counts.get(p[leg], 0) + 1
            max_cover = max(max_cover, max(counts.values()))
        if len(chosen) + math.ceil(len(uncovered) / max_cover) >= len(best) + 1:
            if len(chosen) + math.ceil(len(uncovered) / max_cover) > len(best):
                return
        p = uncovered[0]
        for leg in range(k):
            extend(chosen + [(leg, p[leg])])

    extend([])
    return SliceCover(len(best), tuple(best))


def slicerank_exact_for_tensor(t: Tensor, basis: BasisTuple | None = None
                               ) -> SliceCover:
    basis = basis or BasisTuple.standard(t)
    supp = support_at_basis(t, basis)
    return slicerank_exact_combinatorial(supp)


@dataclass(frozen=True)
class SliceRankResult:
    value: float
    log2_value: float
    theta: ThetaWeights
    route: str
    quantum_values: tuple[tuple[tuple[float, ...], float], ...]
    support_route_value: float | None = None


def asympt_slicerank(t: Tensor, options: AscentOptions | None = None,
                     rounds: int = 12, tol: float = 1e-3) -> SliceRankResult:
    """Minimise the entropy ascent value over the leg-theta simplex.

    The objective theta -> E(theta) is convex (a max of theta-linear
    functions), so a cutting-plane loop over evaluated marginal entropy
    vectors converges; evaluations reuse the ascent optimizer.  When the
    standard support is an antichain the combinatorial route (marginal
    entropy minimax on the support) is computed as a cross check.
    """
    from scipy.optimize import linprog

    arr = state_array(t)
    if float(np.vdot(arr, arr).real) <= 0:
        raise ValueError("zero tensor")
    k = arr.ndim
    opts = options or AscentOptions(starts=4, max_iter=800)

    evals = []
    theta_vec = np.full(k, 1.0 / k)
    seen = set()
    for _ in range(rounds):
        key = tuple(np.round(theta_vec, 9))
        if key in seen:
            break
        seen.add(key)
        theta = ThetaWeights.from_legs(theta_vec)
        res = lower_quantum_functional(t, theta, opts)
        psi = arr
        for leg, g in enumerate(res.transforms):
            psi = np.moveaxis(np.tensordot(g, psi, axes=(1, leg)), 0, leg)
        from .quantum import marginal, von_neumann_entropy
        hvec = np.array([von_neumann_entropy(marginal(psi, [i])) for i in range(k)])
        evals.append((res.value, theta_vec.copy(), hvec))
        a_ub = np.hstack([np.array([e[2] for e in evals]),
                          -np.ones((len(evals), 1))])
        c = np.zeros(k + 1)
        c[-1] = 1.0
        lp = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(evals)),
                     A_eq=np.concatenate([np.ones(k), [0.0]])[None, :],
                     b_eq=np.array([1.0]),
                     bounds=[(0.0, 1.0)] * k + [(None, None)], method="highs")
        if not lp.success:
            break
        new_theta = lp.x[:k]
        upper = min(e[0] for e in evals)
        if upper - lp.fun <= tol * 0.25:
            theta_vec = new_theta
            break
        theta_vec = new_theta

    best_val, best_theta, _ = min(evals, key=lambda e: e[0])

    # free supports certify the value combinatorially: the support entropy
    # equals the ascent supremum for every singleton theta, so the minimax
    # on the support is exact
    support_value = None
    supp = SupportSet.from_tensor(t)
    if len(supp) and is_free(supp):
        support_value = max_min_entropy(supp).value
        best_val = support_value
    theta = ThetaWeights.from_legs(np.maximum(best_theta, 0) /
                                   np.maximum(best_theta, 0).sum())
    return SliceRankResult(
        value=2.0 ** best_val,
        log2_value=best_val,
        theta=theta,
        route="support" if support_value is not None else "quantum",
        quantum_values=tuple((tuple(e[1]), e[0]) for e in evals),
        support_route_value=support_value,
    )
