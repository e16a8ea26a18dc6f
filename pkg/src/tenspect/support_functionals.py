"""Basis-dependent support entropies and their basis searches.

The upper functional minimises the support entropy H_theta over a pool of
bases (standard, user supplied, sparsified, and a seeded local search over
elementary transvections); the lower functional maximises the entropy of the
maximal points.  Results carry explicit exactness flags: a minimum found at
an antichain support is exact, anything else is an upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import ThetaWeights, max_H_theta
from .supports import (SupportSet, TightnessCertificate, check_tight,
                       is_antichain, is_diagonal, max_points,
                       tight_antichain_relabel)
from .tensors import (COMPLEX_ZERO_TOL, BasisTuple, Tensor,
                      coefficients_in_basis, flattening_rank, identity_matrix,
                      invert_matrix, restrict)

NEG_INF = float("-inf")


def _scalar_record(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:.12g}{v.imag:+.12g}i"
    return str(v)


def support_at_basis(t: Tensor, basis: BasisTuple,
                     tol: float = COMPLEX_ZERO_TOL) -> SupportSet:
    return SupportSet.from_tensor(coefficients_in_basis(t, basis), tol)


def rho_upper_at_basis(t: Tensor, basis: BasisTuple, theta: ThetaWeights,
                       tol: float = COMPLEX_ZERO_TOL) -> float:
    """H_theta of the support of t in the given basis; -inf for the zero tensor."""
    supp = support_at_basis(t, basis, tol)
    if len(supp) == 0:
        return NEG_INF
    return max_H_theta(supp, theta).value


def rho_lower_at_basis(t: Tensor, basis: BasisTuple, theta: ThetaWeights,
                       tol: float = COMPLEX_ZERO_TOL) -> float:
    supp = support_at_basis(t, basis, tol)
    if len(supp) == 0:
        return NEG_INF
    return max_H_theta(max_points(supp), theta).value


def gauge_points(t: Tensor) -> tuple[int, ...]:
    """Per-leg flattening ranks (the dimensions after discarding null directions)."""
    if t.k < 2:
        raise ValueError("gauge points need order >= 2")
    return tuple(flattening_rank(t, (i,)) for i in range(t.k))


@dataclass(frozen=True)
class BasisSearchOptions:
    restarts: int = 50
    steps: int = 200
    max_coeff: int = 3
    seed: int = 0
    use_sparsification: bool = True
    extra_bases: tuple[BasisTuple, ...] = ()


@dataclass(frozen=True)
class SupportFunctionalReport:
    theta: ThetaWeights
    basis: BasisTuple
    support: SupportSet
    rho_upper: float
    rho_lower: float
    oblique_basis_found: bool
    tight_certificate: TightnessCertificate | None
    zeta_exact: int | None
    evaluations: int

    @property
    def zeta_upper(self) -> float:
        return 2.0 ** self.rho_upper

    @property
    def zeta_lower(self) -> float:
        return 2.0 ** self.rho_lower

    def to_records(self) -> dict:
        if self.theta.mode == "legs":
            theta_rec = {"mode": "legs",
                         "weights": [w for _, w in sorted(self.theta.items)]}
        else:
            theta_rec = {"mode": "bipartitions",
                         "weights": {"|".join(str(x + 1) for x in sorted(side)): w
                                     for side, w in self.theta.items}}
        basis_rec = [[[_scalar_record(v) for v in row] for row in mat]
                     for mat in self.basis.matrices]
        return {
            "rho_upper": self.rho_upper,
            "rho_lower": self.rho_lower,
            "zeta_upper": self.zeta_upper,
            "zeta_lower": self.zeta_lower,
            "zeta_exact": self.zeta_exact,
            "oblique_basis_found": self.oblique_basis_found,
            "tight": self.tight_certificate is not None,
            "theta": theta_rec,
            "basis": basis_rec,
            "support_size": len(self.support),
            "support_points": [list(p) for p in self.support.points],
            "evaluations": self.evaluations,
        }

    def to_text(self) -> str:
        rec = self.to_records()
        rec["support_points"] = ";".join(",".join(str(x) for x in p)
                                         for p in self.support.points)
        rec["theta"] = " ".join(f"{k}:{v}" for k, v in sorted(
            rec["theta"].items())) if isinstance(rec["theta"], dict) else rec["theta"]
        rec["basis"] = ";".join(
            "|".join(",".join(str(v) for v in row) for row in mat)
            for mat in rec["basis"])
        return "\n".join(f"{k}={rec[k]}" for k in sorted(rec)) + "\n"


class _SearchState:
    """Coefficient tensor plus the accumulated inverse basis maps."""

    def __init__(self, coeff: Tensor, inv_maps):
        self.coeff = coeff
        self.inv_maps = [m.copy() for m in inv_maps]

    def copy(self) -> "_SearchState":
        return _SearchState(self.coeff, self.inv_maps)

    def apply_transvection(self, leg: int, dst: int, src: int, c) -> "_SearchState":
        dom = self.coeff.domain
        n = self.coeff.dims[leg]
        m = identity_matrix(n, dom).copy() if dom.kind != "C" else np.eye(n, dtype=complex)
        if dom.kind != "C":
            m = np.array(m, dtype=object)
        m[dst, src] = dom.coerce(c) if dom.kind != "C" else complex(c)
        m[dst, dst] = dom.one() if dom.kind != "C" else 1.0
        new_coeff = restrict(self.coeff,
                             [m if i == leg else identity_matrix(self.coeff.dims[i], dom)
                              for i in range(self.coeff.k)])
        new_inv = [im.copy() for im in self.inv_maps]
        prod = np.tensordot(m, new_inv[leg], axes=(1, 0))
        if dom.kind == "Fp":
            prod = prod % dom.p
        new_inv[leg] = prod
        return _SearchState(new_coeff, new_inv)

    def basis(self, domain) -> BasisTuple:
        mats = tuple(invert_matrix(m, domain) for m in self.inv_maps)
        return BasisTuple(mats, domain)


def _sparsify(state: _SearchState, tol: float) -> _SearchState:
    """Per-leg exact row reduction of the flattenings; shrinks the support."""
    t = state.coeff
    dom = t.domain
    cur = state
    for _ in range(3):
        before = len(cur.coeff.nonzero_indices(tol))
        for leg in range(t.k):
            coeff = cur.coeff
            rest = [i for i in range(coeff.k) if i != leg]
            mat = coeff.entries.transpose([leg] + rest).reshape(coeff.dims[leg], -1)
            u = _row_reduction_transform(mat, dom, tol)
            if u is None:
                continue
            cand = cur.copy()
            maps = [u if i == leg else identity_matrix(coeff.dims[i], dom)
                    for i in range(coeff.k)]
            new_coeff = restrict(coeff, maps)
            prod = np.tensordot(u, cand.inv_maps[leg], axes=(1, 0))
            if dom.kind == "Fp":
                prod = prod % dom.p
            cand.inv_maps[leg] = prod
            cand.coeff = new_coeff
            if len(new_coeff.nonzero_indices(tol)) <= len(cur.coeff.nonzero_indices(tol)):
                cur = cand
        if len(cur.coeff.nonzero_indices(tol)) >= before:
            break
    return cur


def _row_reduction_transform(mat, domain, tol):
    """Invertible U with U @ mat in (approximate) reduced echelon form."""
    n = mat.shape[0]
    if domain.kind == "C":
        a = np.asarray(mat, dtype=complex).copy()
        u = np.eye(n, dtype=complex)
        r = 0
        for c in range(a.shape[1]):
            if r >= n:
                break
            piv = max(range(r, n), key=lambda i: abs(a[i, c]))
            if abs(a[piv, c]) <= tol:
                continue
            a[[r, piv]], u[[r, piv]] = a[[piv, r]].copy(), u[[piv, r]].copy()
            for i in range(n):
                if i != r and abs(a[i, c]) > tol:
                    f = a[i, c] / a[r, c]
                    a[i] -= f * a[r]
                    u[i] -= f * u[r]
            r += 1
        return u
    rows = [list(row) for row in np.asarray(mat, dtype=object)]
    uid = [[domain.one() if i == j else domain.zero() for j in range(n)]
           for i in range(n)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        if r >= n:
            break
        piv = next((i for i in range(r, n) if not domain.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        uid[r], uid[piv] = uid[piv], uid[r]
        for i in range(n):
            if i != r and not domain.is_zero(rows[i][c]):
                if domain.kind == "Q":
                    f = rows[i][c] / rows[r][c]
                else:
                    f = (rows[i][c] * pow(int(rows[r][c]), domain.p - 2, domain.p)) % domain.p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                uid[i] = [a - f * b for a, b in zip(uid[i], uid[r])]
                if domain.kind == "Fp":
                    rows[i] = [x % domain.p for x in rows[i]]
                    uid[i] = [x % domain.p for x in uid[i]]
        r += 1
    out = np.empty((n, n), dtype=object)
    out[:] = uid
    return out


def upper_support_functional(t: Tensor, theta: ThetaWeights,
                             options: BasisSearchOptions | None = None,
                             tol: float = COMPLEX_ZERO_TOL) -> SupportFunctionalReport:
    """Minimise the support entropy over a basis pool.

    The result is an upper bound on the true minimum over all bases; it is
    exact (and flagged so) when the winning support is an antichain.
    """
    if t.is_zero(tol):
        raise ValueError("support functionals are undefined for the zero tensor")
    opts = options or BasisSearchOptions()
    dom = t.domain
    rng = np.random.default_rng(opts.seed)
    evaluations = 0
    cache: dict[tuple, float] = {}

    def entropy_of(supp: SupportSet) -> float:
        nonlocal evaluations
        key = supp.points
        if key not in cache:
            cache[key] = max_H_theta(supp, theta).value
            evaluations += 1
        return cache[key]

    identity_state = _SearchState(
        t, [identity_matrix(d, dom) for d in t.dims])
    pool = [identity_state]
    for basis in opts.extra_bases:
        coeff = coefficients_in_basis(t, basis)
        pool.append(_SearchState(coeff, list(basis.inverses())))
    if opts.use_sparsification:
        pool.append(_sparsify(identity_state, tol))

    def score(state: _SearchState) -> tuple[float, SupportSet]:
        supp = SupportSet.from_tensor(state.coeff, tol)
        return entropy_of(supp), supp

    best_state = None
    best_val = math.inf
    best_supp = None
    for state in pool:
        val, supp = score(state)
        if val < best_val - 1e-9:
            best_val, best_state, best_supp = val, state, supp

    # local search: elementary transvections with small integer coefficients
    coeff_choices = [c for c in range(-opts.max_coeff, opts.max_coeff + 1) if c != 0]
    for _ in range(opts.restarts):
        cur = best_state.copy()
        cur_val, cur_supp = best_val, best_supp
        for _ in range(opts.steps):
            leg = int(rng.integers(t.k))
            n = t.dims[leg]
            if n < 2:
                continue
            dst = int(rng.integers(n))
            src = int(rng.integers(n))
            if dst == src:
                continue
            c = coeff_choices[int(rng.integers(len(coeff_choices)))]
            cand = cur.apply_transvection(leg, dst, src, c)
            supp = SupportSet.from_tensor(cand.coeff, tol)
            if len(supp) == 0:
                continue
            if set(supp.points) >= set(cur_supp.points) and supp.points != cur_supp.points:
                continue    # supersets can only raise the entropy
            val = entropy_of(supp)
            if val < cur_val - 1e-9:
                cur, cur_val, cur_supp = cand, val, supp
        if cur_val < best_val - 1e-12:
            best_state, best_val, best_supp = cur, cur_val, cur_supp

    lower_val = entropy_of(max_points(best_supp))
    tight_report = check_tight(best_supp)
    # tight supports become antichains after sorting each leg by the weights
    oblique = is_antichain(best_supp) or tight_report.tight
    zeta_exact = len(best_supp) if is_diagonal(best_supp) else None
    return SupportFunctionalReport(
        theta=theta,
        basis=best_state.basis(dom),
        support=best_supp,
        rho_upper=best_val,
        rho_lower=lower_val,
        oblique_basis_found=oblique,
        tight_certificate=tight_report.certificate if tight_report.tight else None,
        zeta_exact=zeta_exact,
        evaluations=evaluations,
    )


def lower_support_functional(t: Tensor, theta: ThetaWeights,
                             options: BasisSearchOptions | None = None,
                             tol: float = COMPLEX_ZERO_TOL) -> SupportFunctionalReport:
    """Maximise the maximal-point entropy over a basis pool (a lower bound)."""
    if t.is_zero(tol):
        raise ValueError("support functionals are undefined for the zero tensor")
    opts = options or BasisSearchOptions()
    dom = t.domain
    rng = np.random.default_rng(opts.seed)
    evaluations = 0

    def value_of(state: _SearchState):
        nonlocal evaluations
        supp = SupportSet.from_tensor(state.coeff, tol)
        if len(supp) == 0:
            return NEG_INF, supp
        evaluations += 1
        return max_H_theta(max_points(supp), theta).value, supp

    best_state = _SearchState(t, [identity_matrix(d, dom) for d in t.dims])
    best_val, best_supp = value_of(best_state)

    # a tight support, relabeled into an antichain, realises the lower value
    tight0 = check_tight(best_supp) if len(best_supp) else None
    if tight0 is not None and tight0.tight:
        perms = tight_antichain_relabel(best_supp, tight0.certificate)
        mats = []
        for leg, perm in enumerate(perms):
            m = identity_matrix(t.dims[leg], dom).copy()
            m[...] = dom.zero() if dom.kind != "C" else 0.0
            for x, new in enumerate(perm):
                m[new, x] = dom.one() if dom.kind != "C" else 1.0
            mats.append(m)
        state = _SearchState(restrict(t, mats), mats)
        val, supp = value_of(state)
        if val > best_val:
            best_state, best_val, best_supp = state, val, supp

    for basis in opts.extra_bases:
        state = _SearchState(coefficients_in_basis(t, basis), list(basis.inverses()))
        val, supp = value_of(state)
        if val > best_val:
            best_state, best_val, best_supp = state, val, supp

    coeff_choices = [c for c in range(-opts.max_coeff, opts.max_coeff + 1) if c != 0]
    for _ in range(opts.restarts):
        cur, cur_val, cur_supp = best_state.copy(), best_val, best_supp
        for _ in range(opts.steps):
            leg = int(rng.integers(t.k))
            n = t.dims[leg]
            if n < 2:
                continue
            dst, src = int(rng.integers(n)), int(rng.integers(n))
            if dst == src:
                continue
            c = coeff_choices[int(rng.integers(len(coeff_choices)))]
            cand = cur.apply_transvection(leg, dst, src, c)
            val, supp = value_of(cand)
            if val > cur_val + 1e-9:
                cur, cur_val, cur_supp = cand, val, supp
        if cur_val > best_val + 1e-12:
            best_state, best_val, best_supp = cur, cur_val, cur_supp

    upper_val = max_H_theta(best_supp, theta).value
    tight_report = check_tight(best_supp)
    oblique = is_antichain(best_supp) or tight_report.tight
    zeta_exact = len(best_supp) if is_diagonal(best_supp) else None
    return SupportFunctionalReport(
        theta=theta,
        basis=best_state.basis(dom),
        support=best_supp,
        rho_upper=upper_val,
        rho_lower=best_val,
        oblique_basis_found=oblique,
        tight_certificate=tight_report.certificate if tight_report.tight else None,
        zeta_exact=zeta_exact,
        evaluations=evaluations,
    )


# ---------------------------------------------------------------------------
# instability at a fixed basis


@dataclass(frozen=True)
class InstabilityReport:
    epsilon: float
    weights: tuple[tuple[float, ...], ...]
    support: SupportSet

    def entropy_upper_bound(self, theta: ThetaWeights) -> float:
        """Weighted log-dimension bound minus the instability penalty."""
        k = len(self.weights)
        arr = theta.leg_array(k)
        dims = [len(w) for w in self.weights]
        base = float(sum(arr[i] * math.log2(dims[i]) for i in range(k)))
        return base - (2.0 / math.log(2.0)) * float(arr.min()) * self.epsilon ** 2


def instability_lp(t: Tensor, basis: BasisTuple | None = None,
                   tol: float = COMPLEX_ZERO_TOL) -> InstabilityReport:
    """Best weight vector separating the support from the uniform average.

    LP over nonnegative leg weights w_i normalised by sum_i max_x w_i(x) = 1:
    maximise eps such that every support point a satisfies
    sum_i w_i(a_i) <= sum_i mean_x w_i(x) - eps.
    """
    from scipy.optimize import linprog

    if basis is None:
        basis = BasisTuple.standard(t)
    supp = support_at_basis(t, basis, tol)
    if len(supp) == 0:
        raise ValueError("instability is undefined for an empty support")
    k = supp.k
    dims = supp.bounds
    nw = sum(dims)
    offs = np.cumsum([0] + list(dims))
    nvar = nw + k + 1     # weights, per-leg maxima, epsilon

    a_ub = []
    b_ub = []
    for p in supp.points:
        row = np.zeros(nvar)
        for i in range(k):
            row[offs[i] + p[i]] += 1.0
            row[offs[i]:offs[i + 1]] -= 1.0 / dims[i]
        row[-1] = 1.0
        a_ub.append(row)
        b_ub.append(0.0)
    for i in range(k):
        for x in range(dims[i]):
            row = np.zeros(nvar)
            row[offs[i] + x] = 1.0
            row[nw + i] = -1.0
            a_ub.append(row)
            b_ub.append(0.0)
    a_eq = np.zeros((1, nvar))
    a_eq[0, nw:nw + k] = 1.0
    c = np.zeros(nvar)
    c[-1] = -1.0
    bounds = [(0.0, None)] * nw + [(0.0, 1.0)] * k + [(None, None)]
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  A_eq=a_eq, b_eq=np.array([1.0]), bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"instability LP failed: {res.message}")
    eps = float(res.x[-1])
    eps = 0.0 if eps <= 0.0 else eps
    weights = tuple(tuple(float(v) for v in res.x[offs[i]:offs[i + 1]])
                    for i in range(k))
    return InstabilityReport(eps, weights, supp)
