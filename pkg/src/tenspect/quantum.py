"""Quantum marginals, entropy ascent over local transformations, and
isotypic projections on tensor powers.

The lower functional maximises the theta-weighted marginal von Neumann
entropy of (g_1 x ... x g_k) t over invertible g_i by gradient ascent with an
Armijo line search (analytic Wirtinger gradient, per-step renormalisation,
seeded multi-start).  The upper certificate enumerates tuples of partitions
whose isotypic projections leave a tensor power alive; projectors are applied
as permutation actions, never materialised as matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as iter_permutations
from math import factorial, prod

import numpy as np

from .entropy import ThetaWeights
from .errors import BudgetExceededError
from .partitions import (character, irrep_dimension, kronecker_coefficient,
                         lr_coefficient, normalize_partition,
                         partition_entropy, partitions)
from .tensors import COMPLEXFLOAT, Tensor, convert

__all__ = [
    "state_array", "marginal", "von_neumann_entropy", "state_theta_entropy",
    "AscentOptions", "LowerQuantumResult", "lower_quantum_functional",
    "isotypic_projector_apply", "bipartition_projector_apply",
    "symmetrize_copies", "tensor_power_array",
    "CertificateResult", "upper_quantum_certificate",
    "kronecker_coefficient", "lr_coefficient",
]

COND_LIMIT = 1e8


def state_array(t: Tensor) -> np.ndarray:
    """Writable complex array of a tensor, converting exact domains."""
    if t.domain.kind != "C":
        t = convert(t, COMPLEXFLOAT)
    return np.array(t.entries, dtype=complex)


def _side_indices(k: int, side) -> list[int]:
    side = sorted(set(int(x) for x in side))
    if not side or len(side) >= k:
        raise ValueError("marginal subset must be proper and nonempty")
    if any(x < 0 or x >= k for x in side):
        raise ValueError("marginal subset out of range")
    return side


def marginal(psi: np.ndarray, side) -> np.ndarray:
    """Reduced density matrix of a (possibly unnormalised) pure state."""
    k = psi.ndim
    side = _side_indices(k, side)
    rest = [i for i in range(k) if i not in side]
    d_side = prod(psi.shape[i] for i in side)
    mat = psi.transpose(side + rest).reshape(d_side, -1)
    norm2 = float(np.vdot(mat, mat).real)
    if norm2 <= 0.0:
        raise ValueError("zero state has no marginals")
    return mat @ mat.conj().T / norm2


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits of a density matrix."""
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-15]
    return float(-(evals * np.log2(evals)).sum())


def state_theta_entropy(psi: np.ndarray, theta: ThetaWeights) -> float:
    k = psi.ndim
    total = 0.0
    for side, w in theta.bipartition_sides(k):
        if w == 0.0:
            continue
        total += w * von_neumann_entropy(marginal(psi, side))
    return total


# ---------------------------------------------------------------------------
# lower functional: entropy ascent over local invertible transformations


@dataclass(frozen=True)
class AscentOptions:
    starts: int = 16
    max_iter: int = 5000
    grad_tol: float = 1e-7
    seed: int = 0
    step0: float = 1.0
    armijo: float = 1e-4
    backtrack: float = 0.5
    cond_limit: float = COND_LIMIT
    perturbation: float = 0.3


@dataclass(frozen=True)
class LowerQuantumResult:
    value: float                    # bits; a lower bound on the supremum
    transforms: tuple[np.ndarray, ...]
    trace: tuple[float, ...]        # monotone objective trace of the best start
    start_values: tuple[float, ...]

    @property
    def functional(self) -> float:
        return 2.0 ** self.value

    def trace_csv(self) -> str:
        lines = ["iteration,objective"]
        lines += [f"{i},{v!r}" for i, v in enumerate(self.trace)]
        return "\n".join(lines) + "\n"


def _apply_transforms(t_arr: np.ndarray, gs) -> np.ndarray:
    out = t_arr
    for leg, g in enumerate(gs):
        out = np.moveaxis(np.tensordot(g, out, axes=(1, leg)), 0, leg)
    return out


def _objective_and_grads(t_arr, gs, sides):
    """Objective in bits plus per-leg Wirtinger ascent directions."""
    k = t_arr.ndim
    psi = _apply_transforms(t_arr, gs)
    norm2 = float(np.vdot(psi, psi).real)
    if not np.isfinite(norm2) or norm2 < 1e-250:
        return None
    value = 0.0
    gpsi = np.zeros_like(psi)
    for side, w in sides:
        axes = sorted(side)
        rest = [i for i in range(k) if i not in axes]
        d_side = prod(psi.shape[i] for i in axes)
        mat = psi.transpose(axes + rest).reshape(d_side, -1)
        rho = mat @ mat.conj().T / norm2
        evals, vecs = np.linalg.eigh(rho)
        keep = evals > max(evals.max(), 1e-300) * 1e-14
        lam = evals[keep]
        u = vecs[:, keep]
        h_s = float(-(lam * np.log2(lam)).sum())
        value += w * h_s
        log_rho_mat = (u * np.log2(lam)) @ u.conj().T
        lpsi_mat = log_rho_mat @ mat
        lpsi = lpsi_mat.reshape([psi.shape[i] for i in axes + rest])
        inv = np.argsort(axes + rest)
        gpsi += w * (lpsi.transpose(inv) + h_s * psi)
    gpsi = -gpsi / norm2
    grads = []
    for leg in range(k):
        phi = _apply_transforms(t_arr, [g if i != leg else np.eye(t_arr.shape[leg], dtype=complex)
                                        for i, g in enumerate(gs)])
        other = [i for i in range(k) if i != leg]
        w_mat = np.tensordot(np.conj(gpsi), phi, axes=(other, other))
        grads.append(2.0 * np.conj(w_mat))
    return value, grads, psi


def _ascend(t_arr, gs, sides, opts: AscentOptions):
    trace = []
    res = _objective_and_grads(t_arr, gs, sides)
    if res is None:
        return None
    value, grads, _ = res
    trace.append(value)
    step = opts.step0
    for _ in range(opts.max_iter):
        gnorm2 = sum(float(np.vdot(g, g).real) for g in grads)
        if math.sqrt(gnorm2) < opts.grad_tol:
            break
        accepted = False
        alpha = step
        for _ in range(40):
            cand = [g + alpha * d for g, d in zip(gs, grads)]
            cand_res = _objective_and_grads(t_arr, cand, sides)
            if cand_res is not None and cand_res[0] >= value + opts.armijo * alpha * gnorm2:
                accepted = True
                break
            alpha *= opts.backtrack
        if not accepted:
            break
        gs = [g / (np.linalg.norm(g) / math.sqrt(g.shape[0])) for g in cand]
        conds = []
        for g in gs:
            sv = np.linalg.svd(g, compute_uv=False)
            conds.append(sv[0] / max(sv[-1], 1e-300))
        res = _objective_and_grads(t_arr, gs, sides)
        if res is None:
            break
        value, grads, _ = res
        trace.append(value)
        if max(conds) > opts.cond_limit:
            break
        step = min(alpha * 2.0, 8.0)
    return value, gs, trace


def lower_quantum_functional(t: Tensor, theta: ThetaWeights,
                             options: AscentOptions | None = None
                             ) -> LowerQuantumResult:
    """Seeded multi-start entropy ascent; returns the best lower bound."""
    opts = options or AscentOptions()
    t_arr = state_array(t)
    if float(np.vdot(t_arr, t_arr).real) <= 0.0:
        raise ValueError("zero tensor")
    k = t_arr.ndim
    sides = [(list(side), w) for side, w in theta.bipartition_sides(k) if w > 0]
    rng = np.random.default_rng(opts.seed)
    results = []
    for start in range(max(opts.starts, 1)):
        if start == 0:
            gs = [np.eye(d, dtype=complex) for d in t_arr.shape]
        else:
            gs = [np.eye(d, dtype=complex)
                  + opts.perturbation * (rng.standard_normal((d, d))
                                         + 1j * rng.standard_normal((d, d)))
                  for d in t_arr.shape]
        out = _ascend(t_arr, gs, sides, opts)
        if out is not None:
            results.append((out[0], start, out[1], out[2]))
    if not results:
        raise RuntimeError("every ascent start failed")
    results.sort(key=lambda r: (-r[0], r[1]))
    best = results[0]
    return LowerQuantumResult(value=best[0],
                              transforms=tuple(best[2]),
                              trace=tuple(best[3]),
                              start_values=tuple(r[0] for r in results))


# ---------------------------------------------------------------------------
# isotypic projections on tensor powers


def tensor_power_array(t_arr: np.ndarray, n: int) -> np.ndarray:
    """n-th tensor power with copy-major axis order."""
    out = np.asarray(t_arr, dtype=complex)
    for _ in range(n - 1):
        out = np.multiply.outer(out, t_arr)
    return out


def _block_view(arr: np.ndarray, dims: tuple[int, ...], n: int, side) -> tuple[np.ndarray, tuple]:
    """Reshape copy-major axes into (side, complement) pairs per copy."""
    k = len(dims)
    side = sorted(set(int(x) for x in side))
    if not side or any(x < 0 or x >= k for x in side):
        raise ValueError("invalid leg subset")
    rest = [i for i in range(k) if i not in side]
    perm = []
    for copy in range(n):
        perm += [copy * k + i for i in side]
        perm += [copy * k + i for i in rest]
    d_s = prod(dims[i] for i in side)
    d_c = prod(dims[i] for i in rest)
    reshaped = arr.transpose(perm).reshape((d_s, d_c) * n)
    return reshaped, (tuple(side), tuple(rest), d_s, d_c)


def _block_unview(arr2n: np.ndarray, dims, n, info) -> np.ndarray:
    side, rest, d_s, d_c = info
    k = len(dims)
    shaped = arr2n.reshape(tuple(
        dims[i] for copy in range(n) for i in list(side) + list(rest)))
    perm = []
    order = list(side) + list(rest)
    for copy in range(n):
        inv = [0] * k
        for pos, leg in enumerate(order):
            inv[leg] = copy * k + pos
        perm += inv
    return shaped.transpose(perm)


def _permute_copies(arr2n: np.ndarray, perm, move_complement: bool) -> np.ndarray:
    """Send copy m's block axes to position perm[m]."""
    n = len(perm)
    axes = [0] * (2 * n)
    for m in range(n):
        target = perm[m]
        axes[2 * target] = 2 * m
        axes[2 * target + 1] = (2 * m + 1) if move_complement else (2 * target + 1)
    return arr2n.transpose(axes)


def _cycle_type(perm) -> tuple[int, ...]:
    n = len(perm)
    seen = [False] * n
    cycles = []
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        cycles.append(length)
    return normalize_partition(cycles)


def symmetrize_copies(arr2n: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(arr2n)
    for perm in iter_permutations(range(n)):
        out += _permute_copies(arr2n, perm, move_complement=True)
    return out / factorial(n)


def _young_project(arr2n: np.ndarray, lam, n: int) -> np.ndarray:
    lam = normalize_partition(lam)
    if sum(lam) != n:
        raise ValueError("partition size must equal the power")
    dim = irrep_dimension(lam)
    out = np.zeros_like(arr2n)
    for perm in iter_permutations(range(n)):
        chi = character(lam, _cycle_type(perm))
        if chi:
            out += chi * _permute_copies(arr2n, perm, move_complement=False)
    return out * (dim / factorial(n))


MAX_POWER_ELEMENTS = 20_000_000


def _check_budget(dims, n: int):
    if n > 5:
        raise BudgetExceededError("tensor power limited to n <= 5")
    if prod(dims) ** n > MAX_POWER_ELEMENTS:
        raise BudgetExceededError("tensor power too large for dense projection")


def isotypic_projector_apply(v: np.ndarray, dims, n: int, lam, side) -> np.ndarray:
    """Apply the isotypic projector for a leg subset to a vector in the
    n-th power of the full leg space (copy-major axes)."""
    dims = tuple(dims)
    _check_budget(dims, n)
    arr = np.asarray(v, dtype=complex).reshape(dims * n)
    view, info = _block_view(arr, dims, n, side)
    out = _young_project(view, lam, n)
    return _block_unview(out, dims, n, info)


def bipartition_projector_apply(v: np.ndarray, dims, n: int, lam, side) -> np.ndarray:
    """Symmetrise over the copies, then project the side's isotype."""
    dims = tuple(dims)
    _check_budget(dims, n)
    arr = np.asarray(v, dtype=complex).reshape(dims * n)
    view, info = _block_view(arr, dims, n, side)
    sym = symmetrize_copies(view, n)
    out = _young_project(sym, lam, n)
    return _block_unview(out, dims, n, info)


@dataclass(frozen=True)
class CertificateResult:
    value: float                                  # bits
    witness: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    power: int
    surviving: int

    @property
    def functional(self) -> float:
        return 2.0 ** self.value


def upper_quantum_certificate(t: Tensor, theta: ThetaWeights, n: int,
                              order=None, zero_tol: float = 1e-8
                              ) -> CertificateResult:
    """Best weighted partition entropy over surviving projector tuples.

    Enumerates tuples of partitions of n, one per weighted bipartition, and
    keeps those whose ordered projector product does not annihilate the n-th
    power.  Crossing weights need an explicit projector order.
    """
    if n < 1 or n > 4:
        raise BudgetExceededError("certificate power limited to 1 <= n <= 4")
    t_arr = state_array(t)
    norm = math.sqrt(float(np.vdot(t_arr, t_arr).real))
    if norm == 0.0:
        raise ValueError("zero tensor")
    k = t_arr.ndim
    dims = t_arr.shape
    _check_budget(dims, n)
    sides = [(tuple(sorted(side)), w) for side, w in theta.bipartition_sides(k)
             if w > 0]
    if order is not None:
        by_key = {tuple(sorted(side)): (tuple(sorted(side)), w) for side, w in sides}
        try:
            sides = [by_key[tuple(sorted(s))] for s in order]
        except KeyError as exc:
            raise ValueError("order must list exactly the weighted bipartitions") from exc
    elif not theta.is_noncrossing(k):
        raise ValueError("crossing theta weights need an explicit projector order")

    power = tensor_power_array(t_arr / norm, n)
    lams = list(partitions(n))
    best_val = -math.inf
    best_tuple = None
    surviving = 0

    def recurse(depth, arr, chosen, weight_sum):
        nonlocal best_val, best_tuple, surviving
        if depth == len(sides):
            surviving += 1
            if weight_sum > best_val:
                best_val = weight_sum
                best_tuple = tuple(chosen)
            return
        side, w = sides[depth]
        for lam in lams:
            out = bipartition_projector_apply(arr, dims, n, lam, side)
            if math.sqrt(float(np.vdot(out, out).real)) <= zero_tol:
                continue
            recurse(depth + 1, out, chosen + [(side, lam)],
                    weight_sum + w * partition_entropy(lam))

    recurse(0, power, [], 0.0)
    if best_tuple is None:
        raise RuntimeError("no projector tuple survived; lower the zero tolerance")
    witness = tuple((side, lam) for side, lam in best_tuple)
    return CertificateResult(best_val, witness, n, surviving)
