"""Dense order-k tensors over exact rationals, complex floats and prime fields.

Tensors are stored densely (instances in this library are tiny), entries are
exact wherever the scalar domain allows it, and every operation returns a
fresh immutable tensor.  The text file format, the named tensor families and
the basic semiring operations (tensor product, direct sum, restriction,
flattenings) all live here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from math import comb, prod

import numpy as np

from . import linalg
from .errors import SingularBasisError

#: absolute tolerance for treating a complex entry as zero
COMPLEX_ZERO_TOL = 1e-10

#: relative singular value cutoff for numerical ranks
RANK_REL_TOL = 1e-9


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Domain:
    """Scalar domain tag: exact rationals, complex floats, or F_p."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "C", "Fp"):
            raise ValueError(f"unknown scalar domain {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"modulus must be prime, got {self.p!r}")
        elif self.p is not None:
            raise ValueError("modulus only applies to prime fields")

    @property
    def exact(self) -> bool:
        return self.kind != "C"

    @property
    def label(self) -> str:
        return self.kind if self.kind != "Fp" else f"Fp:{self.p}"

    def coerce(self, value):
        if self.kind == "Q":
            if isinstance(value, float):
                return Fraction(value).limit_denominator(10**12)
            return Fraction(value)
        if self.kind == "C":
            return complex(value)
        return int(value) % self.p

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def is_zero(self, value, tol: float = COMPLEX_ZERO_TOL) -> bool:
        if self.kind == "C":
            return abs(value) <= tol
        return value == 0


RATIONAL = Domain("Q")
COMPLEXFLOAT = Domain("C")


def prime_field(p: int) -> Domain:
    return Domain("Fp", p)


def parse_domain(label: str) -> Domain:
    label = label.strip()
    if label == "Q":
        return RATIONAL
    if label == "C":
        return COMPLEXFLOAT
    m = re.fullmatch(r"Fp:(\d+)", label)
    if m:
        return prime_field(int(m.group(1)))
    raise ValueError(f"unknown domain label {label!r}")


def _coerce_array(entries, dims: tuple[int, ...], domain: Domain) -> np.ndarray:
    if domain.kind == "C":
        arr = np.asarray(entries, dtype=complex).reshape(dims)
    else:
        raw = np.asarray(entries, dtype=object).reshape(dims)
        arr = np.empty(dims, dtype=object)
        for idx in np.ndindex(*dims):
            arr[idx] = domain.coerce(raw[idx])
    arr.setflags(write=False)
    return arr


class Tensor:
    """Immutable dense tensor of order >= 1."""

    __slots__ = ("dims", "domain", "entries")

    def __init__(self, dims, domain: Domain, entries):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be positive, got {dims}")
        entries = _coerce_array(entries, dims, domain)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("Tensor is immutable")

    @property
    def k(self) -> int:
        return len(self.dims)

    def __repr__(self):
        nz = len(self.nonzero_indices())
        return f"Tensor(dims={self.dims}, domain={self.domain.label}, nonzeros={nz})"

    def nonzero_indices(self, tol: float = COMPLEX_ZERO_TOL) -> list[tuple[int, ...]]:
        return [idx for idx in np.ndindex(*self.dims)
                if not self.domain.is_zero(self.entries[idx], tol)]

    def is_zero(self, tol: float = COMPLEX_ZERO_TOL) -> bool:
        return not self.nonzero_indices(tol)

    def __getitem__(self, idx):
        return self.entries[idx]


def zeros(dims, domain: Domain) -> Tensor:
    dims = tuple(int(d) for d in dims)
    if domain.kind == "C":
        return Tensor(dims, domain, np.zeros(dims, dtype=complex))
    arr = np.empty(dims, dtype=object)
    arr[...] = domain.zero()
    return Tensor(dims, domain, arr)


def from_nonzeros(dims, domain: Domain, values: dict) -> Tensor:
    """Build a tensor from a {index tuple: value} mapping."""
    dims = tuple(int(d) for d in dims)
    if domain.kind == "C":
        arr = np.zeros(dims, dtype=complex)
    else:
        arr = np.empty(dims, dtype=object)
        arr[...] = domain.zero()
    for idx, val in values.items():
        arr[tuple(idx)] = domain.coerce(val)
    return Tensor(dims, domain, arr)


def convert(t: Tensor, domain: Domain) -> Tensor:
    """Convert between scalar domains where the conversion is well defined."""
    if domain == t.domain:
        return t
    src = t.domain
    if src.kind == "Q" and domain.kind == "C":
        arr = np.array([[complex(Fraction(x))] for x in t.entries.flat])
        return Tensor(t.dims, domain, arr.reshape(t.dims))
    if src.kind == "Q" and domain.kind == "Fp":
        p = domain.p
        vals = []
        for x in t.entries.flat:
            f = Fraction(x)
            if f.denominator % p == 0:
                raise ValueError("denominator not invertible mod p")
            vals.append(f.numerator * pow(f.denominator, p - 2, p) % p)
        return Tensor(t.dims, domain, np.array(vals, dtype=object).reshape(t.dims))
    if src.kind == "Fp" and domain.kind == "Q":
        return Tensor(t.dims, domain, t.entries)
    if src.kind == "Fp" and domain.kind == "C":
        return Tensor(t.dims, domain, np.asarray(t.entries.tolist(), dtype=complex))
    raise ValueError(f"cannot convert {src.label} tensor to {domain.label}")


# ---------------------------------------------------------------------------
# semiring operations


def tensor_product(s: Tensor, t: Tensor) -> Tensor:
    if s.k != t.k:
        raise ValueError(f"order mismatch: {s.k} vs {t.k}")
    if s.domain != t.domain:
        raise ValueError(f"domain mismatch: {s.domain.label} vs {t.domain.label}")
    out = np.multiply.outer(s.entries, t.entries)
    k = s.k
    perm = [ax for i in range(k) for ax in (i, k + i)]
    out = out.transpose(perm)
    dims = tuple(sd * td for sd, td in zip(s.dims, t.dims))
    out = out.reshape(dims)
    if s.domain.kind == "Fp":
        out = out % s.domain.p
    return Tensor(dims, s.domain, out)


def direct_sum(s: Tensor, t: Tensor) -> Tensor:
    if s.k != t.k:
        raise ValueError(f"order mismatch: {s.k} vs {t.k}")
    if s.domain != t.domain:
        raise ValueError(f"domain mismatch: {s.domain.label} vs {t.domain.label}")
    dims = tuple(sd + td for sd, td in zip(s.dims, t.dims))
    out = zeros(dims, s.domain).entries.copy()
    out[tuple(slice(0, d) for d in s.dims)] = s.entries
    out[tuple(slice(sd, sd + td) for sd, td in zip(s.dims, t.dims))] = t.entries
    return Tensor(dims, s.domain, out)


def as_matrix(mat, domain: Domain) -> np.ndarray:
    if domain.kind == "C":
        arr = np.asarray(mat, dtype=complex)
    else:
        raw = np.asarray(mat, dtype=object)
        arr = np.empty(raw.shape, dtype=object)
        for idx in np.ndindex(*raw.shape):
            arr[idx] = domain.coerce(raw[idx])
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    return arr


def restrict(t: Tensor, maps) -> Tensor:
    """Contract leg i with maps[i]; maps[i] has shape (m_i, n_i)."""
    if len(maps) != t.k:
        raise ValueError(f"expected {t.k} maps, got {len(maps)}")
    mats = [as_matrix(m, t.domain) for m in maps]
    for i, m in enumerate(mats):
        if m.shape[1] != t.dims[i]:
            raise ValueError(f"map {i} has shape {m.shape}, leg has dim {t.dims[i]}")
    out = t.entries
    for leg, m in enumerate(mats):
        out = np.tensordot(m, out, axes=(1, leg))
        out = np.moveaxis(out, 0, leg)
    if t.domain.kind == "Fp":
        out = out % t.domain.p
    return Tensor(tuple(m.shape[0] for m in mats), t.domain, out)


def permute_leg(t: Tensor, leg: int, perm) -> Tensor:
    """Relabel the index values of one leg: new[.., j, ..] = old[.., perm[j], ..]."""
    perm = list(perm)
    n = t.dims[leg]
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of the leg's index set")
    out = np.take(t.entries, perm, axis=leg)
    return Tensor(t.dims, t.domain, out)


def flattening_matrix(t: Tensor, legs) -> np.ndarray:
    legs = sorted(set(int(i) for i in legs))
    if not legs or len(legs) >= t.k or any(i < 0 or i >= t.k for i in legs):
        raise ValueError(f"legs must be a proper nonempty subset of range({t.k})")
    rest = [i for i in range(t.k) if i not in legs]
    arr = t.entries.transpose(legs + rest)
    nrows = prod(t.dims[i] for i in legs)
    return arr.reshape(nrows, -1)


def flattening_rank(t: Tensor, legs, rel_tol: float = RANK_REL_TOL) -> int:
    mat = flattening_matrix(t, legs)
    if t.domain.kind == "Q":
        return linalg.rank_fraction(mat)
    if t.domain.kind == "Fp":
        return linalg.rank_mod_p(mat, t.domain.p)
    return linalg.rank_complex(mat, rel_tol)


def matrix_rank(mat, domain: Domain, rel_tol: float = RANK_REL_TOL) -> int:
    if domain.kind == "Q":
        return linalg.rank_fraction(mat)
    if domain.kind == "Fp":
        return linalg.rank_mod_p(mat, domain.p)
    return linalg.rank_complex(np.asarray(mat, dtype=complex), rel_tol)


def invert_matrix(mat, domain: Domain) -> np.ndarray:
    try:
        if domain.kind == "Q":
            return linalg.invert_fraction(mat)
        if domain.kind == "Fp":
            return linalg.invert_mod_p(mat, domain.p)
    except ZeroDivisionError as exc:
        raise SingularBasisError(str(exc)) from exc
    arr = np.asarray(mat, dtype=complex)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < 1e-12:
        raise SingularBasisError("matrix numerically singular")
    return np.linalg.inv(arr)


def identity_matrix(n: int, domain: Domain) -> np.ndarray:
    if domain.kind == "C":
        return np.eye(n, dtype=complex)
    arr = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            arr[i, j] = domain.one() if i == j else domain.zero()
    return arr


# ---------------------------------------------------------------------------
# basis tuples


@dataclass(frozen=True, eq=False)
class BasisTuple:
    """One invertible square matrix per leg; columns are the basis vectors."""

    matrices: tuple[np.ndarray, ...]
    domain: Domain

    @classmethod
    def standard(cls, t: Tensor) -> "BasisTuple":
        return cls(tuple(identity_matrix(d, t.domain) for d in t.dims), t.domain)

    @classmethod
    def make(cls, mats, domain: Domain, cond_limit: float = 1e12) -> "BasisTuple":
        checked = []
        for m in mats:
            arr = as_matrix(m, domain)
            if arr.shape[0] != arr.shape[1]:
                raise SingularBasisError("basis matrices must be square")
            n = arr.shape[0]
            if domain.kind == "C":
                sv = np.linalg.svd(arr, compute_uv=False)
                if sv[0] == 0.0 or sv[0] / max(sv[-1], 1e-300) > cond_limit:
                    raise SingularBasisError("basis matrix is ill conditioned")
            else:
                if matrix_rank(arr, domain) != n:
                    raise SingularBasisError("basis matrix has zero determinant")
            checked.append(arr)
        return cls(tuple(checked), domain)

    def inverses(self) -> tuple[np.ndarray, ...]:
        return tuple(invert_matrix(m, self.domain) for m in self.matrices)


def coefficients_in_basis(t: Tensor, basis: BasisTuple) -> Tensor:
    """Coefficient tensor of t with respect to the given basis tuple."""
    if basis.domain != t.domain:
        raise ValueError("basis domain does not match tensor domain")
    return restrict(t, basis.inverses())


# ---------------------------------------------------------------------------
# named families


@dataclass(frozen=True)
class FamilySpec:
    """Tagged constructor choice for the named tensor families."""

    kind: str            # unit | dicke | cw | matmul | polymul | capset
    params: tuple[int, ...]


def unit(r: int, k: int = 3, domain: Domain = RATIONAL) -> Tensor:
    if r < 1 or k < 1:
        raise ValueError("unit tensor needs r >= 1 and k >= 1")
    vals = {(i,) * k: 1 for i in range(r)}
    return from_nonzeros((r,) * k, domain, vals)


def dicke(parts, domain: Domain = RATIONAL) -> Tensor:
    """Sum of all basis tuples whose index multiset matches the partition."""
    parts = tuple(int(x) for x in parts)
    if not parts or any(x < 1 for x in parts) or list(parts) != sorted(parts, reverse=True):
        raise ValueError("expected a partition with positive non-increasing parts")
    k = sum(parts)
    n = len(parts)
    symbols = [i for i, lam in enumerate(parts) for _ in range(lam)]
    vals = {}
    for idx in set(iter_product(*[range(n)] * k)):
        if sorted(idx) == symbols:
            vals[idx] = 1
    return from_nonzeros((n,) * k, domain, vals)


def w_tensor(domain: Domain = RATIONAL) -> Tensor:
    return dicke((2, 1), domain)


def cw(q: int, domain: Domain = RATIONAL) -> Tensor:
    """Unnormalised rank-(3q) tensor with support {(0,i,i),(i,0,i),(i,i,0)}."""
    if q < 1:
        raise ValueError("q must be >= 1")
    vals = {}
    for i in range(1, q + 1):
        vals[(0, i, i)] = 1
        vals[(i, 0, i)] = 1
        vals[(i, i, 0)] = 1
    return from_nonzeros((q + 1,) * 3, domain, vals)


def matmul(a: int, b: int, c: int, domain: Domain = RATIONAL) -> Tensor:
    if min(a, b, c) < 1:
        raise ValueError("matrix multiplication parameters must be positive")
    vals = {}
    for i in range(a):
        for j in range(b):
            for l in range(c):
                vals[(i * b + j, j * c + l, l * a + i)] = 1
    return from_nonzeros((a * b, b * c, c * a), domain, vals)


def poly_mult_mod(n: int, domain: Domain = RATIONAL) -> Tensor:
    """Structure tensor of truncated polynomial multiplication mod x^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vals = {(a1, a2, a1 + a2): 1
            for a1 in range(n) for a2 in range(n) if a1 + a2 < n}
    return from_nonzeros((n, n, n), domain, vals)


def cap_set_tensor(m: int, p: int) -> Tensor:
    """Indicator of alpha_1 + alpha_2 + alpha_3 = 0 mod m, over F_p."""
    if m < 2:
        raise ValueError("m must be >= 2")
    dom = prime_field(p)
    vals = {}
    for idx in iter_product(range(m), repeat=3):
        if sum(idx) % m == 0:
            vals[idx] = 1
    return from_nonzeros((m, m, m), dom, vals)


def build_family(spec: FamilySpec, domain: Domain | None = None) -> Tensor:
    kind = spec.kind
    params = spec.params
    if kind == "unit":
        r = params[0]
        k = params[1] if len(params) > 1 else 3
        return unit(r, k, domain or RATIONAL)
    if kind == "dicke":
        return dicke(params, domain or RATIONAL)
    if kind == "cw":
        (q,) = params
        return cw(q, domain or RATIONAL)
    if kind == "matmul":
        a, b, c = params
        return matmul(a, b, c, domain or RATIONAL)
    if kind == "polymul":
        (n,) = params
        return poly_mult_mod(n, domain or RATIONAL)
    if kind == "capset":
        m, p = params
        if domain is not None and domain != prime_field(p):
            raise ValueError("cap set tensors live over F_p")
        return cap_set_tensor(m, p)
    raise ValueError(f"unknown family {kind!r}")


def parse_family(text: str) -> FamilySpec:
    """Parse strings like 'unit:3', 'cw:2', 'dicke:2,1', 'W'."""
    text = text.strip()
    if text.lower() == "w":
        return FamilySpec("dicke", (2, 1))
    if ":" not in text:
        raise ValueError(f"cannot parse family {text!r}")
    kind, _, rhs = text.partition(":")
    kind = kind.strip().lower()
    try:
        params = tuple(int(x) for x in rhs.split(","))
    except ValueError as exc:
        raise ValueError(f"bad family parameters in {text!r}") from exc
    aliases = {"unit": "unit", "dicke": "dicke", "cw": "cw", "matmul": "matmul",
               "polymul": "polymul", "capset": "capset", "w": "dicke"}
    if kind not in aliases:
        raise ValueError(f"unknown family {kind!r}")
    return FamilySpec(aliases[kind], params)


# ---------------------------------------------------------------------------
# text format
#
# header: `k d_1 ... d_k domain` with domain in {Q, C, Fp:<p>}; then one line
# `i_1 ... i_k value` per nonzero entry, 0-based indices.


def _format_value(v, domain: Domain) -> str:
    if domain.kind == "Q":
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"
    if domain.kind == "Fp":
        return str(int(v))
    re_, im = v.real, v.imag
    return f"{re_:.17g}{im:+.17g}i"


_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$")


def _parse_value(text: str, domain: Domain):
    text = text.strip()
    if domain.kind == "Q":
        return Fraction(text)
    if domain.kind == "Fp":
        return int(text)
    m = _COMPLEX_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse complex value {text!r}")
    return complex(float(m.group("re")), float(m.group("im")))


def dumps_tensor(t: Tensor, tol: float = COMPLEX_ZERO_TOL) -> str:
    lines = [f"{t.k} {' '.join(str(d) for d in t.dims)} {t.domain.label}"]
    for idx in t.nonzero_indices(tol):
        lines.append(f"{' '.join(str(i) for i in idx)} {_format_value(t.entries[idx], t.domain)}")
    return "\n".join(lines) + "\n"


def loads_tensor(text: str) -> Tensor:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty tensor file")
    head = lines[0].split()
    k = int(head[0])
    if len(head) != k + 2:
        raise ValueError("malformed tensor header")
    dims = tuple(int(x) for x in head[1:1 + k])
    domain = parse_domain(head[k + 1])
    vals = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != k + 1:
            raise ValueError(f"malformed entry line {ln!r}")
        idx = tuple(int(x) for x in parts[:k])
        if any(i < 0 or i >= d for i, d in zip(idx, dims)):
            raise ValueError(f"index out of bounds in line {ln!r}")
        vals[idx] = _parse_value(parts[k], domain)
    return from_nonzeros(dims, domain, vals)


def save_tensor(t: Tensor, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_tensor(t))


def load_tensor(path) -> Tensor:
    with open(path, "r", encoding="ascii") as fh:
        return loads_tensor(fh.read())


def entry_multiset(t: Tensor, tol: float = COMPLEX_ZERO_TOL):
    """Sorted nonzero entries; useful for equality up to index relabeling."""
    vals = [t.entries[idx] for idx in t.nonzero_indices(tol)]
    if t.domain.kind == "C":
        return sorted((v.real, v.imag) for v in vals)
    return sorted(vals)


def binomial_basis_matrix(m: int, p: int) -> np.ndarray:
    """Lower triangular matrix B[x, a] = binom(x, a) mod p."""
    dom = prime_field(p)
    arr = np.empty((m, m), dtype=object)
    for x in range(m):
        for a in range(m):
            arr[x, a] = comb(x, a) % p if a <= x else 0
    return as_matrix(arr, dom)
