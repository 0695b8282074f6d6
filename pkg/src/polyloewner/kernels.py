"""Dense-array jet kernels for the evolution hot loops.

Jets living on a fixed basis (all multi-indices of total degree <= D,
graded-lex order) are stored as complex vectors of length B, and a jet
map as an (n, B) matrix.  Multiplication is a fixed sparse pairing
table; composition builds the monomial matrix M[k] = inner**alpha_k by
single-step recursion (each monomial is a parent monomial times one
inner component) and finishes with a matrix product.

Two interchangeable backends implement the same semantics:

* ``numba``: @njit kernels with explicit loops, used by default when
  numba is importable;
* ``numpy``: vectorized layer-at-a-time products, always available.

Set the environment variable ``POLYLOEWNER_NO_NUMBA=1`` to make numpy
the default; an explicit ``backend=`` argument overrides either way.
``benchmarks/bench_kernels.py`` times one against the other.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .jets import DomainError, JetMap, JetShapeError, MultiJet, Normalization, multiindices

__all__ = [
    "BasisTables",
    "basis_tables",
    "map_to_array",
    "array_to_map",
    "identity_array",
    "available_backends",
    "default_backend",
    "mul_arrays",
    "compose_arrays",
    "rk4_jet_arrays",
]

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

_ENV_DISABLED = os.environ.get("POLYLOEWNER_NO_NUMBA", "").strip().lower() not in (
    "",
    "0",
    "false",
)


@dataclass(frozen=True, eq=False)
class BasisTables:
    """Precomputed index tables for one (dim, degree) dense jet basis."""

    dim: int
    degree: int
    alphas: tuple[tuple[int, ...], ...]
    index: dict
    alpha_matrix: np.ndarray      # (B, dim) exponents
    degrees: np.ndarray           # (B,) total degrees
    mul_i: np.ndarray             # pairing table: basis[i]*basis[j] -> basis[k]
    mul_j: np.ndarray
    mul_k: np.ndarray
    parent: np.ndarray            # monomial recursion: alpha = parent + e_{parent_var}
    parent_var: np.ndarray
    layers: tuple[np.ndarray, ...]  # basis indices grouped by total degree

    @property
    def size(self) -> int:
        return len(self.alphas)

    @cached_property
    def mul_matrix(self) -> np.ndarray:
        """(B*B, B) complex 0/1 matrix encoding the pairing table."""
        B = self.size
        out = np.zeros((B * B, B), dtype=np.complex128)
        out[self.mul_i * B + self.mul_j, self.mul_k] = 1.0
        return out


@lru_cache(maxsize=None)
def basis_tables(dim: int, degree: int) -> BasisTables:
    if dim < 1 or degree < 1:
        raise JetShapeError(f"need dim >= 1 and degree >= 1, got ({dim}, {degree})")
    alphas = tuple(multiindices(dim, degree))
    index = {a: k for k, a in enumerate(alphas)}
    B = len(alphas)
    alpha_matrix = np.array(alphas, dtype=np.int64)
    degrees = alpha_matrix.sum(axis=1)

    mi, mj, mk = [], [], []
    for i, a in enumerate(alphas):
        for j, b in enumerate(alphas):
            if degrees[i] + degrees[j] > degree:
                continue
            k = index[tuple(x + y for x, y in zip(a, b))]
            mi.append(i)
            mj.append(j)
            mk.append(k)

    parent = np.full(B, -1, dtype=np.int64)
    parent_var = np.zeros(B, dtype=np.int64)
    for k, a in enumerate(alphas):
        if degrees[k] == 0:
            continue
        var = next(v for v, x in enumerate(a) if x > 0)
        p = list(a)
        p[var] -= 1
        parent[k] = index[tuple(p)]
        parent_var[k] = var

    layers = tuple(
        np.nonzero(degrees == d)[0].astype(np.int64) for d in range(degree + 1)
    )
    return BasisTables(
        dim=dim,
        degree=degree,
        alphas=alphas,
        index=index,
        alpha_matrix=alpha_matrix,
        degrees=degrees,
        mul_i=np.array(mi, dtype=np.int64),
        mul_j=np.array(mj, dtype=np.int64),
        mul_k=np.array(mk, dtype=np.int64),
        parent=parent,
        parent_var=parent_var,
        layers=layers,
    )


# -- conversions ----------------------------------------------------------


def map_to_array(f: JetMap, tables: BasisTables) -> np.ndarray:
    if f.dim != tables.dim:
        raise JetShapeError(f"map dim {f.dim} does not match tables dim {tables.dim}")
    out = np.zeros((f.dim, tables.size), dtype=np.complex128)
    for i, comp in enumerate(f.components):
        for alpha, c in comp.coeffs.items():
            k = tables.index.get(alpha)
            if k is not None:
                out[i, k] = c
    return out


def array_to_map(
    arr: np.ndarray,
    tables: BasisTables,
    normalization: Normalization = Normalization.GENERAL,
) -> JetMap:
    n, B = arr.shape
    if n != tables.dim or B != tables.size:
        raise JetShapeError(f"array shape {arr.shape} does not match tables")
    comps = []
    for i in range(n):
        coeffs = {tables.alphas[k]: complex(arr[i, k]) for k in range(B) if arr[i, k] != 0}
        comps.append(MultiJet(tables.dim, tables.degree, coeffs))
    return JetMap(tuple(comps), normalization)


def identity_array(tables: BasisTables) -> np.ndarray:
    out = np.zeros((tables.dim, tables.size), dtype=np.complex128)
    for j in range(tables.dim):
        e = tuple(1 if v == j else 0 for v in range(tables.dim))
        out[j, tables.index[e]] = 1.0
    return out


# -- numpy backend --------------------------------------------------------


def _mul_np(a: np.ndarray, b: np.ndarray, t: BasisTables) -> np.ndarray:
    B = t.size
    return (a[:, None] * b[None, :]).reshape(B * B) @ t.mul_matrix


def _monomials_np(inner: np.ndarray, t: BasisTables) -> np.ndarray:
    B = t.size
    M = np.zeros((B, B), dtype=np.complex128)
    M[0, 0] = 1.0
    T2 = t.mul_matrix
    for idx in t.layers[1:]:
        P = M[t.parent[idx]]
        V = inner[t.parent_var[idx]]
        M[idx] = ((P[:, :, None] * V[:, None, :]).reshape(len(idx), B * B)) @ T2
    return M


def _compose_np(outer: np.ndarray, inner: np.ndarray, t: BasisTables) -> np.ndarray:
    return outer @ _monomials_np(inner, t)


def _rk4_np(gen: np.ndarray, state: np.ndarray, hs: np.ndarray, t: BasisTables) -> np.ndarray:
    y = state.copy()
    for h in hs:
        k1 = _compose_np(gen, y, t)
        k2 = _compose_np(gen, y + (0.5 * h) * k1, t)
        k3 = _compose_np(gen, y + (0.5 * h) * k2, t)
        k4 = _compose_np(gen, y + h * k3, t)
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


# -- numba backend --------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _compose_into_nb(outer, inner, mi, mj, mk, parent, pvar, M, out):
        B = M.shape[0]
        n = outer.shape[0]
        M[:, :] = 0.0
        M[0, 0] = 1.0
        for k in range(1, B):
            prow = M[parent[k]]
            v = inner[pvar[k]]
            for s in range(mi.size):
                M[k, mk[s]] += prow[mi[s]] * v[mj[s]]
        for i in range(n):
            for k in range(B):
                acc = 0.0 + 0.0j
                for j in range(B):
                    acc += outer[i, j] * M[j, k]
                out[i, k] = acc

    @njit(cache=True)
    def _rk4_nb(gen, state, hs, mi, mj, mk, parent, pvar):
        n, B = state.shape
        y = state.copy()
        M = np.zeros((B, B), dtype=np.complex128)
        k1 = np.zeros((n, B), dtype=np.complex128)
        k2 = np.zeros((n, B), dtype=np.complex128)
        k3 = np.zeros((n, B), dtype=np.complex128)
        k4 = np.zeros((n, B), dtype=np.complex128)
        tmp = np.zeros((n, B), dtype=np.complex128)
        for s in range(hs.size):
            h = hs[s]
            _compose_into_nb(gen, y, mi, mj, mk, parent, pvar, M, k1)
            for i in range(n):
                for k in range(B):
                    tmp[i, k] = y[i, k] + 0.5 * h * k1[i, k]
            _compose_into_nb(gen, tmp, mi, mj, mk, parent, pvar, M, k2)
            for i in range(n):
                for k in range(B):
                    tmp[i, k] = y[i, k] + 0.5 * h * k2[i, k]
            _compose_into_nb(gen, tmp, mi, mj, mk, parent, pvar, M, k3)
            for i in range(n):
                for k in range(B):
                    tmp[i, k] = y[i, k] + h * k3[i, k]
            _compose_into_nb(gen, tmp, mi, mj, mk, parent, pvar, M, k4)
            for i in range(n):
                for k in range(B):
                    y[i, k] += (h / 6.0) * (
                        k1[i, k] + 2.0 * k2[i, k] + 2.0 * k3[i, k] + k4[i, k]
                    )
        return y

    def _mul_nb_wrap(a, b, t):
        out = np.zeros(t.size, dtype=np.complex128)
        _mul_into_nb(a, b, t.mul_i, t.mul_j, t.mul_k, out)
        return out

    @njit(cache=True)
    def _mul_into_nb(a, b, mi, mj, mk, out):
        for s in range(mi.size):
            out[mk[s]] += a[mi[s]] * b[mj[s]]

    def _compose_nb_wrap(outer, inner, t):
        B = t.size
        M = np.zeros((B, B), dtype=np.complex128)
        out = np.zeros((outer.shape[0], B), dtype=np.complex128)
        _compose_into_nb(outer, inner, t.mul_i, t.mul_j, t.mul_k, t.parent, t.parent_var, M, out)
        return out

    def _rk4_nb_wrap(gen, state, hs, t):
        return _rk4_nb(
            np.ascontiguousarray(gen),
            np.ascontiguousarray(state),
            np.ascontiguousarray(hs, dtype=np.float64),
            t.mul_i,
            t.mul_j,
            t.mul_k,
            t.parent,
            t.parent_var,
        )


# -- dispatch -------------------------------------------------------------


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def default_backend() -> str:
    return "numba" if (HAVE_NUMBA and not _ENV_DISABLED) else "numpy"


def _resolve(backend: str | None) -> str:
    b = backend or default_backend()
    if b not in ("numba", "numpy"):
        raise DomainError(f"unknown backend {b!r}")
    if b == "numba" and not HAVE_NUMBA:
        raise DomainError("numba backend requested but numba is not importable")
    return b


def mul_arrays(a: np.ndarray, b: np.ndarray, tables: BasisTables, backend: str | None = None) -> np.ndarray:
    if _resolve(backend) == "numba":
        return _mul_nb_wrap(a, b, tables)
    return _mul_np(a, b, tables)


def compose_arrays(
    outer: np.ndarray, inner: np.ndarray, tables: BasisTables, backend: str | None = None
) -> np.ndarray:
    if _resolve(backend) == "numba":
        return _compose_nb_wrap(outer, inner, tables)
    return _compose_np(outer, inner, tables)


def rk4_jet_arrays(
    gen: np.ndarray,
    state: np.ndarray,
    hs: np.ndarray,
    tables: BasisTables,
    backend: str | None = None,
) -> np.ndarray:
    """Advance the jet ODE state' = gen o state through the given steps."""
    hs = np.asarray(hs, dtype=np.float64)
    if hs.size == 0:
        return state.copy()
    if _resolve(backend) == "numba":
        return _rk4_nb_wrap(gen, state, hs, tables)
    return _rk4_np(gen, state, hs, tables)
