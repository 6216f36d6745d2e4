"""Integer chain complexes, Smith normal form, and integral / mod-p homology.

Smith normal form is computed by row/column elimination with a
smallest-pivot strategy.  Arithmetic runs on int64 and every in-place update
is bounds-checked first; if an update could overflow a machine word the whole
computation restarts on an object-dtype matrix holding arbitrary-precision
Python integers.  The transforms U, V and their inverses are maintained
throughout, so every factorization ships with its own certificate
(U A V = D, U Uinv = I, V Vinv = I) that ``SNFResult.verify`` checks with
exact arithmetic.

Homology of a complex  ... -> C_{k+1} -> C_k -> C_{k-1} -> ...  is returned
as free rank plus torsion chain, with optional explicit generator cycles
obtained from the change-of-basis matrices (columns of V beyond the rank of
the boundary span its kernel; the cokernel presentation in that kernel basis
yields generators and their orders).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_CONFIG,
    CapExceeded,
    InputError,
    InvariantViolation,
    RunConfig,
    VerificationFailure,
)

_INT64_GUARD = 2**62


class _Promote(Exception):
    """Raised internally when an int64 update could overflow."""


def _identity(n: int, as_object: bool) -> np.ndarray:
    if as_object:
        M = np.zeros((n, n), dtype=object)
    else:
        M = np.zeros((n, n), dtype=np.int64)
    if n:
        idx = np.arange(n)
        M[idx, idx] = 1
    return M


@dataclass
class SNFResult:
    """U @ A @ V == D with D diagonal, d_i >= 0 and d_i | d_{i+1}."""

    D: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Uinv: np.ndarray
    Vinv: np.ndarray

    @property
    def diagonal(self) -> Tuple[int, ...]:
        k = min(self.D.shape)
        return tuple(int(self.D[i, i]) for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diagonal if d > 1)

    def kernel_basis(self) -> np.ndarray:
        """Columns spanning ker A (in the domain basis)."""
        return self.V[:, self.rank:]

    def verify(self, A: np.ndarray, samples: int = 8, seed: int = 0) -> None:
        """Exact certificate check; raises VerificationFailure on any defect.

        Diagonality and the divisibility chain are checked in full.  The
        matrix identities are checked exactly on small matrices and by exact
        arbitrary-precision probes (U(A(Vx)) == Dx and similar) on large ones.
        """
        D, U, V = self.D, self.U, self.V
        m, n = np.asarray(A).shape
        if D.shape != (m, n) or U.shape != (m, m) or V.shape != (n, n):
            raise VerificationFailure("certificate shape mismatch")
        diag = self.diagonal
        off = np.asarray(D, dtype=object).copy()
        for i in range(min(m, n)):
            off[i, i] = 0
        if any(x != 0 for x in off.flat):
            raise VerificationFailure("D is not diagonal")
        if any(d < 0 for d in diag):
            raise VerificationFailure("negative diagonal entry")
        for a, b in zip(diag, diag[1:]):
            if b and not a:
                raise VerificationFailure("zero precedes nonzero on diagonal")
            if a and b % a != 0:
                raise VerificationFailure(f"divisibility chain broken: {a} then {b}")
        Ao = np.asarray(A, dtype=object)
        Uo, Vo = U.astype(object), V.astype(object)
        Uio, Vio = self.Uinv.astype(object), self.Vinv.astype(object)
        Do = D.astype(object)
        if max(m, n) <= 96:
            if not np.array_equal(Uo @ Ao @ Vo, Do):
                raise VerificationFailure("U A V != D")
            if not np.array_equal(Uo @ Uio, _identity(m, True)):
                raise VerificationFailure("U Uinv != I")
            if not np.array_equal(Vo @ Vio, _identity(n, True)):
                raise VerificationFailure("V Vinv != I")
            return
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            x = rng.integers(-9, 10, size=n).astype(object)
            if not np.array_equal(Uo @ (Ao @ (Vo @ x)), Do @ x):
                raise VerificationFailure("U A V != D (probe)")
            if not np.array_equal(Vo @ (Vio @ x), x):
                raise VerificationFailure("V Vinv != I (probe)")
            y = rng.integers(-9, 10, size=m).astype(object)
            if not np.array_equal(Uo @ (Uio @ y), y):
                raise VerificationFailure("U Uinv != I (probe)")


class _Eliminator:
    """Mutable SNF state: the working matrix plus all four transforms."""

    def __init__(self, A: np.ndarray, fast: bool, certificates: bool = True):
        self.fast = fast
        self.certificates = certificates
        dtype = np.int64 if fast else object
        self.B = np.array(A, dtype=dtype, copy=True)
        m, n = self.B.shape
        if certificates:
            self.U = _identity(m, not fast)
            self.Uinv = _identity(m, not fast)
            self.V = _identity(n, not fast)
            self.Vinv = _identity(n, not fast)
        else:
            self.U = self.Uinv = self.V = self.Vinv = None

    # -- bounds checking -------------------------------------------------
    def _guard(self, *arrays) -> None:
        if not self.fast:
            return
        bound = 0
        for a in arrays:
            if a.size:
                bound = max(bound, int(np.abs(a).max()))
        # worst-case |x - q*y| <= |x| + |q||y| <= bound + bound*bound
        if bound * (bound + 1) >= _INT64_GUARD:
            raise _Promote

    # -- elementary operations --------------------------------------------
    def row_swap(self, i: int, j: int) -> None:
        if i == j:
            return
        self.B[[i, j]] = self.B[[j, i]]
        if self.certificates:
            self.U[[i, j]] = self.U[[j, i]]
            self.Uinv[:, [i, j]] = self.Uinv[:, [j, i]]

    def col_swap(self, i: int, j: int) -> None:
        if i == j:
            return
        self.B[:, [i, j]] = self.B[:, [j, i]]
        if self.certificates:
            self.V[:, [i, j]] = self.V[:, [j, i]]
            self.Vinv[[i, j]] = self.Vinv[[j, i]]

    def row_negate(self, i: int) -> None:
        self.B[i] = -self.B[i]
        if self.certificates:
            self.U[i] = -self.U[i]
            self.Uinv[:, i] = -self.Uinv[:, i]

    def rows_submul(self, t: int, q: np.ndarray) -> None:
        """rows t+1.. -= q * row t (q aligned with rows below t)."""
        if self.certificates:
            self._guard(self.B[t + 1:], self.B[t], q, self.U[t + 1:],
                        self.U[t], self.Uinv)
        else:
            self._guard(self.B[t + 1:], self.B[t], q)
        self.B[t + 1:] -= np.outer(q, self.B[t])
        if self.certificates:
            self.U[t + 1:] -= np.outer(q, self.U[t])
            self.Uinv[:, t] += self.Uinv[:, t + 1:] @ q

    def cols_submul(self, t: int, q: np.ndarray) -> None:
        """cols t+1.. -= q * col t."""
        if self.certificates:
            self._guard(self.B[:, t + 1:], self.B[:, t], q, self.V[:, t + 1:],
                        self.V[:, t], self.Vinv)
        else:
            self._guard(self.B[:, t + 1:], self.B[:, t], q)
        self.B[:, t + 1:] -= np.outer(self.B[:, t], q)
        if self.certificates:
            self.V[:, t + 1:] -= np.outer(self.V[:, t], q)
            self.Vinv[t] += q @ self.Vinv[t + 1:]

    def col_add_into(self, t: int, j: int) -> None:
        """col t += col j (used to pull a bad divisibility witness into play)."""
        if self.certificates:
            self._guard(self.B[:, t], self.B[:, j], self.V[:, t],
                        self.V[:, j], self.Vinv[t], self.Vinv[j])
        else:
            self._guard(self.B[:, t], self.B[:, j])
        self.B[:, t] += self.B[:, j]
        if self.certificates:
            self.V[:, t] += self.V[:, j]
            self.Vinv[j] -= self.Vinv[t]


def _snf_run(A: np.ndarray, fast: bool,
             certificates: bool = True) -> SNFResult:
    w = _Eliminator(A, fast, certificates)
    B = w.B
    m, n = B.shape
    steps = min(m, n)
    t = 0
    while t < steps:
        sub = B[t:, t:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        vals = np.abs(sub[nz])
        k = int(np.argmin(vals))
        w.row_swap(t, t + int(nz[0][k]))
        w.col_swap(t, t + int(nz[1][k]))
        if B[t, t] < 0:
            w.row_negate(t)
        while True:
            # clear below the pivot
            col = B[t + 1:, t]
            if col.size and np.any(col != 0):
                q = col // B[t, t]
                if np.any(q != 0):
                    w.rows_submul(t, q)
                col = B[t + 1:, t]
                if np.any(col != 0):
                    live = np.nonzero(col)[0]
                    i = live[int(np.argmin(np.abs(col[live])))]
                    w.row_swap(t, t + 1 + int(i))
                    if B[t, t] < 0:
                        w.row_negate(t)
                    continue
            # clear to the right of the pivot
            row = B[t, t + 1:]
            if row.size and np.any(row != 0):
                q = row // B[t, t]
                if np.any(q != 0):
                    w.cols_submul(t, q)
                row = B[t, t + 1:]
                if np.any(row != 0):
                    live = np.nonzero(row)[0]
                    j = live[int(np.argmin(np.abs(row[live])))]
                    w.col_swap(t, t + 1 + int(j))
                    if B[t, t] < 0:
                        w.row_negate(t)
                    continue
                continue  # clearing the row may have dirtied the column
            break
        # divisibility: the pivot must divide the rest of the submatrix
        d = int(B[t, t])
        if d and t + 1 < m and t + 1 < n:
            rem = B[t + 1:, t + 1:] % d
            bad = np.nonzero(rem)
            if len(bad[0]):
                w.col_add_into(t, t + 1 + int(bad[1][0]))
                continue  # re-reduce this pivot; gcd strictly shrinks it
        t += 1
    return SNFResult(D=B, U=w.U, V=w.V, Uinv=w.Uinv, Vinv=w.Vinv)


def smith_normal_form(A, config: RunConfig = DEFAULT_CONFIG) -> SNFResult:
    """Smith normal form with transform certificates.

    Accepts any integer matrix (nested lists or ndarray).  Promotes from the
    int64 fast path to arbitrary precision automatically if intermediate
    values grow too large.
    """
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise InputError("expected a 2-d integer matrix")
    if max(arr.shape) > config.homology_rank_cap:
        raise CapExceeded("homology_rank_cap", config.homology_rank_cap,
                          max(arr.shape), "matrix too large for SNF")
    if arr.dtype == object:
        return _snf_run(arr, fast=False)
    if not np.issubdtype(arr.dtype, np.integer):
        if arr.size and not np.array_equal(arr, arr.astype(np.int64)):
            raise InputError("matrix entries must be integers")
        arr = arr.astype(np.int64)
    try:
        return _snf_run(arr, fast=True)
    except _Promote:
        return _snf_run(arr.astype(object), fast=False)


def smith_diagonal(A, config: RunConfig = DEFAULT_CONFIG) -> Tuple[int, ...]:
    """Nonzero invariant factors d_1 | d_2 | ... without any certificates.

    Same elimination as ``smith_normal_form`` but with no transform
    tracking, so it is considerably faster on wide matrices; use it when
    only ranks and torsion are needed.
    """
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise InputError("expected a 2-d integer matrix")
    if max(arr.shape) > config.homology_rank_cap:
        raise CapExceeded("homology_rank_cap", config.homology_rank_cap,
                          max(arr.shape), "matrix too large for SNF")
    if arr.dtype != object:
        if not np.issubdtype(arr.dtype, np.integer):
            if arr.size and not np.array_equal(arr, arr.astype(np.int64)):
                raise InputError("matrix entries must be integers")
            arr = arr.astype(np.int64)
        try:
            diag = _snf_run(arr, fast=True, certificates=False).diagonal
            return tuple(d for d in diag if d)
        except _Promote:
            pass
    diag = _snf_run(arr.astype(object), fast=False,
                    certificates=False).diagonal
    return tuple(d for d in diag if d)


# ---------------------------------------------------------------------------
# mod-p linear algebra


def rank_mod_p(A, p: int) -> int:
    """Rank over F_p by exact elimination (entries reduced mod p)."""
    B = np.asarray(A, dtype=object) % p
    B = B.astype(np.int64)
    m, n = B.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        live = np.nonzero(B[r:, c])[0]
        if live.size == 0:
            continue
        i = r + int(live[0])
        if i != r:
            B[[r, i]] = B[[i, r]]
        inv = pow(int(B[r, c]), -1, p)
        B[r] = (B[r] * inv) % p
        col = B[:, c].copy()
        col[r] = 0
        B = (B - np.outer(col, B[r])) % p
        r += 1
    return r


def exact_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A @ B with exact integer arithmetic.

    Stays on the machine-integer fast path when a worst-case bound rules
    out overflow, otherwise promotes to Python integers.
    """
    if A.size == 0 or B.size == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=A.dtype)
    if A.dtype != object and B.dtype != object:
        bound = (int(np.abs(A).max()) * int(np.abs(B).max())
                 * max(A.shape[1], 1))
        if bound < 2**62:
            return A @ B
    return A.astype(object) @ B.astype(object)


# ---------------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class HomologyGroup:
    """H ~ Z^free_rank + sum Z/d over the torsion chain (each d > 1).

    When generators were requested, ``generators`` holds one chain per column
    (torsion generators first) and ``orders`` the matching orders, 0 meaning
    infinite.
    """

    free_rank: int
    torsion: Tuple[int, ...]
    generators: Optional[np.ndarray] = None
    orders: Tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def describe(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion),
                "pretty": self.describe()}


class ChainComplex:
    """Finitely generated complex of free Z-modules over a degree range.

    ``dims[k]`` is the rank of C_k; ``boundary(k)`` is the matrix of
    C_k -> C_{k-1} (shape dims[k-1] x dims[k]).  Degrees outside the stored
    range are zero modules.  A reduced simplicial complex stores the
    augmentation as the boundary from degree 0 to degree -1.
    """

    def __init__(self, dims: Dict[int, int],
                 boundaries: Dict[int, np.ndarray],
                 labels: Optional[Dict[int, Sequence[str]]] = None,
                 check: bool = True):
        self.dims = {int(k): int(v) for k, v in dims.items() if v}
        self.boundaries = {}
        for k, M in boundaries.items():
            M = np.asarray(M, dtype=np.int64)
            if M.size == 0 and 0 in M.shape:
                continue
            self.boundaries[int(k)] = M
        self.labels = {int(k): list(v) for k, v in (labels or {}).items()}
        if check:
            self._check_shapes()
            self._check_square_zero()

    # -- structure ---------------------------------------------------------
    @property
    def bottom_degree(self) -> int:
        return min(self.dims) if self.dims else 0

    @property
    def top_degree(self) -> int:
        return max(self.dims) if self.dims else -1

    def degrees(self) -> range:
        if not self.dims:
            return range(0)
        return range(self.bottom_degree, self.top_degree + 1)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def boundary(self, k: int) -> np.ndarray:
        M = self.boundaries.get(k)
        if M is not None:
            return M
        return np.zeros((self.dim(k - 1), self.dim(k)), dtype=np.int64)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * v for k, v in self.dims.items())

    def _check_shapes(self) -> None:
        for k, M in self.boundaries.items():
            want = (self.dim(k - 1), self.dim(k))
            if M.shape != want:
                raise InputError(
                    f"boundary {k} has shape {M.shape}, expected {want}")

    def _check_square_zero(self) -> None:
        for k in list(self.boundaries):
            upper = self.boundaries.get(k + 1)
            if upper is None:
                continue
            prod = exact_matmul(self.boundary(k), upper)
            if prod.size and prod.any():
                raise InvariantViolation(
                    f"boundary of boundary is nonzero between degrees "
                    f"{k + 1} and {k - 1}")

    # -- homology -----------------------------------------------------------
    def homology(self, k: int, want_generators: bool = False,
                 config: RunConfig = DEFAULT_CONFIG) -> HomologyGroup:
        nk = self.dim(k)
        if nk == 0:
            return HomologyGroup(0, ())
        A = self.boundary(k)       # C_k -> C_{k-1}
        B = self.boundary(k + 1)   # C_{k+1} -> C_k
        snf_a = smith_normal_form(A, config)
        r = snf_a.rank
        z = nk - r  # cycle rank
        # coordinates of the image inside the kernel basis
        coords = exact_matmul(snf_a.Vinv, B)
        if r and coords[:r].size and coords[:r].any():
            raise InvariantViolation("image chains are not cycles")
        M = coords[r:, :]
        snf_m = smith_normal_form(M, config)
        diag = snf_m.diagonal
        torsion = tuple(int(d) for d in diag if d > 1)
        free_rank = z - snf_m.rank
        if not want_generators:
            return HomologyGroup(free_rank, torsion)
        kernel = snf_a.kernel_basis()  # nk x z
        pick: List[int] = []
        orders: List[int] = []
        for i, d in enumerate(diag):
            if d > 1:
                pick.append(i)
                orders.append(int(d))
        for i in range(snf_m.rank, z):
            pick.append(i)
            orders.append(0)
        gens = (exact_matmul(kernel, snf_m.Uinv[:, pick]).astype(object)
                if pick else np.zeros((nk, 0), dtype=object))
        return HomologyGroup(free_rank, torsion, generators=gens,
                             orders=tuple(orders))

    def homology_all(self, config: RunConfig = DEFAULT_CONFIG
                     ) -> Dict[int, HomologyGroup]:
        return {k: self.homology(k, config=config) for k in self.degrees()}

    def betti_mod_p(self, k: int, p: int) -> int:
        nk = self.dim(k)
        if nk == 0:
            return 0
        return nk - rank_mod_p(self.boundary(k), p) - rank_mod_p(
            self.boundary(k + 1), p)

    def is_p_acyclic(self, p: int) -> bool:
        """True when every homology group over F_p vanishes.

        An empty complex is not p-acyclic: a reduced complex keeps its
        augmentation column, so emptiness shows up in degree -1.
        """
        if not self.dims:
            return False
        return all(self.betti_mod_p(k, p) == 0 for k in self.degrees())

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def describe(self) -> str:
        rng = ", ".join(f"C_{k}=Z^{self.dim(k)}" for k in self.degrees())
        return f"ChainComplex({rng})"


def p_primary_part(torsion: Iterable[int], p: int) -> Tuple[int, ...]:
    """The p-power factors of each torsion coefficient (1s dropped)."""
    out = []
    for d in torsion:
        q = 1
        while d % p == 0:
            q *= p
            d //= p
        if q > 1:
            out.append(q)
    return tuple(out)
