"""Point counts of the fiber cubics of E_a over F_q.

Fibers are counted on the rescaled integral model (X' = t^2 X, Y' = t^3 Y)

    Y^2 = X (X^2 + 2(a + 1 + a t^2) X + t^4)

which is F_q-isomorphic to the defining model for t != 0 and specialises
to the nodal cubic Y^2 = X^2 (X + 2(a+1)) at t = 0.  At t = infinity the
model is Y^2 = X (X^2 + 2a X + 1).  Singular fibers are plane cubics with
the node counted once.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import OracleBoundExceeded
from .fibration import INF, ProjPoint, check_good
from .ff import ExtFieldElem, FieldSpec, chi_table, quad_char, vec_elements, vindex, vmul, vsq

DEFAULT_ORACLE_BOUND = 20_000
# below this size the character sum calls quad_char directly
CHI_TABLE_THRESHOLD = 512
# rows of t^2 values evaluated per numpy block; keeps memory O(q)
BLOCK_ROWS = 32


@dataclass(frozen=True)
class FiberCubic:
    """f(X) = X^3 + c2 X^2 + c1 X + c0 for the fiber of E_a over t."""

    c2: ExtFieldElem
    c1: ExtFieldElem
    c0: ExtFieldElem
    a: ExtFieldElem
    t: ProjPoint

    def __call__(self, x: ExtFieldElem) -> ExtFieldElem:
        return ((x + self.c2) * x + self.c1) * x + self.c0

    @property
    def smooth(self) -> bool:
        # X (X^2 + c2 X + c1) is squarefree iff c1 != 0 and c2^2 != 4 c1
        return bool(self.c1) and bool(self.c2 * self.c2 - 4 * self.c1)

    def __str__(self):
        return f"X^3 + ({self.c2})X^2 + ({self.c1})X + ({self.c0})"


@dataclass(frozen=True)
class FiberCount:
    N: int
    t: ProjPoint
    smooth: bool


def fiber_cubic(a: ExtFieldElem, t: ProjPoint) -> FiberCubic:
    check_good(a)
    spec = a.spec
    if t is INF:
        return FiberCubic(2 * a, spec.one, spec.zero, a, t)
    t2 = t * t
    return FiberCubic(2 * (a + 1 + a * t2), t2 * t2, spec.zero, a, t)


def fiber_count_charsum(a: ExtFieldElem, t: ProjPoint, spec: FieldSpec | None = None) -> FiberCount:
    """N = q + 1 + sum over X in F_q of quad_char(f(X))."""
    spec = spec or a.spec
    f = fiber_cubic(a, t)
    if spec.q <= CHI_TABLE_THRESHOLD:
        total = sum(quad_char(f(x)) for x in spec.elements())
    else:
        total = int(_charsum_rows(spec, [(f.c2.c0, f.c2.c1, f.c1.c0, f.c1.c1)])[0])
    return FiberCount(spec.q + 1 + total, t, f.smooth)


@lru_cache(maxsize=8)
def _square_counts(spec: FieldSpec) -> Counter:
    return Counter(y * y for y in spec.elements())


def fiber_count_naive(
    a: ExtFieldElem,
    t: ProjPoint,
    spec: FieldSpec | None = None,
    oracle_bound: int = DEFAULT_ORACLE_BOUND,
) -> FiberCount:
    """Count (X, Y) with Y^2 = f(X) against a table of squares, plus infinity."""
    spec = spec or a.spec
    if spec.q > oracle_bound:
        raise OracleBoundExceeded(f"q = {spec.q} exceeds oracle bound {oracle_bound}")
    f = fiber_cubic(a, t)
    squares = _square_counts(spec)
    affine = sum(squares.get(f(x), 0) for x in spec.elements())
    return FiberCount(affine + 1, t, f.smooth)


# ---------------------------------------------------------------------------
# batched engine


def _charsum_rows(spec: FieldSpec, rows) -> np.ndarray:
    """sum_X chi(X (X^2 + c2 X + c1)) for each row (c2_0, c2_1, c1_0, c1_1)."""
    p = spec.p
    chi = chi_table(spec).astype(np.int64)
    x0, x1 = vec_elements(spec)
    xx0, xx1 = vsq(spec, x0, x1)
    chi_x = chi[vindex(spec, x0, x1)]
    coeffs = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
    out = np.empty(len(coeffs), dtype=np.int64)
    for start in range(0, len(coeffs), BLOCK_ROWS):
        blk = coeffs[start:start + BLOCK_ROWS]
        c20, c21, c10, c11 = (blk[:, k, None] for k in range(4))
        m0, m1 = vmul(spec, c20, c21, x0[None, :], x1[None, :])
        g0 = (xx0 + m0 + c10) % p
        g1 = (xx1 + m1 + c11) % p
        out[start:start + len(blk)] = (chi[vindex(spec, g0, g1)] * chi_x).sum(axis=1)
    return out


def fiber_counts_by_square(
    a: ExtFieldElem, squares: np.ndarray, include_infinity: bool = False, workers: int = 1
) -> tuple[np.ndarray, int | None]:
    """Counts N for fibers over every t with t^2 = squares[k] (element indices).

    Returns the array of counts aligned with ``squares`` and, when asked,
    the count at t = infinity.  ``workers`` splits the blocks across
    threads; the result does not depend on it.
    """
    spec = a.spec
    p, q = spec.p, spec.q
    s0, s1 = squares % p, squares // p
    # c2 = 2(a + 1) + 2a s ; c1 = s^2
    a0, a1 = a.c0, a.c1
    as0, as1 = vmul(spec, np.int64(a0), np.int64(a1), s0, s1)
    c20 = (2 * (a0 + 1) + 2 * as0) % p
    c21 = (2 * a1 + 2 * as1) % p
    c10, c11 = vsq(spec, s0, s1)
    rows = np.stack([c20, c21, c10, c11], axis=1) if len(squares) else np.zeros((0, 4), np.int64)
    if include_infinity:
        inf_row = np.array([[2 * a0 % p, 2 * a1 % p, 1, 0]], dtype=np.int64)
        rows = np.concatenate([rows, inf_row])

    chunks = [rows[i:i + BLOCK_ROWS * 4] for i in range(0, len(rows), BLOCK_ROWS * 4)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _charsum_rows(spec, c), chunks))
    else:
        parts = [_charsum_rows(spec, c) for c in chunks]
    sums = np.concatenate(parts) if parts else np.zeros(0, np.int64)
    counts = q + 1 + sums
    if include_infinity:
        return counts[:-1], int(counts[-1])
    return counts, None
