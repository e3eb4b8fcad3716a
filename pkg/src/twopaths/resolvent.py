"""Characteristic polynomial and transfer-matrix numerator at an integer
diagonal assignment, by the trace recurrence

    R_1 = I,   R_{k+1} = A R_k + a_k I,   a_k = -tr(A R_k) / k,

which yields det(sI - A) = s^n + a_1 s^{n-1} + ... + a_n together with
adj(sI - A) = sum_k R_k s^{n-k}, all in exact integer arithmetic.  The
trace is provably divisible by k; that division is checked, not assumed.

The state matrix A is the 0/1 feeding skeleton plus the diagonal `alpha`,
so A*M products are computed sparsely (row gathers plus a row scaling)
while the R_k themselves stay fully materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DivisibilityViolation
from .graph import SystemStructure
from .poly import UniPoly, det2x2, mpz


def _support(row) -> tuple[int, ...]:
    return tuple(i for i, x in enumerate(row) if x)


@dataclass(frozen=True)
class FaddeevResult:
    """Everything the recurrence produces at one diagonal assignment."""

    alpha: tuple[int, ...]
    a: tuple[int, ...]  # a_0 = 1, a_1, ..., a_n
    rmats: tuple  # R_1 ... R_n, each a tuple of row tuples
    rbar: tuple  # C R_k B for k = 1..n, each a 2x2 tuple

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def charpoly(self) -> UniPoly:
        return UniPoly(tuple(reversed(self.a)))

    @property
    def numerator(self):
        """2x2 matrix of UniPoly: N(s) = sum_k (C R_k B) s^(n-k)."""
        n = self.n
        out = []
        for i in range(2):
            row = []
            for j in range(2):
                coeffs = [0] * n
                for k in range(1, n + 1):
                    coeffs[n - k] = self.rbar[k - 1][i][j]
                row.append(UniPoly(tuple(coeffs)))
            out.append(tuple(row))
        return tuple(out)

    def adjugate_entry(self, i: int, j: int) -> UniPoly:
        n = self.n
        coeffs = [0] * n
        for k in range(1, n + 1):
            coeffs[n - k] = self.rmats[k - 1][i][j]
        return UniPoly(tuple(coeffs))


def faddeev(structure: SystemStructure, alpha) -> FaddeevResult:
    """Run the recurrence; also asserts A R_n + a_n I = 0 on the way out."""
    n = structure.n
    alpha = tuple(alpha)
    if len(alpha) != n:
        raise ValueError(f"alpha has length {len(alpha)}, expected {n}")
    feeds = structure.feeds()
    c_rows = (_support(structure.c[0]), _support(structure.c[1]))
    b_cols = (
        tuple(i for i in range(n) if structure.b[i][0]),
        tuple(i for i in range(n) if structure.b[i][1]),
    )
    # entries outgrow machine words quickly; gmp-backed ints keep the row
    # arithmetic cheap once they do
    scale = alpha if n <= 6 else tuple(mpz(v) for v in alpha)

    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rmats = []
    rbar = []
    a = [1]
    for k in range(1, n + 1):
        rmats.append(tuple(tuple(row) for row in R))
        rbar.append(
            tuple(
                tuple(
                    int(sum(R[p][q] for p in c_rows[i] for q in b_cols[j]))
                    for j in range(2)
                )
                for i in range(2)
            )
        )
        # M = A R_k, assembled row by row: alpha scaling plus feed gathers.
        M = []
        for i in range(n):
            ai = scale[i]
            row = [ai * x for x in R[i]] if ai else [0] * n
            for j in feeds[i]:
                rj = R[j]
                row = [x + y for x, y in zip(row, rj)]
            M.append(row)
        tr = sum(M[i][i] for i in range(n))
        q, rem = divmod(-tr, k)
        if rem:
            raise DivisibilityViolation(f"tr(A R_{k}) = {tr} not divisible by {k}")
        a.append(int(q))
        if k < n:
            for i in range(n):
                M[i][i] += q
            R = M
        else:
            for i in range(n):
                M[i][i] += q
            assert all(not any(row) for row in M), "A R_n + a_n I != 0"
    return FaddeevResult(alpha, tuple(a), tuple(rmats), tuple(rbar))


def classify_numerator(numerator) -> tuple[int, UniPoly | None]:
    """Pointwise rank from the cleared transfer matrix.

    Rank 0 iff the matrix vanishes; otherwise rank 1 or 2 according to the
    exact 2x2 determinant being the zero polynomial or not.
    """
    if all(numerator[i][j].is_zero() for i in range(2) for j in range(2)):
        return 0, None
    delta = det2x2(numerator)
    return (1 if delta.is_zero() else 2), delta


@dataclass(frozen=True)
class PointRank:
    point: tuple[int, ...]
    rank: int
    delta: UniPoly | None  # None exactly when the numerator matrix vanishes


def rank_at_point(structure: SystemStructure, alpha) -> PointRank:
    res = faddeev(structure, alpha)
    rank, delta = classify_numerator(res.numerator)
    return PointRank(tuple(alpha), rank, delta)


def coefficient_bounds(n: int) -> tuple[int, int]:
    """Predicted magnitude caps for the charpoly and numerator coefficients."""
    base = n ** (2 * n * n)
    return 2 * base, 2 * base * n * n


@dataclass(frozen=True)
class BoundReport:
    n: int
    a_max: int
    rbar_max: int
    a_bound: int
    rbar_bound: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "a_max": str(self.a_max),
            "a_bound": str(self.a_bound),
            "rbar_max": str(self.rbar_max),
            "rbar_bound": str(self.rbar_bound),
            "violations": [
                {k: (str(v) if isinstance(v, int) else v) for k, v in viol.items()}
                for viol in self.violations
            ],
        }


def bound_check(a, numerator, n: int) -> BoundReport:
    """Measure coefficient magnitudes against their predicted caps.

    A violation is reported, never raised: it refutes the prediction and is
    evidence to persist, not a crash.
    """
    a_bound, rbar_bound = coefficient_bounds(n)
    a_max = 0
    violations = []
    for k, ak in enumerate(a):
        if k == 0:
            continue
        mag = abs(ak)
        if mag > a_max:
            a_max = mag
        if mag >= a_bound:
            violations.append({"kind": "charpoly", "k": k, "value": ak, "bound": a_bound})
    rbar_max = 0
    for i in range(2):
        for j in range(2):
            for power, coeff in enumerate(numerator[i][j].coeffs):
                mag = abs(coeff)
                if mag > rbar_max:
                    rbar_max = mag
                if mag >= rbar_bound:
                    violations.append(
                        {
                            "kind": "numerator",
                            "entry": f"{i + 1}{j + 1}",
                            "power": power,
                            "value": coeff,
                            "bound": rbar_bound,
                        }
                    )
    return BoundReport(n, a_max, rbar_max, a_bound, rbar_bound, tuple(violations))


def resolvent_identity_holds(structure: SystemStructure, alpha, res: FaddeevResult | None = None) -> bool:
    """Check (sI - A) * adj(sI - A) == det(sI - A) * I exactly."""
    if res is None:
        res = faddeev(structure, alpha)
    n = structure.n
    a_mat = structure.a_at(alpha)
    char = res.charpoly
    adj = [[res.adjugate_entry(i, j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            # row i of (sI - A) times column j of adj
            acc = adj[i][j].shift(1)
            for t in range(n):
                coeff = -a_mat[i][t]
                if coeff:
                    acc = acc + adj[t][j].scale(coeff)
            expected = char if i == j else UniPoly()
            if acc != expected:
                return False
    return True
