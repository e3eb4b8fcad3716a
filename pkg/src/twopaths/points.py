"""Structured integer evaluation points and the rank-sweep decision.

For a system with n branches the sweep set has n^2 + 2n points arranged in
n families.  Family 1 evaluates the diagonal at (n*i) with both a -1 and a
+1 single-coordinate perturbation; family j >= 2 evaluates at ((n*i)^j)
with -1 perturbations only.  The decision is the maximum pointwise rank of
the cleared transfer matrix over the sweep; one rank-2 point is conclusive,
so the default mode stops there.

Within a family every perturbed point differs from the base in a single
diagonal entry, so its characteristic polynomial and numerator follow from
the base adjugate by one exact rank-one update:

    det' = det - mu * adj[k][k]
    N'_ij = (det' * N_ij + mu * (C adj e_k)_i (e_k^T adj B)_j) / det

with the division exact.  The update is cross-checked against the direct
recurrence in the test suite; the division asserts exactness at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import SystemStructure
from .poly import UniPoly, pack_coeffs
from .resolvent import (
    BoundReport,
    FaddeevResult,
    PointRank,
    bound_check,
    classify_numerator,
    faddeev,
)


@dataclass(frozen=True)
class SweepPoint:
    values: tuple[int, ...]
    family: int
    kind: str  # "base", "minus" or "plus"
    coordinate: int | None = None  # 1-based index of the perturbed entry

    @property
    def label(self) -> str:
        if self.kind == "base":
            return f"f{self.family}:base"
        sign = "-" if self.kind == "minus" else "+"
        return f"f{self.family}:{sign}{self.coordinate}"


def sweep_points(n: int) -> tuple[SweepPoint, ...]:
    """All n^2 + 2n evaluation points, in deterministic sweep order."""
    if n < 1:
        raise ValueError("need at least one branch")
    points = []
    base1 = tuple(n * i for i in range(1, n + 1))
    points.append(SweepPoint(base1, 1, "base"))
    for k in range(1, n + 1):
        vals = list(base1)
        vals[k - 1] -= 1
        points.append(SweepPoint(tuple(vals), 1, "minus", k))
    for k in range(1, n + 1):
        vals = list(base1)
        vals[k - 1] += 1
        points.append(SweepPoint(tuple(vals), 1, "plus", k))
    for j in range(2, n + 1):
        base = tuple((n * i) ** j for i in range(1, n + 1))
        points.append(SweepPoint(base, j, "base"))
        for k in range(1, n + 1):
            vals = list(base)
            vals[k - 1] -= 1
            points.append(SweepPoint(tuple(vals), j, "minus", k))
    return tuple(points)


class _FamilyEngine:
    """Evaluates one family: a direct recurrence at the base, then exact
    rank-one updates for the single-coordinate perturbations.

    Perturbed evaluations come in two flavors.  `perturbed_exact` divides
    out the base determinant and returns true charpoly coefficients and the
    true numerator (needed for tables and bound measurements).  `classify`
    skips the division: with Z = det'*N + mu*U*V^T it holds that
    det(Z) = det' * (det'*delta + mu*V^T adj(N) U), so the rank tests only
    need zero tests of the bracketed expression and of the entries of Z.
    Those zero tests are done by exact evaluation at s = 2**stride for a
    stride exceeding the coefficient-magnitude bound of the tested
    polynomial (a nonzero integer polynomial cannot vanish there), which
    turns every test into a handful of word-aligned integer products.
    """

    def __init__(self, structure: SystemStructure, base_values):
        self.structure = structure
        self.base_res: FaddeevResult = faddeev(structure, base_values)
        self.char = self.base_res.charpoly
        self.numerator = self.base_res.numerator
        self.delta_base = (
            self.numerator[0][0] * self.numerator[1][1]
            - self.numerator[0][1] * self.numerator[1][0]
        )
        n = structure.n
        self._c_rows = (
            tuple(i for i, x in enumerate(structure.c[0]) if x),
            tuple(i for i, x in enumerate(structure.c[1]) if x),
        )
        self._b_cols = (
            tuple(i for i in range(n) if structure.b[i][0]),
            tuple(i for i in range(n) if structure.b[i][1]),
        )
        self._columns: dict[int, tuple] = {}
        self._products: dict[int, tuple] = {}
        self._proj = None
        self._packed = None
        self._packed3 = None
        self._delta_zero = self.delta_base.is_zero()

    def base(self):
        return self.base_res.a, self.numerator

    def base_rank(self):
        if all(self.numerator[i][j].is_zero() for i in range(2) for j in range(2)):
            return 0
        return 1 if self.delta_base.is_zero() else 2

    def _projections(self):
        """C R_k (2 x n) and R_k B (n x 2) for every k, built once."""
        if self._proj is None:
            n = self.structure.n
            cr = []
            rb = []
            for rk in self.base_res.rmats:
                cr_k = []
                for rows in self._c_rows:
                    acc = [0] * n
                    for p in rows:
                        rp = rk[p]
                        acc = [x + y for x, y in zip(acc, rp)]
                    cr_k.append(acc)
                cr.append(cr_k)
                rb.append(
                    [
                        [sum(row[q] for q in cols) for row in rk]
                        for cols in self._b_cols
                    ]
                )
            self._proj = (cr, rb)
        return self._proj

    def _column_data(self, k0: int):
        cached = self._columns.get(k0)
        if cached is not None:
            return cached
        n = self.structure.n
        rmats = self.base_res.rmats
        cr, rb = self._projections()
        diag = [0] * n
        u = [[0] * n, [0] * n]
        v = [[0] * n, [0] * n]
        for k in range(1, n + 1):
            pos = n - k
            diag[pos] = rmats[k - 1][k0][k0]
            u[0][pos] = cr[k - 1][0][k0]
            u[1][pos] = cr[k - 1][1][k0]
            v[0][pos] = rb[k - 1][0][k0]
            v[1][pos] = rb[k - 1][1][k0]
        data = (
            UniPoly(tuple(diag)),
            (UniPoly(tuple(u[0])), UniPoly(tuple(u[1]))),
            (UniPoly(tuple(v[0])), UniPoly(tuple(v[1]))),
        )
        self._columns[k0] = data
        return data

    def _packed_base(self):
        """Family-wide packed evaluations and the shared stride.

        The stride is chosen from rigorous magnitude bounds so that every
        zero-tested expression (at most a product of two base-magnitude
        polynomials plus one more such product) has coefficients below
        2**(stride-1); evaluation at 2**stride then vanishes exactly when
        the polynomial does.
        """
        if self._packed is None:
            n = self.structure.n
            r_max = 1
            for rk in self.base_res.rmats:
                for row in rk:
                    for x in row:
                        if x < 0:
                            x = -x
                        if x > r_max:
                            r_max = x
            m_op = max(
                self.char.max_abs_coeff(),
                max(self.numerator[i][j].max_abs_coeff() for i in range(2) for j in range(2)),
                n * r_max,
                1,
            )
            bound = 8 * (n + 1) * m_op * m_op
            stride = ((bound.bit_length() + 10) // 8 + 1) * 8
            pivot = None
            for i in range(2):
                for j in range(2):
                    if not self.numerator[i][j].is_zero():
                        pivot = (i, j)
                        break
                if pivot:
                    break
            self._packed = {
                "stride": stride,
                "m_op": m_op,
                "char": pack_coeffs(self.char.coeffs, stride),
                "num": tuple(
                    tuple(pack_coeffs(self.numerator[i][j].coeffs, stride) for j in range(2))
                    for i in range(2)
                ),
                "pivot": pivot,
            }
        return self._packed

    def _packed_cubic(self):
        """Wider-stride packs for the general rank-2 test (nonzero base
        determinant); only touched while scanning toward an exit point."""
        if self._packed3 is None:
            base = self._packed_base()
            n = self.structure.n
            m_op = base["m_op"]
            bound = 8 * (n + 1) * (n + 1) * m_op * m_op * m_op
            stride = ((bound.bit_length() + 10) // 8 + 1) * 8
            self._packed3 = {
                "stride": stride,
                "char": pack_coeffs(self.char.coeffs, stride),
                "delta": pack_coeffs(self.delta_base.coeffs, stride),
                "num": tuple(
                    tuple(pack_coeffs(self.numerator[i][j].coeffs, stride) for j in range(2))
                    for i in range(2)
                ),
            }
        return self._packed3

    def _product_data(self, k0: int):
        """Per-coordinate packed values; shared by the +-pair of points."""
        cached = self._products.get(k0)
        if cached is not None:
            return cached
        base = self._packed_base()
        stride = base["stride"]
        adj_kk, u, v = self._column_data(k0)
        pu = (pack_coeffs(u[0].coeffs, stride), pack_coeffs(u[1].coeffs, stride))
        pv = (pack_coeffs(v[0].coeffs, stride), pack_coeffs(v[1].coeffs, stride))
        p_zero = None
        if self._delta_zero and base["pivot"] is not None:
            # base numerator has rank 1, so P = V^T adj(N) U obeys
            # P*N_ab = +-(V0*Na1 - V1*Na0)(N1b*U0 - N0b*U1); P vanishes iff
            # either factor does
            a, b = base["pivot"]
            pn = base["num"]
            v_combo = pv[0] * pn[a][1] - pv[1] * pn[a][0]
            if v_combo == 0:
                p_zero = True
            else:
                u_combo = pn[1][b] * pu[0] - pn[0][b] * pu[1]
                p_zero = u_combo == 0
        elif base["pivot"] is None:
            p_zero = True  # numerator vanishes identically, so adj(N) = 0
        data = (pack_coeffs(adj_kk.coeffs, stride), u, v, pu, pv, p_zero)
        self._products[k0] = data
        return data

    def _char_shift(self, k0: int, mu: int) -> UniPoly:
        adj_kk, _, _ = self._column_data(k0)
        char2 = self.char + adj_kk.scale(-mu)
        assert char2.degree == self.structure.n and char2.coeffs[-1] == 1
        return char2

    def _general_rank2(self, k0: int, mu: int) -> bool:
        """char2*delta + mu*V^T adj(N) U != 0, at the wide stride."""
        wide = self._packed_cubic()
        stride = wide["stride"]
        adj_kk, u, v = self._column_data(k0)
        pu = (pack_coeffs(u[0].coeffs, stride), pack_coeffs(u[1].coeffs, stride))
        pv = (pack_coeffs(v[0].coeffs, stride), pack_coeffs(v[1].coeffs, stride))
        pn = wide["num"]
        pa1 = pn[1][1] * pu[0] - pn[0][1] * pu[1]
        pa2 = pn[0][0] * pu[1] - pn[1][0] * pu[0]
        pp = pv[0] * pa1 + pv[1] * pa2
        pchar2 = wide["char"] - mu * pack_coeffs(adj_kk.coeffs, stride)
        return pchar2 * wide["delta"] + mu * pp != 0

    def classify(self, k0: int, mu: int) -> int:
        """Pointwise rank at base + mu*e_{k0}, no numerator materialized."""
        padj, u, v, pu, pv, p_zero = self._product_data(k0)
        if p_zero is None:
            if self._general_rank2(k0, mu):
                return 2
        elif not p_zero:
            return 2
        # here delta' = 0; rank 1 iff some Z_ij = char2*N_ij + mu*U_i*V_j != 0
        base = self._packed_base()
        pchar2 = None
        n = self.structure.n
        for i in range(2):
            ui = u[i]
            for j in range(2):
                nij = self.numerator[i][j]
                vj = v[j]
                uv_zero = ui.is_zero() or vj.is_zero()
                if nij.is_zero() and uv_zero:
                    continue
                if nij.is_zero() != uv_zero:
                    return 1
                d1 = n + nij.degree
                d2 = ui.degree + vj.degree
                if d1 != d2:
                    return 1
                if nij.coeffs[-1] + mu * ui.coeffs[-1] * vj.coeffs[-1] != 0:
                    return 1
                if pchar2 is None:
                    pchar2 = base["char"] - mu * padj
                if pchar2 * base["num"][i][j] + mu * (pu[i] * pv[j]) != 0:
                    return 1
        return 0

    def perturbed_exact(self, k0: int, mu: int):
        """True charpoly coefficients and numerator at base + mu*e_{k0}."""
        _, u, v = self._column_data(k0)
        char2 = self._char_shift(k0, mu)
        a2 = tuple(reversed(char2.coeffs))
        num2 = tuple(
            tuple(
                (char2 * self.numerator[i][j] + (u[i] * v[j]).scale(mu)).divexact(
                    self.char
                )
                for j in range(2)
            )
            for i in range(2)
        )
        return a2, num2


def structural_rank_zero(structure: SystemStructure) -> bool:
    """True iff no feeding chain links an input branch to an output branch.

    In that case C R_k B = 0 for every k at every diagonal assignment, so
    the whole sweep is identically rank 0.
    """
    n = structure.n
    starts = [i for i in range(n) if structure.b[i][0] or structure.b[i][1]]
    outs = {i for i in range(n) if structure.c[0][i] or structure.c[1][i]}
    if not starts or not outs:
        return True
    succ = [[] for _ in range(n)]
    for i, row in enumerate(structure.a0):
        for j, x in enumerate(row):
            if x:
                succ[j].append(i)
    seen = set(starts)
    stack = list(starts)
    while stack:
        j = stack.pop()
        if j in outs:
            return False
        for i in succ[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return True


@dataclass(frozen=True)
class SweepBounds:
    """Coefficient-magnitude measurements aggregated over evaluated points."""

    a_max: int
    rbar_max: int
    a_bound: int
    rbar_bound: int
    points_checked: int
    violations: tuple  # (point label, violation dict) pairs

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "a_max": str(self.a_max),
            "a_bound": str(self.a_bound),
            "rbar_max": str(self.rbar_max),
            "rbar_bound": str(self.rbar_bound),
            "points_checked": self.points_checked,
            "violations": [
                {
                    "point": label,
                    **{k: (str(v) if isinstance(v, int) else v) for k, v in viol.items()},
                }
                for label, viol in self.violations
            ],
        }


@dataclass(frozen=True)
class Decision:
    rank: int
    n: int
    witness: SweepPoint | None
    points_evaluated: int
    table: tuple[PointRank, ...] | None  # full-sweep mode only
    bounds: SweepBounds | None
    structural_zero: bool = False

    @property
    def kind(self) -> int:
        """The path class equals the sweep rank."""
        return self.rank


def decide(structure: SystemStructure, mode: str = "early-exit") -> Decision:
    """Classify the system by sweeping the evaluation points.

    Early-exit mode stops at the first rank-2 point (one nonvanishing point
    is conclusive), skips the sweep entirely when the 0/1 skeleton admits no
    input-to-output chain, and classifies perturbed points division-free;
    coefficient bounds are then measured at family bases only.  Full-sweep
    mode evaluates every point exactly, records the complete rank table and
    measures bounds everywhere.
    """
    if mode not in ("early-exit", "full-sweep"):
        raise ValueError(f"unknown mode {mode!r}")
    full = mode == "full-sweep"
    n = structure.n
    if n == 0:
        return Decision(0, 0, None, 0, () if full else None, None)
    if not full and structural_rank_zero(structure):
        return Decision(0, n, None, 0, None, None, structural_zero=True)

    a_bound, rbar_bound = None, None
    a_max = rbar_max = 0
    violations: list = []
    table: list[PointRank] = []
    witness = None
    rank_max = 0
    evaluated = 0
    engine = None

    def measure(label, a_coeffs, numerator):
        nonlocal a_bound, rbar_bound, a_max, rbar_max
        report: BoundReport = bound_check(a_coeffs, numerator, n)
        if a_bound is None:
            a_bound, rbar_bound = report.a_bound, report.rbar_bound
        a_max = max(a_max, report.a_max)
        rbar_max = max(rbar_max, report.rbar_max)
        for viol in report.violations:
            violations.append((label, viol))
        return report

    measured_points = 0
    for pt in sweep_points(n):
        delta = None
        if pt.kind == "base":
            engine = _FamilyEngine(structure, pt.values)
            a_coeffs, numerator = engine.base()
            measure(pt.label, a_coeffs, numerator)
            measured_points += 1
            if full:
                rank, delta = classify_numerator(numerator)
            else:
                rank = engine.base_rank()
        else:
            mu = -1 if pt.kind == "minus" else 1
            if full:
                a_coeffs, numerator = engine.perturbed_exact(pt.coordinate - 1, mu)
                measure(pt.label, a_coeffs, numerator)
                measured_points += 1
                rank, delta = classify_numerator(numerator)
            else:
                rank = engine.classify(pt.coordinate - 1, mu)
        evaluated += 1
        if full:
            table.append(PointRank(pt.values, rank, delta))
        if rank > rank_max:
            rank_max = rank
            if rank == 2 and witness is None:
                witness = pt
        if rank == 2 and not full:
            break
    bounds = SweepBounds(
        a_max, rbar_max, a_bound or 0, rbar_bound or 0, measured_points, tuple(violations)
    )
    return Decision(
        rank_max, n, witness, evaluated, tuple(table) if full else None, bounds
    )


def random_distinct_points(n: int, rng, count: int) -> list[tuple[int, ...]]:
    """Random integer diagonals with pairwise-distinct coordinates in
    [1, n^2]; used to probe that no off-sweep point beats the sweep rank."""
    return [tuple(rng.sample(range(1, n * n + 1), n)) for _ in range(count)]
