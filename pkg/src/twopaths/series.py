"""Leading series coefficients of a transfer entry, computed symbolically
with all branch variables kept to total degree 2.

For an input/output pair with shortest path length d, the first three
series coefficients of the entry are, in order: the number of shortest
paths; the sum over shortest paths of their branch-variable sums plus the
count of length-(d+1) walks; and the sum over shortest paths of their
degree-2 complete homogeneous symmetric sums plus walk corrections of
degree below 2.  Everything here is exact, so an independent enumeration
of the shortest paths must reproduce the quadratic part on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import SystemStructure
from .poly import TruncPoly2


def _b_support(structure: SystemStructure, input_index: int) -> list[int]:
    k = input_index - 1
    return [i for i in range(structure.n) if structure.b[i][k]]


def _c_support(structure: SystemStructure, output_index: int) -> list[int]:
    return [i for i, x in enumerate(structure.c[output_index - 1]) if x]


def relative_order(structure: SystemStructure, input_index: int, output_index: int) -> int | None:
    """Smallest k such that the k-th series coefficient is nonzero, i.e. the
    branch length of a shortest input-to-output path.  None when no path
    exists (every coefficient vanishes)."""
    n = structure.n
    if n == 0:
        return None
    feeds = structure.feeds()
    v = [0] * n
    for i in _b_support(structure, input_index):
        v[i] = 1
    c_sup = _c_support(structure, output_index)
    for k in range(1, n + 1):
        if any(v[i] for i in c_sup):
            return k
        v = [sum(v[j] for j in feeds[i]) for i in range(n)]
    return None


@dataclass(frozen=True)
class SeriesCoeffs:
    order: int  # shortest path length d
    shortest_count: int  # leading coefficient: number of shortest paths
    first_order: TruncPoly2  # next coefficient: degree <= 1
    second_order: TruncPoly2  # next coefficient: degree <= 2

    @property
    def shortest_linear_sum(self) -> TruncPoly2:
        """Sum over shortest paths of the path's branch-variable sum."""
        return self.first_order.linear_part()

    @property
    def walk_count_next(self) -> int:
        """Number of walks one branch longer than the shortest paths."""
        return self.first_order.constant

    @property
    def quadratic_signature(self) -> TruncPoly2:
        """Sum over shortest paths of squares plus pairwise products."""
        return self.second_order.quadratic_part()

    @property
    def walk_count_next2(self) -> int:
        return self.second_order.constant


def series_coeffs(structure: SystemStructure, input_index: int, output_index: int) -> SeriesCoeffs:
    """First three series coefficients, by truncated symbolic powering.

    Requires a path to exist (relative_order not None).
    """
    d = relative_order(structure, input_index, output_index)
    if d is None:
        raise ValueError("no path between the chosen input and output")
    n = structure.n
    feeds = structure.feeds()
    c_sup = _c_support(structure, output_index)
    v = [TruncPoly2() for _ in range(n)]
    for i in _b_support(structure, input_index):
        v[i] = TruncPoly2.const(1)

    captured = {}
    zero = TruncPoly2()
    for applications in range(d + 2):
        if applications in (d - 1, d, d + 1):
            acc = zero
            for i in c_sup:
                acc = acc + v[i]
            captured[applications] = acc
        if applications == d + 1:
            break
        new_v = []
        for i in range(n):
            acc = v[i].mul_var(i + 1)
            for j in feeds[i]:
                if not v[j].is_zero():
                    acc = acc + v[j]
            new_v.append(acc)
        v = new_v

    lead = captured[d - 1]
    assert not lead.linear and not lead.quadratic, "leading coefficient impure"
    first = captured[d]
    assert not first.quadratic, "second coefficient has degree-2 terms"
    return SeriesCoeffs(d, lead.constant, first, captured[d + 1])


def enumerate_shortest_paths(
    structure: SystemStructure, input_index: int, output_index: int
) -> list[tuple[int, ...]]:
    """All shortest input-to-output paths as 1-based branch tuples, found by
    layered search over the feeding relation (independent of the series
    machinery).  Shortest branch walks cannot repeat a node, so these are
    exactly the shortest simple paths."""
    n = structure.n
    feeds = structure.feeds()
    dist = [None] * n
    frontier = _b_support(structure, input_index)
    for i in frontier:
        dist[i] = 1
    level = 1
    while frontier:
        nxt = []
        for i in range(n):
            if dist[i] is None and any(dist[j] == level for j in feeds[i]):
                dist[i] = level + 1
                nxt.append(i)
        frontier = nxt
        level += 1
    ends = [i for i in _c_support(structure, output_index) if dist[i] is not None]
    if not ends:
        return []
    d = min(dist[i] for i in ends)
    paths: list[tuple[int, ...]] = []

    def backtrack(i, suffix):
        if dist[i] == 1:
            paths.append((i + 1,) + suffix)
            return
        for j in sorted(feeds[i]):
            if dist[j] == dist[i] - 1:
                backtrack(j, (i + 1,) + suffix)

    for i in sorted(e for e in ends if dist[e] == d):
        backtrack(i, ())
    return sorted(paths)


def path_quadratic_signature(branches) -> TruncPoly2:
    """Squares plus pairwise products of the path's branch variables."""
    quad = {}
    seq = sorted(branches)
    for a, i in enumerate(seq):
        quad[(i, i)] = 1
        for j in seq[a + 1 :]:
            quad[(i, j)] = 1
    return TruncPoly2(quadratic=quad)


@dataclass(frozen=True)
class SignatureCheck:
    ok: bool
    order: int
    path_count: int
    expected: TruncPoly2
    measured: TruncPoly2
    paths: tuple[tuple[int, ...], ...]


def verify_quadratic_signature(
    structure: SystemStructure, input_index: int, output_index: int
) -> SignatureCheck:
    """Compare the series quadratic part against the sum of per-path
    signatures over independently enumerated shortest paths.

    The path count and linear sum are compared too; any mismatch is
    evidence against the claimed path/series correspondence and is left to
    the caller to persist.
    """
    coeffs = series_coeffs(structure, input_index, output_index)
    paths = enumerate_shortest_paths(structure, input_index, output_index)
    expected = TruncPoly2()
    expected_linear = TruncPoly2()
    for p in paths:
        expected = expected + path_quadratic_signature(p)
        expected_linear = expected_linear + TruncPoly2(linear={b: 1 for b in p})
    measured = coeffs.quadratic_signature
    ok = (
        expected == measured
        and len(paths) == coeffs.shortest_count
        and all(len(p) == coeffs.order for p in paths)
        and expected_linear == coeffs.shortest_linear_sum
    )
    return SignatureCheck(ok, coeffs.order, len(paths), expected, measured, tuple(paths))
