"""Gain-formula oracle: loop enumeration, the graph determinant and path
cofactors, all cleared to polynomial form.

The graph determinant is 1 - sum(L_i) + sum(L_i L_j) - ..., summed over
sets of pairwise node-disjoint loops, where a loop gain is the product of
1/(s - z_i) over its branches.  Multiplying through by prod(s - z_i) turns
every term into the product of the primary factors of the *unused*
branches, which is what gets computed here: a monic integer polynomial
directly comparable to the characteristic polynomial from the resolvent.

This module is an oracle for small graphs only; enumeration is capped and
the decision path never depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded
from .graph import StandardSfg
from .poly import ONE, UniPoly, s_minus

DEFAULT_LOOP_CAP = 10_000


@dataclass(frozen=True)
class Loop:
    branches: tuple[int, ...]  # 1-based branch indices, in cycle order
    nodes: frozenset[str]


def enumerate_loops(sfg: StandardSfg, cap: int = DEFAULT_LOOP_CAP) -> list[Loop]:
    """All simple directed cycles, as branch sets.

    Cycles are rooted at their lexicographically-smallest node and found by
    depth-first search restricted to nodes not below the root, which visits
    each cycle exactly once.  Raises CapExceeded when more than `cap` loops
    exist or the search does that many expansions.
    """
    succ: dict[str, list[tuple[str, int]]] = {}
    for br in sfg.branches:
        succ.setdefault(br.tail, []).append((br.head, br.index))
    for v in succ:
        succ[v].sort()
    loops: list[Loop] = []
    budget = max(cap * 20, 10_000)
    expansions = 0
    for root in sorted(succ):
        # path of (node, branch-into-node); only nodes >= root allowed
        stack: list[tuple[str, int]] = [(root, 0)]
        on_path = {root}
        iters = [iter(succ.get(root, ()))]
        while iters:
            expansions += 1
            if expansions > budget:
                raise CapExceeded(f"loop search exceeded {budget} expansions")
            advanced = False
            for head, idx in iters[-1]:
                if head == root:
                    branches = tuple(b for _, b in stack[1:]) + (idx,)
                    loops.append(Loop(branches, frozenset(v for v, _ in stack)))
                    if len(loops) > cap:
                        raise CapExceeded(f"more than {cap} loops")
                elif head > root and head not in on_path:
                    stack.append((head, idx))
                    on_path.add(head)
                    iters.append(iter(succ.get(head, ())))
                    advanced = True
                    break
            if not advanced:
                iters.pop()
                v, _ = stack.pop()
                on_path.discard(v)
    return loops


def _disjointness(loops: list[Loop]) -> list[list[int]]:
    """compatible[i] lists j > i with loops i, j node-disjoint."""
    m = len(loops)
    return [
        [j for j in range(i + 1, m) if not (loops[i].nodes & loops[j].nodes)]
        for i in range(m)
    ]


def _signed_unions(loops: list[Loop], allowed: list[int], compatible) -> dict[frozenset, int]:
    """Sum of (-1)^|S| over pairwise-disjoint subsets S of `allowed`,
    grouped by the union of branch sets; includes the empty subset."""
    terms: dict[frozenset, int] = {}

    def rec(idx_list, used_branches, sign):
        key = frozenset(used_branches)
        terms[key] = terms.get(key, 0) + sign
        for pos, i in enumerate(idx_list):
            comp = set(compatible[i])
            rest = [j for j in idx_list[pos + 1 :] if j in comp]
            rec(rest, used_branches | set(loops[i].branches), -sign)

    rec(allowed, set(), 1)
    return terms


def _terms_to_poly(terms: dict[frozenset, int], all_branches, alpha) -> UniPoly:
    acc = UniPoly()
    for used, coeff in sorted(terms.items(), key=lambda kv: sorted(kv[0])):
        if coeff == 0:
            continue
        poly = ONE
        for b in all_branches:
            if b not in used:
                poly = poly * s_minus(alpha[b - 1])
        acc = acc + poly.scale(coeff)
    return acc


def cleared_determinant(sfg: StandardSfg, loops: list[Loop], alpha) -> UniPoly:
    """The graph determinant multiplied by prod(s - alpha_i); monic, degree n."""
    compatible = _disjointness(loops)
    terms = _signed_unions(loops, list(range(len(loops))), compatible)
    all_branches = [br.index for br in sfg.branches]
    return _terms_to_poly(terms, all_branches, alpha)


def _forward_paths(sfg: StandardSfg, source: str, target: str, cap: int):
    """All simple node paths source -> target as (branch tuple, node set)."""
    succ: dict[str, list[tuple[str, int]]] = {}
    for br in sfg.branches:
        succ.setdefault(br.tail, []).append((br.head, br.index))
    for v in succ:
        succ[v].sort()
    paths = []
    expansions = 0
    budget = max(cap * 20, 10_000)
    stack: list[tuple[str, int]] = [(source, 0)]
    on_path = {source}
    iters = [iter(succ.get(source, ()))]
    while iters:
        expansions += 1
        if expansions > budget:
            raise CapExceeded(f"path search exceeded {budget} expansions")
        advanced = False
        for head, idx in iters[-1]:
            if head == target:
                paths.append(
                    (
                        tuple(b for _, b in stack[1:]) + (idx,),
                        frozenset(v for v, _ in stack) | {target},
                    )
                )
                if len(paths) > cap:
                    raise CapExceeded(f"more than {cap} forward paths")
            elif head not in on_path:
                stack.append((head, idx))
                on_path.add(head)
                iters.append(iter(succ.get(head, ())))
                advanced = True
                break
        if not advanced:
            iters.pop()
            v, _ = stack.pop()
            on_path.discard(v)
    return paths


def transfer_gain(
    sfg: StandardSfg, alpha, input_index: int, output_index: int, cap: int = DEFAULT_LOOP_CAP
) -> tuple[UniPoly, UniPoly]:
    """Cleared numerator and denominator of the gain from input
    `input_index` to output `output_index` (both 1-based).

    Each forward path contributes its cofactor: the determinant over the
    loops node-disjoint from the path.  Clearing by prod(s - alpha_i) makes
    numerator terms products of primary factors over branches in neither
    the path nor the chosen loop set.
    """
    loops = enumerate_loops(sfg, cap)
    compatible = _disjointness(loops)
    source = sfg.inputs[input_index - 1]
    target = sfg.outputs[output_index - 1]
    all_branches = [br.index for br in sfg.branches]

    numerator_terms: dict[frozenset, int] = {}
    for path_branches, path_nodes in _forward_paths(sfg, source, target, cap):
        allowed = [i for i, lp in enumerate(loops) if not (lp.nodes & path_nodes)]
        for used, coeff in _signed_unions(loops, allowed, compatible).items():
            key = used | frozenset(path_branches)
            numerator_terms[key] = numerator_terms.get(key, 0) + coeff
    numerator = _terms_to_poly(numerator_terms, all_branches, alpha)
    denominator = cleared_determinant(sfg, loops, alpha)
    return numerator, denominator


def loop_clusters(sfg: StandardSfg) -> list[frozenset[int]]:
    """Maximal mutually-reachable sets of loop branches: the nontrivial
    strongly connected components of the branch-feeding digraph.

    After node splitting, loops that share a node also share a branch, so
    distinct clusters are node-disjoint.
    """
    n = len(sfg.branches)
    tails: dict[str, list[int]] = {}
    for br in sfg.branches:
        tails.setdefault(br.tail, []).append(br.index - 1)
    succ = [sorted(tails.get(br.head, ())) for br in sfg.branches]

    # iterative Tarjan
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack: list[int] = []
    counter = [1]
    clusters: list[frozenset[int]] = []

    for start in range(n):
        if visited[start]:
            continue
        work = [(start, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                visited[v] = True
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for next_pi in range(pi, len(succ[v])):
                w = succ[v][next_pi]
                if not visited[w]:
                    work[-1] = (v, next_pi + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1:
                    clusters.append(frozenset(b + 1 for b in comp))
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[v])
    clusters.sort(key=min)
    return clusters


def check_determinant_factorization(
    sfg: StandardSfg, alpha, cap: int = DEFAULT_LOOP_CAP
) -> bool:
    """Verify that the cleared determinant is the product of the cleared
    sub-determinants of the loop clusters times the primary factors of the
    branches lying in no loop."""
    loops = enumerate_loops(sfg, cap)
    full = cleared_determinant(sfg, loops, alpha)
    clusters = loop_clusters(sfg)
    loop_branches = set()
    for lp in loops:
        loop_branches.update(lp.branches)
    cluster_branches = set()
    for cl in clusters:
        cluster_branches.update(cl)
    # every loop branch belongs to exactly one cluster
    if loop_branches != cluster_branches:
        return False

    product = ONE
    compatible = _disjointness(loops)
    for cl in clusters:
        inside = [i for i, lp in enumerate(loops) if set(lp.branches) <= cl]
        terms = _signed_unions(loops, inside, compatible)
        product = product * _terms_to_poly(terms, sorted(cl), alpha)
    for br in sfg.branches:
        if br.index not in loop_branches:
            product = product * s_minus(alpha[br.index - 1])
    return product == full
