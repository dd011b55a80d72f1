"""Vertex permutations that preserve a weighted term set, and their orbits."""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import CapacityError
from .hypergraph import IsingProblem, PuboProblem

_DIGITS = 9


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)

    def groups(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted((tuple(g) for g in out.values()), key=lambda g: g[0])


def _weight(c: float) -> float:
    return round(c, _DIGITS) + 0.0


def _term_table(problem) -> dict[tuple[int, ...], float]:
    return {t.vertices: _weight(t.coefficient) for t in problem.terms}


def is_automorphism(problem: PuboProblem | IsingProblem, perm: Sequence[int]) -> bool:
    table = _term_table(problem)
    for verts, c in table.items():
        image = tuple(sorted(perm[v] for v in verts))
        if table.get(image) != c:
            return False
    return True


class _Search:
    """Backtracking over vertex assignments with term-consistency pruning."""

    def __init__(self, problem):
        self.n = problem.n
        self.table = _term_table(problem)
        incident: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for verts, c in self.table.items():
            for v in verts:
                incident[v].append((len(verts), c))
        self.signature = [tuple(sorted(x)) for x in incident]

    def find(self, fixed: dict[int, set[int]] | None = None) -> list[int] | None:
        """First automorphism with ``perm[v] in fixed[v]`` for constrained vertices."""
        fixed = fixed or {}
        order = sorted(fixed) + [v for v in range(self.n) if v not in fixed]
        position = {v: i for i, v in enumerate(order)}
        completes: list[list[tuple[tuple[int, ...], float]]] = [[] for _ in order]
        for verts, c in self.table.items():
            completes[max(position[v] for v in verts)].append((verts, c))
        perm = [-1] * self.n
        used = [False] * self.n

        def extend(depth: int) -> bool:
            if depth == self.n:
                return True
            v = order[depth]
            allowed = fixed.get(v)
            for w in range(self.n):
                if used[w] or self.signature[w] != self.signature[v]:
                    continue
                if allowed is not None and w not in allowed:
                    continue
                perm[v] = w
                used[w] = True
                ok = all(
                    self.table.get(tuple(sorted(perm[u] for u in verts))) == c
                    for verts, c in completes[depth]
                )
                if ok and extend(depth + 1):
                    return True
                used[w] = False
                perm[v] = -1
            return False

        return list(perm) if extend(0) else None


def _dihedral(n: int) -> Iterator[list[int]]:
    for shift in range(n):
        yield [(v + shift) % n for v in range(n)]
        yield [(shift - v) % n for v in range(n)]


def automorphism_generators(
    problem: PuboProblem | IsingProblem, mode: str = "search"
) -> list[list[int]]:
    """Automorphisms whose cycles generate the vertex and term orbits.

    ``search`` runs the backtracking searcher once per candidate vertex
    pair and term pair; ``dihedral`` tests the 2n rotations/reflections.
    """
    if mode == "dihedral":
        return [p for p in _dihedral(problem.n) if is_automorphism(problem, p)]
    if mode != "search":
        raise ValueError(f"unknown orbit mode {mode!r}")

    search = _Search(problem)
    terms = [t.vertices for t in problem.terms]
    index = {v: i for i, v in enumerate(terms)}
    vert_uf = _UnionFind(problem.n)
    term_uf = _UnionFind(len(terms))
    found: list[list[int]] = []

    def absorb(perm: list[int]) -> None:
        found.append(perm)
        for v in range(problem.n):
            vert_uf.union(v, perm[v])
        for i, verts in enumerate(terms):
            term_uf.union(i, index[tuple(sorted(perm[u] for u in verts))])

    for v in range(problem.n):
        for w in range(v + 1, problem.n):
            if vert_uf.find(v) == vert_uf.find(w):
                continue
            if search.signature[v] != search.signature[w]:
                continue
            perm = search.find({v: {w}})
            if perm is not None:
                absorb(perm)

    weights = search.table
    for i, a in enumerate(terms):
        for j in range(i + 1, len(terms)):
            b = terms[j]
            if term_uf.find(i) == term_uf.find(j):
                continue
            if len(a) != len(b) or weights[a] != weights[b]:
                continue
            target = set(b)
            perm = search.find({u: target for u in a})
            if perm is not None:
                absorb(perm)
    return found


def _is_cyclic_local(problem) -> bool:
    n = problem.n
    width = max((t.order for t in problem.terms), default=1)
    for t in problem.terms:
        if not any(
            all((v - start) % n < width for v in t.vertices) for start in t.vertices
        ):
            return False
    return True


def find_orbits(
    problem: PuboProblem | IsingProblem,
    max_n_for_search: int = 10,
    mode: str = "auto",
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Return ``(term_orbits, vertex_orbits)`` under the automorphism group.

    Term orbits hold indices into ``problem.terms``.  In ``auto`` mode small
    problems get an exhaustive search; larger problems whose terms all sit
    inside short cyclic windows fall back to the dihedral subgroup.
    """
    if mode == "auto":
        if problem.n <= max_n_for_search:
            mode = "search"
        elif _is_cyclic_local(problem):
            mode = "dihedral"
        else:
            raise CapacityError(
                f"automorphism search limited to n <= {max_n_for_search} "
                f"for non-cyclic problems, got n={problem.n}"
            )
    elif mode == "search" and problem.n > max_n_for_search:
        raise CapacityError(f"automorphism search limited to n <= {max_n_for_search}")

    perms = automorphism_generators(problem, mode)
    terms = [t.vertices for t in problem.terms]
    index = {v: i for i, v in enumerate(terms)}
    vert_uf = _UnionFind(problem.n)
    term_uf = _UnionFind(len(terms))
    for perm in perms:
        for v in range(problem.n):
            vert_uf.union(v, perm[v])
        for i, verts in enumerate(terms):
            term_uf.union(i, index[tuple(sorted(perm[u] for u in verts))])
    return term_uf.groups(), vert_uf.groups()
