"""Reference implementations used only by tests.

Each one is deliberately written differently from the production code it
checks: exact rationals instead of floats, raw sums instead of centered ones,
colour-marking DFS instead of Kahn's algorithm.
"""

from __future__ import annotations

from fractions import Fraction


def ols_oracle(xs, ys) -> tuple[Fraction, Fraction]:
    """Exact least squares from the raw-sum normal equations."""
    fx = [Fraction(x) for x in xs]
    fy = [Fraction(y) for y in ys]
    n = len(fx)
    sx, sy = sum(fx), sum(fy)
    sxx = sum(x * x for x in fx)
    sxy = sum(x * y for x, y in zip(fx, fy))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    return slope, (sy - slope * sx) / n


def two_pass_mean(ys) -> float:
    first = sum(ys) / len(ys)
    return first + sum(y - first for y in ys) / len(ys)


def dfs_cycles(graph: dict[str, list[str]]) -> list[list[str]]:
    """White/grey/black DFS in key order; each back edge yields a closed path."""
    colour = {k: 0 for k in graph}
    path: list[str] = []
    found = []

    def visit(u):
        colour[u] = 1
        path.append(u)
        for v in graph[u]:
            if colour.get(v) == 1:
                found.append(path[path.index(v):] + [v])
            elif colour.get(v) == 0:
                visit(v)
        path.pop()
        colour[u] = 2

    for k in graph:
        if colour[k] == 0:
            visit(k)
    return found


def reachable(graph: dict[str, list[str]], start: str) -> set[str]:
    """Nodes reachable from ``start`` by following edges (excluding start unless on a cycle)."""
    seen: set[str] = set()
    todo = list(graph[start])
    while todo:
        v = todo.pop()
        if v not in seen:
            seen.add(v)
            todo.extend(graph[v])
    return seen


def stable_topo_order(ids: list[str], graph: dict[str, list[str]]) -> list[str]:
    """Repeatedly take the earliest node whose dependencies are all placed."""
    placed: list[str] = []
    left = list(ids)
    while left:
        for k in left:
            if all(d in placed for d in graph[k]):
                placed.append(k)
                left.remove(k)
                break
        else:
            raise ValueError("graph has a cycle")
    return placed
