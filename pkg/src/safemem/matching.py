"""Deterministic Hopcroft-Karp matching and the Dilworth decomposition built on it."""
from __future__ import annotations

from collections import deque
from typing import Sequence

_INF = float("inf")


def hopcroft_karp(adjacency: Sequence[Sequence[int]], n_right: int) -> list[int | None]:
    """Maximum matching of a bipartite graph.

    Args:
        adjacency: ``adjacency[u]`` lists the right vertices adjacent to the
            left vertex ``u``, in the order they should be tried.
        n_right: number of right vertices.

    Returns:
        ``match[u]``: the right partner of left vertex ``u`` or None.
        Vertices and neighbours are always scanned in index order, so the
        result only depends on the input.
    """
    n_left = len(adjacency)
    match_left: list[int | None] = [None] * n_left
    match_right: list[int | None] = [None] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_left[u] is None:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = match_right[v]
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        # Iterative to stay clear of the recursion limit on long chains.
        stack = [(u, iter(adjacency[u]))]
        path = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for v in it:
                w = match_right[v]
                if w is None:
                    path.append((x, v))
                    for a, b in path:
                        match_left[a] = b
                        match_right[b] = a
                    return True
                if dist[w] == dist[x] + 1:
                    path.append((x, v))
                    stack.append((w, iter(adjacency[w])))
                    advanced = True
                    break
            if not advanced:
                dist[x] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_left[u] is None:
                dfs(u)
    return match_left


def dilworth(n: int, less: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Minimum chain cover and maximum antichain of a finite strict order.

    ``less[i]`` lists every ``j`` with ``i < j`` (the relation must be
    transitive). Chains come out in increasing order; the antichain is found
    from a minimum vertex cover of the comparability bipartite graph, and
    both have the same size.
    """
    match = hopcroft_karp(less, n)
    has_pred = [False] * n
    for u, v in enumerate(match):
        if v is not None:
            has_pred[v] = True
    chains = []
    for start in range(n):
        if has_pred[start]:
            continue
        chain = [start]
        while match[chain[-1]] is not None:
            chain.append(match[chain[-1]])
        chains.append(chain)

    match_right: list[int | None] = [None] * n
    for u, v in enumerate(match):
        if v is not None:
            match_right[v] = u
    # Alternating reachability from unmatched left vertices.
    left_seen = [match[u] is None for u in range(n)]
    right_seen = [False] * n
    queue = deque(u for u in range(n) if left_seen[u])
    while queue:
        u = queue.popleft()
        for v in less[u]:
            if right_seen[v] or match[u] == v:
                continue
            right_seen[v] = True
            w = match_right[v]
            if w is not None and not left_seen[w]:
                left_seen[w] = True
                queue.append(w)
    antichain = [x for x in range(n) if left_seen[x] and not right_seen[x]]
    return chains, antichain
