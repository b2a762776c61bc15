"""Maximum bipartite matching (Hopcroft-Karp) with Hall-violator extraction."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Mapping, Sequence

_INF = float("inf")


class BipartiteMatcher:
    """Hopcroft-Karp on ``graph: left vertex -> ordered list of right vertices``.

    Left vertices are visited in the mapping's order and neighbours in list
    order, so the matching found is deterministic.
    """

    def __init__(self, graph: Mapping[Hashable, Sequence[Hashable]]):
        self.graph = {u: list(vs) for u, vs in graph.items()}
        self.left = list(self.graph)
        self.match_left: dict = {}
        self.match_right: dict = {}
        self._dist: dict = {}
        self._solved = False

    def _bfs(self):
        queue = deque()
        for u in self.left:
            if u in self.match_left:
                self._dist[u] = _INF
            else:
                self._dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in self.graph[u]:
                w = self.match_right.get(v)
                if w is None:
                    found = True
                elif self._dist[w] == _INF:
                    self._dist[w] = self._dist[u] + 1
                    queue.append(w)
        return found

    def _dfs(self, root):
        # iterative to stay clear of the recursion limit on long augmenting paths
        stack = [(root, iter(self.graph[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = self.match_right.get(v)
                if w is None:
                    path.append((u, v))
                    for a, b in path:
                        self.match_left[a] = b
                        self.match_right[b] = a
                    return True
                if self._dist[w] == self._dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(self.graph[w])))
                    advanced = True
                    break
            if not advanced:
                self._dist[u] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    def solve(self) -> dict:
        """Return a maximum matching as ``{left: right}``."""
        if not self._solved:
            while self._bfs():
                for u in self.left:
                    if u not in self.match_left:
                        self._dfs(u)
            self._solved = True
        return dict(self.match_left)

    @property
    def saturates_left(self):
        self.solve()
        return len(self.match_left) == len(self.left)

    def hall_violator(self):
        """A left set ``A`` with ``|N(A)| < |A|``, or None if the matching saturates.

        ``A`` is everything reachable from unmatched left vertices along
        alternating paths; ``N(A)`` is then exactly the matched partners of
        ``A`` minus the roots, so ``|N(A)| = |A| - #unmatched``.
        """
        self.solve()
        roots = [u for u in self.left if u not in self.match_left]
        if not roots:
            return None
        seen_left = set(roots)
        seen_right = set()
        queue = deque(roots)
        while queue:
            u = queue.popleft()
            for v in self.graph[u]:
                if v in seen_right:
                    continue
                seen_right.add(v)
                w = self.match_right.get(v)
                if w is not None and w not in seen_left:
                    seen_left.add(w)
                    queue.append(w)
        A = [u for u in self.left if u in seen_left]
        return A, seen_right
