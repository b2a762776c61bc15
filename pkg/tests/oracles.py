"""Independent brute-force oracles used across the test modules."""

from itertools import product


def union_find_components(points, dist, R):
    parent = {x: x for x in points}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in points:
        for y in points:
            if dist(x, y) <= R:
                parent[find(x)] = find(y)
    groups = {}
    for x in points:
        groups.setdefault(find(x), set()).add(x)
    return sorted(map(frozenset, groups.values()), key=lambda s: sorted(map(str, s)))


def reduced_words(k, radius):
    """All reduced words of length <= radius, by brute force over all strings."""
    letters = [chr(ord("a") + i) for i in range(k)]
    letters += [c.upper() for c in letters]
    out = []
    for n in range(radius + 1):
        for w in product(letters, repeat=n):
            if all(a != b.swapcase() for a, b in zip(w, w[1:])):
                out.append("".join(w))
    return out


def free_distance(u, v):
    """Word metric: length of the reduced form of u^-1 v."""
    n = 0
    while n < min(len(u), len(v)) and u[n] == v[n]:
        n += 1
    return len(u) + len(v) - 2 * n


def tower_distance(g, h, increments):
    if g == h:
        return 0
    best = 0
    for n, r in enumerate(increments):
        if g % r != h % r:
            best = n + 1
        g //= r
        h //= r
    return best


def boundary_brute(points, dist, A, R):
    A = set(A)
    comp = [x for x in points if x not in A]
    return {x for x in points
            if any(dist(x, a) <= R for a in A) and any(dist(x, c) <= R for c in comp)}
