"""Random net generators and brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools
import random

import numpy as np

from petristruct.net import Net, incidence


def random_net(rng: random.Random, d: int, m: int, wmax: int = 3, density: float = 0.35,
               name: str = "rnd") -> Net:
    pre = [[0] * m for _ in range(d)]
    post = [[0] * m for _ in range(d)]
    for j in range(m):
        for i in range(d):
            if rng.random() < density:
                pre[i][j] = rng.randint(1, wmax)
            if rng.random() < density:
                post[i][j] = rng.randint(1, wmax)
    return Net(name, tuple(f"p{i}" for i in range(d)), tuple(f"t{j}" for j in range(m)), pre, post)


def conservative_net(rng: random.Random, d: int, m: int, wmax: int = 3, name: str = "cons") -> Net:
    """Random net keeping ``f.q`` constant for a random positive weighting f
    of a random subset of places; other places are free."""
    f = [rng.randint(1, 3) if rng.random() < 0.7 else 0 for _ in range(d)]
    if not any(f):
        f[0] = 1
    pre = [[0] * m for _ in range(d)]
    post = [[0] * m for _ in range(d)]
    for j in range(m):
        for _ in range(50):
            a = [rng.randint(0, wmax) if rng.random() < 0.4 else 0 for _ in range(d)]
            b = [rng.randint(0, wmax) if rng.random() < 0.4 else 0 for _ in range(d)]
            if sum(x * w for x, w in zip(a, f)) == sum(x * w for x, w in zip(b, f)) and a != b:
                break
        else:
            a = b = [0] * d
        for i in range(d):
            pre[i][j], post[i][j] = a[i], b[i]
    return Net(name, tuple(f"p{i}" for i in range(d)), tuple(f"t{j}" for j in range(m)), pre, post)


def brute_minimal_semiflows(net: Net, K: int = 12, limit: int = 300_000) -> list[tuple[int, ...]] | None:
    """≤-minimal non-zero f in [0, K]^d with f.C = 0, by plain enumeration.

    Returns None if more than ``limit`` solutions exist in the box.
    """
    d = net.d
    C = np.array(incidence(net), dtype=np.int64).reshape(d, len(net.transitions))
    sols = []
    total = 0
    # enumerate the first coordinate in an outer loop, the rest as a grid
    if d == 1:
        grid = np.zeros((1, 0), dtype=np.int64)
    else:
        grid = np.array(list(itertools.product(range(K + 1), repeat=d - 1)), dtype=np.int64)
    for first in range(K + 1):
        block = np.hstack([np.full((grid.shape[0], 1), first, dtype=np.int64), grid])
        if C.shape[1]:
            ok = ~np.any(block @ C, axis=1)
        else:
            ok = np.ones(block.shape[0], dtype=bool)
        hits = block[ok]
        total += len(hits)
        if total > limit:
            return None
        sols.append(hits)
    S = np.vstack(sols)
    S = S[S.sum(axis=1) > 0]
    S = S[np.argsort(S.sum(axis=1), kind="stable")]
    minimal = np.zeros((0, d), dtype=np.int64)
    for x in S:
        if len(minimal) and np.any(np.all(minimal <= x, axis=1)):
            continue
        minimal = np.vstack([minimal, x])
    return sorted(tuple(int(v) for v in row) for row in minimal)


def random_marking(rng: random.Random, d: int, tokens: int = 3) -> tuple[int, ...]:
    return tuple(rng.randint(0, tokens) for _ in range(d))
