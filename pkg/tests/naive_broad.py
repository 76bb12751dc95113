"""Independent broadness oracle: projection dimensions from the numerical rank of
the Jacobian of a parametrization, subsets enumerated by bitmask."""
import numpy as np


def parametrize(n, relations, constants):
    """Solve the relations by fixed-point sweeps; returns a map params -> point."""
    def point(params):
        x = [None] * n
        for i, c in constants:
            x[i] = complex(c)
        free = iter(params)
        changed = True
        while any(v is None for v in x):
            changed = False
            for i, j, g in relations:
                a, b, c, d = g.entries
                if x[j] is not None and x[i] is None:
                    x[i] = (a * x[j] + b) / (c * x[j] + d)
                    changed = True
                elif x[i] is not None and x[j] is None:
                    x[j] = (d * x[i] - b) / (-c * x[i] + a)
                    changed = True
            if not changed:
                k = x.index(None)
                x[k] = next(free)
        return np.array(x)
    return point


def naive_is_broad(n, relations, constants, dims_w):
    point = parametrize(n, relations, constants)
    base = [0.13 + 1.1j + 0.07j * k for k in range(n)]
    x0 = point(base)
    h = 1e-6
    cols = []
    for k in range(n):
        p = list(base)
        p[k] += h
        cols.append((point(p) - x0) / h)
    J = np.array(cols).T  # rows: coordinates, cols: parameters
    for mask in range(1, 2**n):
        rows = [i for i in range(n) if mask >> i & 1]
        rank = np.linalg.matrix_rank(J[rows], tol=1e-4) if rows else 0
        if rank + dims_w[frozenset(rows)] < len(rows):
            return False
    return True
