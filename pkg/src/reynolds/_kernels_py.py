"""Pure-Python kernels.

Reference semantics for ``_kernels.pyx``; used when the compiled module is
unavailable or ``REYNOLDS_PURE_PYTHON=1`` is set.  All routines operate in
place on float64 arrays and return plain Python scalars.
"""

import math


class KernelError(RuntimeError):
    pass


def pgs_sweep_2d(k1, k2, k3, k4, K, D, p, omega, per_node_clamp=True):
    nx, ny = p.shape
    change = 0.0
    if per_node_clamp:
        for i in range(1, nx - 1):
            for j in range(1, ny - 1):
                old = p[i, j]
                cand = (k1[i, j] * p[i + 1, j] + k2[i, j] * p[i - 1, j]
                        + k3[i, j] * p[i, j + 1] + k4[i, j] * p[i, j - 1]
                        - D[i, j]) / K[i, j]
                new = (1.0 - omega) * old + omega * cand
                if new < 0.0:
                    new = 0.0
                p[i, j] = new
                change = max(change, abs(new - old))
        return change
    old_p = p.copy()
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            cand = (k1[i, j] * p[i + 1, j] + k2[i, j] * p[i - 1, j]
                    + k3[i, j] * p[i, j + 1] + k4[i, j] * p[i, j - 1]
                    - D[i, j]) / K[i, j]
            p[i, j] = (1.0 - omega) * p[i, j] + omega * cand
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if p[i, j] < 0.0:
                p[i, j] = 0.0
            change = max(change, abs(p[i, j] - old_p[i, j]))
    return change


def pgs_sweep_1d(A, B, C, p, omega):
    n = p.shape[0]
    change = 0.0
    for i in range(1, n - 1):
        old = p[i]
        cand = (A[i] * p[i - 1] + B[i] * p[i + 1] - C[i]) / (A[i] + B[i])
        new = (1.0 - omega) * old + omega * cand
        if new < 0.0:
            new = 0.0
        p[i] = new
        change = max(change, abs(new - old))
    return change


def pgs_solve_1d(A, B, C, p, omega, tol, max_iter):
    change = math.inf
    it = 0
    while it < max_iter:
        change = pgs_sweep_1d(A, B, C, p, omega)
        it += 1
        if change < tol:
            break
    return it, change


def compute_basis(A, B, C, m, n, c):
    """Fill m, n, c with seeds at nodes 1 and 2, recurrence outward.

    Returns the largest absolute value encountered (inf/nan propagate).
    """
    size = m.shape[0]
    m[1], n[1], c[1] = 1.0, 0.0, 0.0
    if size > 2:
        m[2], n[2], c[2] = 0.0, 1.0, 0.0
    for i in range(2, size - 1):
        s = A[i] + B[i]
        m[i + 1] = (s * m[i] - A[i] * m[i - 1]) / B[i]
        n[i + 1] = (s * n[i] - A[i] * n[i - 1]) / B[i]
        c[i + 1] = (s * c[i] - A[i] * c[i - 1] + C[i]) / B[i]
    # node 0 from the equation at node 1
    s = A[1] + B[1]
    m[0] = (s * m[1] - B[1] * m[2]) / A[1]
    n[0] = (s * n[1] - B[1] * n[2]) / A[1]
    c[0] = (s * c[1] - B[1] * c[2] + C[1]) / A[1]
    big = 0.0
    for arr in (m, n, c):
        for v in arr:
            a = abs(v)
            if not a <= big:
                big = a
    return big


def basis_eval(n, c, a, b, q):
    # m = 1 - n identically (zero row sums), so the constant solution replaces m
    du = n[b] - n[a]
    if du == 0.0 or not math.isfinite(du):
        raise KernelError(f"degenerate anchors ({a}, {b})")
    beta = -(c[b] - c[a]) / du
    return (c[q] - c[a]) + beta * (n[q] - n[a])


def thomas_segment(A, B, C, s, e, out, work):
    """Solve rows s..e with out[s-1] = out[e+1] = 0; writes out[s..e]."""
    # forward elimination; work holds modified super-diagonal
    denom = -(A[s] + B[s])
    work[s] = B[s] / denom
    out[s] = C[s] / denom
    for i in range(s + 1, e + 1):
        denom = -(A[i] + B[i]) - A[i] * work[i - 1]
        work[i] = B[i] / denom
        out[i] = (C[i] - A[i] * out[i - 1]) / denom
    for i in range(e - 1, s - 1, -1):
        out[i] -= work[i] * out[i + 1]


def direct_eval(A, B, C, a, b, q, out, work):
    thomas_segment(A, B, C, a + 1, b - 1, out, work)
    return out[q]


def _evaluate(A, B, C, n, c, use_basis, out, work, a, b, q):
    if use_basis:
        return basis_eval(n, c, a, b, q)
    return direct_eval(A, B, C, a, b, q, out, work)


def expand_segments(A, B, C, n, c, starts, ends, nseg, use_basis, out, work):
    """Grow and merge segments until no boundary test moves anything.

    ``starts``/``ends`` hold ``nseg`` sorted, disjoint, inclusive intervals
    and are compacted in place.  Returns ``(nseg, moves, tests)``.
    """
    size = A.shape[0]
    last = size - 2
    guard = 4 * size
    moves = 0
    tests = 0

    def ev(a, b, q):
        return _evaluate(A, B, C, n, c, use_basis, out, work, a, b, q)

    while True:
        moved = False
        # forward: move ends right
        k = 0
        w = 0
        while k < nseg:
            s = starts[k]
            e = ends[k]
            k += 1
            while e < last:
                j = e + 1
                tests += 1
                if k < nseg and starts[k] == j + 1:
                    if ev(s - 1, ends[k] + 1, j) > 0.0:
                        e = ends[k]
                        k += 1
                        moves += 1
                        moved = True
                        continue
                    break
                if ev(s - 1, j + 1, j) > 0.0:
                    e = j
                    moves += 1
                    moved = True
                    continue
                break
            starts[w] = s
            ends[w] = e
            w += 1
        nseg = w
        # backward: move starts left, walking from the last segment
        k = nseg - 1
        w = nseg - 1
        while k >= 0:
            s = starts[k]
            e = ends[k]
            k -= 1
            while s > 1:
                j = s - 1
                tests += 1
                if k >= 0 and ends[k] == j - 1:
                    if ev(starts[k] - 1, e + 1, j) > 0.0:
                        s = starts[k]
                        k -= 1
                        moves += 1
                        moved = True
                        continue
                    break
                if ev(j - 1, e + 1, j) > 0.0:
                    s = j
                    moves += 1
                    moved = True
                    continue
                break
            starts[w] = s
            ends[w] = e
            w -= 1
        shift = w + 1
        for t in range(shift, nseg):
            starts[t - shift] = starts[t]
            ends[t - shift] = ends[t]
        nseg -= shift
        if moves > guard:
            raise KernelError("segment expansion exceeded move budget")
        if not moved:
            return nseg, moves, tests
