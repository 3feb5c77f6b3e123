"""Hot inner loops.

Every kernel here is a plain function restricted to the numpy subset numba
understands. ``_accel.jit`` compiles it when numba is enabled; the
uncompiled original doubles as the reference fallback. The only exception is
the direct circular convolution, whose fallback is a vectorized gather since
the scalar double loop would be needlessly slow under CPython.

Conventions shared by the kernels: a coefficient block ``T`` of shape
``(m, s1, s2)`` encodes the bilinear map ``(u, v) -> sum_ab T[:, a, b] u_a v_b``.
"""
import numpy as np

from ._accel import HAVE_NUMBA, jit


@jit
def _solve_normal(G, r):
    # tiny least-squares problems (m <= 64, <= 8 unknowns); normal equations
    # with a scale-aware ridge so exact zeros in G never make H singular
    H = G.conj().T @ G
    rhs = G.conj().T @ r
    k = H.shape[0]
    tr = 0.0
    for i in range(k):
        tr += H[i, i].real
    ridge = 1e-15 * tr + 1e-300
    for i in range(k):
        H[i, i] += ridge
    return np.linalg.solve(H, rhs)


@jit
def _contract_u(T, u):
    # (m, s1, s2), (s1,) -> (m, s2)
    m, s1, s2 = T.shape
    out = np.zeros((m, s2), dtype=np.complex128)
    for a in range(s1):
        out += u[a] * T[:, a, :]
    return out


@jit
def _contract_v(T, v):
    # (m, s1, s2), (s2,) -> (m, s1)
    m, s1, s2 = T.shape
    out = np.zeros((m, s1), dtype=np.complex128)
    for b in range(s2):
        out += v[b] * T[:, :, b]
    return out


@jit
def _balance(u, v):
    nu = np.sqrt(np.sum(np.abs(u) ** 2))
    nv = np.sqrt(np.sum(np.abs(v) ** 2))
    if nu > 0.0 and nv > 0.0:
        c = np.sqrt(nv / nu)
        return u * c, v / c
    return u, v


@jit
def circ_conv_loop(v, w):
    m = v.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    for i in range(1, m + 1):
        acc = 0j
        for j in range(1, m + 1):
            acc += v[j - 1] * w[(i - j - 1) % m]
        out[i - 1] = acc
    return out


def circ_conv_gather(v, w):
    m = v.shape[0]
    i = np.arange(1, m + 1)[:, None]
    j = np.arange(1, m + 1)[None, :]
    return (v[None, :] * w[(i - j - 1) % m]).sum(axis=1)


@jit
def als_rank_one(T, z, u0, v0, max_sweeps, tol):
    """Alternating least squares for ``min ||T(u, v) - z||``.

    Returns ``(u, v, residual, sweeps)``. Stops when the relative change of
    the outer product ``u v^T`` falls below ``tol``.
    """
    u = u0.astype(np.complex128).copy()
    v = v0.astype(np.complex128).copy()
    znorm = np.sqrt(np.sum(np.abs(z) ** 2))
    X_old = np.outer(u, v)
    sweeps = 0
    for it in range(max_sweeps):
        sweeps = it + 1
        u = _solve_normal(_contract_v(T, v), z)
        v = _solve_normal(_contract_u(T, u), z)
        u, v = _balance(u, v)
        X = np.outer(u, v)
        xn = np.sqrt(np.sum(np.abs(X) ** 2))
        dx = np.sqrt(np.sum(np.abs(X - X_old) ** 2))
        X_old = X
        if xn == 0.0 or dx <= tol * xn:
            break
        r = _contract_u(T, u) @ v - z
        if np.sqrt(np.sum(np.abs(r) ** 2)) <= 1e-15 * znorm:
            break
    r = _contract_u(T, u) @ v - z
    return u, v, np.sqrt(np.sum(np.abs(r) ** 2)), sweeps


@jit
def _difference(n1, n2, A, B, A2, B2, u, v, u2, v2):
    psi = np.zeros((n1, n2), dtype=np.complex128)
    for a in range(A.shape[0]):
        for b in range(B.shape[0]):
            psi[A[a], B[b]] += u[a] * v[b]
    for a in range(A2.shape[0]):
        for b in range(B2.shape[0]):
            psi[A2[a], B2[b]] -= u2[a] * v2[b]
    return psi


@jit
def stability_descent(T1, T2, n1, n2, A, B, A2, B2, u, v, u2, v2, max_iters, tol):
    """Block minimization of ``||M(u v^T - u2 v2^T)||`` on the unit sphere.

    ``T1``/``T2`` are the coefficient blocks of the map on the supports
    ``(A, B)`` and ``(A2, B2)`` (0-based index arrays). Blocks are updated in
    the order u, v, u2, v2 by exact least squares, then the difference is
    rescaled to unit Frobenius norm. Returns the factors and the final value
    ``||M(psi)|| / ||psi||_F``.
    """
    u = u.astype(np.complex128).copy()
    v = v.astype(np.complex128).copy()
    u2 = u2.astype(np.complex128).copy()
    v2 = v2.astype(np.complex128).copy()
    prev = np.inf
    value = np.inf
    for it in range(max_iters):
        c = _contract_u(T2, u2) @ v2
        u = _solve_normal(_contract_v(T1, v), c)
        v = _solve_normal(_contract_u(T1, u), c)
        c = _contract_u(T1, u) @ v
        u2 = _solve_normal(_contract_v(T2, v2), c)
        v2 = _solve_normal(_contract_u(T2, u2), c)
        u, v = _balance(u, v)
        u2, v2 = _balance(u2, v2)
        psi = _difference(n1, n2, A, B, A2, B2, u, v, u2, v2)
        nrm = np.sqrt(np.sum(np.abs(psi) ** 2))
        if not nrm > 0.0:
            break
        s = 1.0 / np.sqrt(nrm)
        u *= s
        v *= s
        u2 *= s
        v2 *= s
        r = _contract_u(T1, u) @ v - _contract_u(T2, u2) @ v2
        value = np.sqrt(np.sum(np.abs(r) ** 2))
        if abs(prev - value) <= tol * max(value, 1e-300) or value < 1e-14:
            break
        prev = value
    return u, v, u2, v2, value


@jit
def rank2_alternating_projections(K, X0, rank, max_iters, tol):
    """Alternate between ``span(K)`` and matrices of rank <= ``rank``.

    ``K`` holds an orthonormal basis of the kernel as columns, vectorized
    row-major, and ``X0`` is the start (shape n1 x n2). Returns the last
    kernel iterate, normalized, and its trailing singular mass.
    """
    n1, n2 = X0.shape
    Kh = K.conj().T
    X = X0.astype(np.complex128).copy()
    tail = np.inf
    for it in range(max_iters):
        c = Kh @ X.ravel()
        X = (K @ c).reshape(n1, n2)
        X = X / np.sqrt(np.sum(np.abs(X) ** 2))
        U, s, Vh = np.linalg.svd(X)
        tail = np.sqrt(np.sum(s[rank:] ** 2))
        if tail <= tol:
            break
        X = np.ascontiguousarray(U[:, :rank] * s[:rank]) @ np.ascontiguousarray(Vh[:rank, :])
    return X, tail


# the scalar loop only pays off when compiled
circ_conv_direct = circ_conv_loop if HAVE_NUMBA else circ_conv_gather
