"""Compiled inner loops.

Everything here works on plain float64 arrays in reduced coordinates: a
strategy over ``k`` actions is stored as its first ``k - 1`` probabilities.
The public modules wrap these with validation and dataclasses; the long
simulation loops stay here so a 10^6 step run takes well under a second.
"""
import numpy as np
from numba import njit

GA = 0
GASPP = 1
IGAPP = 2
GIGAWOLF = 3

CONTINUE = 0
TERMINATED = 1
GAMMA_SHRUNK = 2

STOP_MAX_ITERS = 0
STOP_TERMINATED = 1
STOP_WINDOW = 2

# Slack on the sum constraint before the threshold step runs. The threshold
# step can leave the sum a few ulps above one; without slack a second
# projection would move the point again and idempotence would be lost.
SUM_SLACK = 1e-13


@njit(cache=True)
def _threshold(x, out):
    """Sort-and-threshold projection of ``x`` onto {z >= 0, sum(z) = 1}."""
    d = x.shape[0]
    u = np.sort(x)[::-1]
    css = 0.0
    theta = 0.0
    for i in range(d):
        css += u[i]
        t = (css - 1.0) / (i + 1)
        if u[i] - t > 0.0:
            theta = t
    s = 0.0
    for i in range(d):
        v = x[i] - theta
        out[i] = v if v > 0.0 else 0.0
        s += out[i]
    return s


@njit(cache=True)
def project_into(x, out):
    """Euclidean projection of ``x`` onto {z >= 0, sum(z) <= 1}, into ``out``."""
    d = x.shape[0]
    s = 0.0
    for i in range(d):
        v = x[i] if x[i] > 0.0 else 0.0
        out[i] = v
        s += v
    if s <= 1.0 + SUM_SLACK:
        return
    s = _threshold(x, out)
    # for large |x| the threshold carries an O(eps * |x|) error; a pass on
    # the O(1) result removes it so the output is a fixed point
    for _ in range(3):
        if s <= 1.0 + SUM_SLACK:
            break
        s = _threshold(out.copy(), out)


@njit(cache=True)
def reduced_gradient(M, y, out):
    """Gradient of ``x -> full(x)^T M full(y)`` in reduced coordinates.

    ``out[i] = v[i] - v[-1]`` with ``v = M @ full(y)``.
    """
    k, l = M.shape
    last = 1.0
    for j in range(l - 1):
        last -= y[j]
    v_last = 0.0
    for j in range(l - 1):
        v_last += M[k - 1, j] * y[j]
    v_last += M[k - 1, l - 1] * last
    for i in range(k - 1):
        vi = 0.0
        for j in range(l - 1):
            vi += M[i, j] * y[j]
        vi += M[i, l - 1] * last
        out[i] = vi - v_last


@njit(cache=True)
def _blend_wolf(x, z, g, eta, x_new, z_new):
    d = x.shape[0]
    xh = np.empty(d)
    project_into(x + eta * g, xh)
    project_into(z + (eta / 3.0) * g, z_new)
    num = 0.0
    den = 0.0
    for i in range(d):
        num += (z_new[i] - z[i]) ** 2
        den += (z_new[i] - xh[i]) ** 2
    ratio = 1.0
    if den > 0.0:
        ratio = np.sqrt(num) / np.sqrt(den)
        if ratio > 1.0:
            ratio = 1.0
    for i in range(d):
        x_new[i] = xh[i] + ratio * (z_new[i] - xh[i])


@njit(cache=True)
def _agent_update(alg, M, x, z, y, gy, y_pred, eta, gamma, gx, x_new, z_new):
    d = x.shape[0]
    for i in range(d):
        z_new[i] = z[i]
    if alg == GA:
        project_into(x + eta * gx, x_new)
    elif alg == GASPP:
        g2 = np.empty(d)
        reduced_gradient(M, y_pred, g2)
        project_into(x + eta * g2, x_new)
    elif alg == IGAPP:
        g2 = np.empty(d)
        reduced_gradient(M, y + gamma * gy, g2)
        project_into(x + eta * g2, x_new)
    else:
        _blend_wolf(x, z, gx, eta, x_new, z_new)


@njit(cache=True)
def _within(u, v, tol):
    for i in range(u.shape[0]):
        if abs(u[i] - v[i]) > tol:
            return False
    return True


@njit(cache=True)
def bimatrix_step(R, CT, alg, eta, mu, gamma, a, b, za, zb, term_tol,
                  a_new, b_new, za_new, zb_new, pa, pb, ga, gb, gamma_new):
    """One joint update of two agents; returns the step outcome code.

    ``alg``, ``eta``, ``mu`` and ``gamma`` are length-2 arrays (row, column).
    ``pa``/``pb`` receive the projected forecasts when any agent runs GA-SPP
    and NaN otherwise. ``ga``/``gb`` receive the gradients at (a, b).
    """
    reduced_gradient(R, b, ga)
    reduced_gradient(CT, a, gb)
    spp = alg[0] == GASPP or alg[1] == GASPP
    if spp:
        # The forecast of an agent is made by its opponent, with the
        # opponent's prediction length when the opponent predicts.
        gam_a = gamma[1] if alg[1] == GASPP else gamma[0]
        gam_b = gamma[0] if alg[0] == GASPP else gamma[1]
        project_into(a + gam_a * ga, pa)
        project_into(b + gam_b * gb, pb)
    else:
        pa[:] = np.nan
        pb[:] = np.nan

    _agent_update(alg[0], R, a, za, b, gb, pb, eta[0], gamma[0], ga, a_new, za_new)
    _agent_update(alg[1], CT, b, zb, a, ga, pa, eta[1], gamma[1], gb, b_new, zb_new)

    gamma_new[0] = gamma[0]
    gamma_new[1] = gamma[1]
    if not spp:
        return CONTINUE
    if _within(pa, a, term_tol) and _within(pb, b, term_tol):
        a_new[:] = a
        b_new[:] = b
        za_new[:] = za
        zb_new[:] = zb
        return TERMINATED
    if _within(a_new, a, term_tol) and _within(b_new, b, term_tol):
        a_new[:] = a
        b_new[:] = b
        za_new[:] = za
        zb_new[:] = zb
        gamma_new[0] = mu[0] * gamma[0]
        gamma_new[1] = mu[1] * gamma[1]
        return GAMMA_SHRUNK
    return CONTINUE


@njit(cache=True)
def _max_change(u, v):
    out = 0.0
    for i in range(u.shape[0]):
        c = abs(u[i] - v[i])
        if c > out:
            out = c
    return out


@njit(cache=True)
def bimatrix_run(R, CT, alg, eta, mu, gamma0, a0, b0, max_iters, tol, window,
                 stride, term_tol, rec_k, rec_a, rec_b, rec_pa, rec_pb, rec_ga,
                 rec_gb, rec_gamma, rec_out, a, b, gamma):
    """Iterate ``bimatrix_step``; final state is written to ``a``, ``b``, ``gamma``.

    Returns ``(n_recorded, iterations, stop_code)``.
    """
    a[:] = a0
    b[:] = b0
    gamma[:] = gamma0
    za = a0.copy()
    zb = b0.copy()
    m1 = a0.shape[0]
    n1 = b0.shape[0]
    a_new = np.empty(m1)
    b_new = np.empty(n1)
    za_new = np.empty(m1)
    zb_new = np.empty(n1)
    pa = np.empty(m1)
    pb = np.empty(n1)
    ga = np.empty(m1)
    gb = np.empty(n1)
    gamma_new = np.empty(2)
    n_rec = 0
    quiet = 0
    stop = STOP_MAX_ITERS
    k = 0
    while k < max_iters:
        out = bimatrix_step(R, CT, alg, eta, mu, gamma, a, b, za, zb, term_tol,
                            a_new, b_new, za_new, zb_new, pa, pb, ga, gb, gamma_new)
        change = max(_max_change(a_new, a), _max_change(b_new, b))
        if out == CONTINUE:
            if change < tol:
                quiet += 1
            else:
                quiet = 0
        last = out == TERMINATED or quiet >= window or k == max_iters - 1
        if k % stride == 0 or last:
            rec_k[n_rec] = k
            rec_a[n_rec] = a
            rec_b[n_rec] = b
            rec_pa[n_rec] = pa
            rec_pb[n_rec] = pb
            rec_ga[n_rec] = ga
            rec_gb[n_rec] = gb
            rec_gamma[n_rec] = gamma
            rec_out[n_rec] = out
            n_rec += 1
        a[:] = a_new
        b[:] = b_new
        za[:] = za_new
        zb[:] = zb_new
        gamma[:] = gamma_new
        k += 1
        if out == TERMINATED:
            stop = STOP_TERMINATED
            break
        if quiet >= window:
            stop = STOP_WINDOW
            break
    return n_rec, k, stop


# -- n-player games -----------------------------------------------------------
#
# Strategies of p players live in a padded (p, kmax - 1) array X; player i
# uses X[i, :sizes[i] - 1]. Payoffs are a (p, prod(sizes)) array, the joint
# action index being row-major over players (last player fastest).


@njit(cache=True)
def _full_prob(X, sizes, j, a):
    if a < sizes[j] - 1:
        return X[j, a]
    last = 1.0
    for t in range(sizes[j] - 1):
        last -= X[j, t]
    return last


@njit(cache=True)
def tensor_gradient(P, sizes, i, X, out):
    """Reduced gradient of player ``i``'s expected payoff at profile ``X``."""
    p = sizes.shape[0]
    ki = sizes[i]
    v = np.zeros(ki)
    total = P.shape[1]
    digits = np.zeros(p, dtype=np.int64)
    # Cache full opponent probabilities so the inner loop is a product.
    kmax = 0
    for j in range(p):
        if sizes[j] > kmax:
            kmax = sizes[j]
    probs = np.empty((p, kmax))
    for j in range(p):
        for a in range(sizes[j]):
            probs[j, a] = _full_prob(X, sizes, j, a)
    for t in range(total):
        w = 1.0
        for j in range(p):
            if j != i:
                w *= probs[j, digits[j]]
        v[digits[i]] += P[i, t] * w
        # advance mixed-radix counter, last player fastest
        j = p - 1
        while j >= 0:
            digits[j] += 1
            if digits[j] < sizes[j]:
                break
            digits[j] = 0
            j -= 1
    for a in range(ki - 1):
        out[a] = v[a] - v[ki - 1]


@njit(cache=True)
def tensor_step(P, sizes, alg, eta, mu, gamma, X, Z, term_tol,
                X_new, Z_new, Xp, G):
    """Joint update of all players with a shared prediction length ``gamma``.

    Returns ``(outcome, new_gamma)``.
    """
    p = sizes.shape[0]
    for i in range(p):
        tensor_gradient(P, sizes, i, X, G[i])
    spp = False
    igapp = False
    for i in range(p):
        if alg[i] == GASPP:
            spp = True
        if alg[i] == IGAPP:
            igapp = True
    Xp[:, :] = np.nan
    if spp:
        for i in range(p):
            d = sizes[i] - 1
            project_into(X[i, :d] + gamma * G[i, :d], Xp[i, :d])
    Xraw = X.copy()
    if igapp:
        for i in range(p):
            d = sizes[i] - 1
            for a in range(d):
                Xraw[i, a] = X[i, a] + gamma * G[i, a]
    for i in range(p):
        d = sizes[i] - 1
        Z_new[i, :] = Z[i, :]
        if alg[i] == GA:
            project_into(X[i, :d] + eta[i] * G[i, :d], X_new[i, :d])
        elif alg[i] == GASPP:
            g2 = np.empty(d)
            tensor_gradient(P, sizes, i, Xp, g2)
            project_into(X[i, :d] + eta[i] * g2, X_new[i, :d])
        elif alg[i] == IGAPP:
            g2 = np.empty(d)
            tensor_gradient(P, sizes, i, Xraw, g2)
            project_into(X[i, :d] + eta[i] * g2, X_new[i, :d])
        else:
            _blend_wolf(X[i, :d], Z[i, :d], G[i, :d].copy(), eta[i],
                        X_new[i, :d], Z_new[i, :d])
    if not spp:
        return CONTINUE, gamma
    pred_eq = True
    move_eq = True
    for i in range(p):
        d = sizes[i] - 1
        if not _within(Xp[i, :d], X[i, :d], term_tol):
            pred_eq = False
        if not _within(X_new[i, :d], X[i, :d], term_tol):
            move_eq = False
    if pred_eq or move_eq:
        X_new[:, :] = X
        Z_new[:, :] = Z
    if pred_eq:
        return TERMINATED, gamma
    if move_eq:
        return GAMMA_SHRUNK, mu * gamma
    return CONTINUE, gamma


@njit(cache=True)
def tensor_run(P, sizes, alg, eta, mu, gamma0, X0, max_iters, tol, window,
               stride, term_tol, rec_k, rec_X, rec_Xp, rec_G, rec_gamma,
               rec_out, X):
    """Iterate ``tensor_step``. Returns ``(n_recorded, iterations, stop, gamma)``."""
    X[:, :] = X0
    Z = X0.copy()
    X_new = np.zeros_like(X0)
    Z_new = np.zeros_like(X0)
    Xp = np.empty_like(X0)
    G = np.zeros_like(X0)
    gamma = gamma0
    n_rec = 0
    quiet = 0
    stop = STOP_MAX_ITERS
    k = 0
    while k < max_iters:
        out, gamma_new = tensor_step(P, sizes, alg, eta, mu, gamma, X, Z,
                                     term_tol, X_new, Z_new, Xp, G)
        change = 0.0
        for i in range(sizes.shape[0]):
            d = sizes[i] - 1
            c = _max_change(X_new[i, :d], X[i, :d])
            if c > change:
                change = c
        if out == CONTINUE:
            if change < tol:
                quiet += 1
            else:
                quiet = 0
        last = out == TERMINATED or quiet >= window or k == max_iters - 1
        if k % stride == 0 or last:
            rec_k[n_rec] = k
            rec_X[n_rec] = X
            rec_Xp[n_rec] = Xp
            rec_G[n_rec] = G
            rec_gamma[n_rec] = gamma
            rec_out[n_rec] = out
            n_rec += 1
        X[:, :] = X_new
        Z[:, :] = Z_new
        gamma = gamma_new
        k += 1
        if out == TERMINATED:
            stop = STOP_TERMINATED
            break
        if quiet >= window:
            stop = STOP_WINDOW
            break
    return n_rec, k, stop, gamma
