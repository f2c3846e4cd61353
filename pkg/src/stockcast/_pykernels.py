"""Pure numpy implementations of the hot loops.

Mirrors ``_ckernels.pyx`` call for call.  Sums are accumulated in the same
order (``np.cumsum`` is sequential) so both backends choose the same splits.
"""
from __future__ import annotations

import numpy as np

CLASSIFY = 0
REGRESS = 1


def best_split(X, y, w, idx, features, task, min_leaf):
    """Best axis-aligned split of rows ``idx`` over ``features``.

    Returns ``(feature, threshold, score)`` with ``feature == -1`` when no
    admissible split exists.  ``score`` is the weighted child impurity (gini
    mass for classification, minus the between-group sum of squares term for
    regression); smaller is better.
    """
    n = idx.shape[0]
    best_f, best_t, best_s = -1, 0.0, np.inf
    if n < 2 * min_leaf:
        return best_f, best_t, best_s
    pos = np.arange(1, n)  # left child size for a cut after sorted position pos-1
    size_ok = (pos >= min_leaf) & (n - pos >= min_leaf)
    for f in features:
        xcol = X[idx, f]
        order = np.argsort(xcol, kind="stable")
        xs = xcol[order]
        ws = w[idx][order]
        ys = y[idx][order]
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        wl = np.cumsum(ws)[:-1]
        wt = wl[-1] + ws[-1]
        wr = wt - wl
        if task == CLASSIFY:
            pw = np.cumsum(ws * ys)[:-1]
            pt = pw[-1] + ws[-1] * ys[-1]
            pr = pt - pw
            with np.errstate(divide="ignore", invalid="ignore"):
                score = 2.0 * pw * (wl - pw) / wl + 2.0 * pr * (wr - pr) / wr
        else:
            sw = np.cumsum(ws * ys)[:-1]
            st = sw[-1] + ws[-1] * ys[-1]
            sr = st - sw
            with np.errstate(divide="ignore", invalid="ignore"):
                score = -(sw * sw / wl + sr * sr / wr)
        score = np.where(valid & (wl > 0) & (wr > 0), score, np.inf)
        k = int(np.argmin(score))
        if score[k] < best_s:
            best_s = float(score[k])
            best_f = int(f)
            t = 0.5 * (xs[k] + xs[k + 1])
            best_t = float(xs[k] if t >= xs[k + 1] else t)
    return best_f, best_t, best_s


def tree_apply(X, feature, threshold, left, right):
    """Leaf node index reached by every row of X."""
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = feature[node] >= 0
    while active.any():
        r = rows[active]
        nd = node[r]
        go_left = X[r, feature[nd]] <= threshold[nd]
        node[r] = np.where(go_left, left[nd], right[nd])
        active = feature[node] >= 0
    return node


def svc_dual_cd(K, y, C, tol, max_epochs):
    """Dual coordinate ascent for the hinge-loss SVM (no explicit bias).

    Minimizes 0.5 a'Qa - sum(a), Q_ij = y_i y_j K_ij, 0 <= a <= C, sweeping
    coordinates cyclically until the largest projected gradient is below tol.
    Returns (alpha, epochs_run, max_violation).
    """
    n = K.shape[0]
    alpha = np.zeros(n)
    qa = np.zeros(n)  # Q @ alpha
    viol = np.inf
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        viol = 0.0
        for i in range(n):
            g = qa[i] - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if abs(pg) > viol:
                viol = abs(pg)
            if pg != 0.0:
                qii = K[i, i]
                new = min(max(a - g / qii, 0.0), C)
                d = new - a
                if d != 0.0:
                    alpha[i] = new
                    qa += (d * y[i]) * (y * K[i])
        if viol < tol:
            break
    return alpha, epoch, viol


def svr_dual_cd(K, y, C, eps, tol, max_epochs):
    """Dual coordinate descent for epsilon-insensitive SVR.

    Minimizes 0.5 b'Kb - y'b + eps*|b|_1 over -C <= b <= C.  Returns
    (beta, epochs_run, max_step) where max_step is the largest K_ii-scaled
    coordinate move of the last sweep.
    """
    n = K.shape[0]
    beta = np.zeros(n)
    kb = np.zeros(n)
    viol = np.inf
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        viol = 0.0
        for i in range(n):
            kii = K[i, i]
            b = beta[i]
            u = kii * b - kb[i] + y[i]
            if u > eps:
                new = (u - eps) / kii
            elif u < -eps:
                new = (u + eps) / kii
            else:
                new = 0.0
            new = min(max(new, -C), C)
            d = new - b
            if d != 0.0:
                step = abs(d) * kii
                if step > viol:
                    viol = step
                beta[i] = new
                kb += d * K[i]
        if viol < tol:
            break
    return beta, epoch, viol
