# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the loops in _pykernels.py (same signatures and results)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

cdef enum:
    CLASSIFY = 0


def best_split(double[:, ::1] X, double[::1] y, double[::1] w, cnp.int64_t[::1] idx,
               cnp.int64_t[::1] features, int task, Py_ssize_t min_leaf):
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t nf = features.shape[0]
    cdef Py_ssize_t fi, k, f, r
    cdef int best_f = -1
    cdef double best_t = 0.0, best_s = INFINITY
    cdef double wl, wt, wr, pw, pt, pr, score, fscore, t
    cdef Py_ssize_t fk
    if n < 2 * min_leaf:
        return best_f, best_t, best_s
    cdef double[::1] xcol = np.empty(n)
    cdef double[::1] xs = np.empty(n)
    cdef double[::1] ws = np.empty(n)
    cdef double[::1] ys = np.empty(n)
    cdef cnp.int64_t[::1] order
    for fi in range(nf):
        f = features[fi]
        for k in range(n):
            xcol[k] = X[idx[k], f]
        order = np.argsort(np.asarray(xcol), kind="stable")
        for k in range(n):
            r = idx[order[k]]
            xs[k] = xcol[order[k]]
            ws[k] = w[r]
            ys[k] = y[r]
        wt = 0.0
        pt = 0.0
        for k in range(n):
            wt += ws[k]
            pt += ws[k] * ys[k]
        wl = 0.0
        pw = 0.0
        fscore = INFINITY
        fk = -1
        for k in range(n - 1):
            wl += ws[k]
            pw += ws[k] * ys[k]
            if k + 1 < min_leaf or n - (k + 1) < min_leaf:
                continue
            if not (xs[k] < xs[k + 1]):
                continue
            wr = wt - wl
            if not (wl > 0 and wr > 0):
                continue
            pr = pt - pw
            if task == CLASSIFY:
                score = 2.0 * pw * (wl - pw) / wl + 2.0 * pr * (wr - pr) / wr
            else:
                score = -(pw * pw / wl + pr * pr / wr)
            if score < fscore:
                fscore = score
                fk = k
        if fk >= 0 and fscore < best_s:
            best_s = fscore
            best_f = <int>f
            t = 0.5 * (xs[fk] + xs[fk + 1])
            best_t = xs[fk] if t >= xs[fk + 1] else t
    return best_f, best_t, best_s


def tree_apply(double[:, ::1] X, cnp.int64_t[::1] feature, double[::1] threshold,
               cnp.int64_t[::1] left, cnp.int64_t[::1] right):
    cdef Py_ssize_t n = X.shape[0], i
    cdef cnp.int64_t node
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        o[i] = node
    return out


def svc_dual_cd(double[:, ::1] K, double[::1] y, double C, double tol, int max_epochs):
    cdef Py_ssize_t n = K.shape[0], i, j
    alpha_arr = np.zeros(n)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] qa = np.zeros(n)
    cdef double viol = INFINITY, g, a, pg, new, d, tmp
    cdef int epoch = 0
    for epoch in range(1, max_epochs + 1):
        viol = 0.0
        for i in range(n):
            g = qa[i] - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = g if g < 0.0 else 0.0
            elif a >= C:
                pg = g if g > 0.0 else 0.0
            else:
                pg = g
            if fabs(pg) > viol:
                viol = fabs(pg)
            if pg != 0.0:
                new = a - g / K[i, i]
                if new < 0.0:
                    new = 0.0
                if new > C:
                    new = C
                d = new - a
                if d != 0.0:
                    alpha[i] = new
                    tmp = d * y[i]
                    for j in range(n):
                        qa[j] += tmp * (y[j] * K[i, j])
        if viol < tol:
            break
    return alpha_arr, epoch, viol


def svr_dual_cd(double[:, ::1] K, double[::1] y, double C, double eps, double tol, int max_epochs):
    cdef Py_ssize_t n = K.shape[0], i, j
    beta_arr = np.zeros(n)
    cdef double[::1] beta = beta_arr
    cdef double[::1] kb = np.zeros(n)
    cdef double viol = INFINITY, kii, b, u, new, d, step
    cdef int epoch = 0
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
            if new < -C:
                new = -C
            if new > C:
                new = C
            d = new - b
            if d != 0.0:
                step = fabs(d) * kii
                if step > viol:
                    viol = step
                beta[i] = new
                for j in range(n):
                    kb[j] += d * K[i, j]
        if viol < tol:
            break
    return beta_arr, epoch, viol
