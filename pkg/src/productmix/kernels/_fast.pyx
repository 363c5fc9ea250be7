# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled demand kernels.

Typed twins of productmix.kernels.pure; see that module for the input
conventions.  Callers guarantee that every scaled magnitude fits comfortably
in 64 bits and that n <= 62 (so demand bitmasks fit in a C long long); the
dispatcher in productmix.kernels enforces this.
"""

from libc.stdlib cimport malloc, free


cdef inline long long * _as_array(list price, Py_ssize_t n):
    cdef long long *p = <long long *> malloc(n * sizeof(long long))
    cdef Py_ssize_t j
    for j in range(n):
        p[j] = price[j]
    return p


def indirect_utility(list vals, list weights, list price):
    cdef Py_ssize_t k = len(vals), n = len(price), i, j
    cdef long long total = 0, best, s
    cdef long long *p = _as_array(price, n)
    cdef list row
    try:
        for i in range(k):
            row = <list> vals[i]
            best = 0
            for j in range(n):
                s = <long long> row[j] - p[j]
                if s > best:
                    best = s
            total += <long long> weights[i] * best
    finally:
        free(p)
    return total


def demand_masks(list vals, list price):
    cdef Py_ssize_t k = len(vals), n = len(price), i, j
    cdef long long best, s, mask
    cdef long long *p = _as_array(price, n)
    cdef list row, out = []
    try:
        for i in range(k):
            row = <list> vals[i]
            best = 0
            for j in range(n):
                s = <long long> row[j] - p[j]
                if s > best:
                    best = s
            mask = 1 if best == 0 else 0
            for j in range(n):
                if <long long> row[j] - p[j] == best:
                    mask |= <long long> 1 << (j + 1)
            out.append(mask)
    finally:
        free(p)
    return out


def unique_bundle(list vals, list weights, list price):
    cdef Py_ssize_t k = len(vals), n = len(price), i, j
    cdef long long best, s
    cdef Py_ssize_t good, ties
    cdef long long *p = _as_array(price, n)
    cdef long long *bundle = <long long *> malloc((n + 1) * sizeof(long long))
    cdef list row
    cdef bint marginal = False
    for j in range(n + 1):
        bundle[j] = 0
    try:
        for i in range(k):
            row = <list> vals[i]
            best = 0
            good = 0
            ties = 1
            for j in range(n):
                s = <long long> row[j] - p[j]
                if s > best:
                    best = s
                    good = j + 1
                    ties = 1
                elif s == best:
                    ties += 1
            if ties > 1:
                marginal = True
                break
            bundle[good] += <long long> weights[i]
        if marginal:
            return None
        return [bundle[j] for j in range(n + 1)]
    finally:
        free(bundle)
        free(p)


def min_step(list vals, list price, smask):
    cdef Py_ssize_t k = len(vals), n = len(price), i, j
    cdef long long best, s, outside, mu, best_mu = -1
    cdef long long sm = smask
    cdef long long *p = _as_array(price, n)
    cdef list row
    cdef bint inside
    try:
        for i in range(k):
            row = <list> vals[i]
            best = 0
            for j in range(n):
                s = <long long> row[j] - p[j]
                if s > best:
                    best = s
            if best == 0:
                continue
            inside = True
            outside = 0
            for j in range(n):
                s = <long long> row[j] - p[j]
                if not (sm >> (j + 1)) & 1:
                    if s == best:
                        inside = False
                        break
                    if s > outside:
                        outside = s
            if not inside:
                continue
            mu = best - outside
            if best_mu < 0 or mu < best_mu:
                best_mu = mu
    finally:
        free(p)
    return best_mu
