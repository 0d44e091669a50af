# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled twin of ``_kernel_py``.

Same encoding, same four functions; see the pure-Python module for the
contract.  Coefficients stay arbitrary Python objects (Fraction), so results
are exact — the speedup comes from doing the tuple merges and dict updates in
C.
"""


def merge_monomials(tuple ma, tuple mb, tuple parities):
    cdef Py_ssize_t na = len(ma)
    cdef Py_ssize_t nb = len(mb)
    if na == 0:
        return 1, mb
    if nb == 0:
        return 1, ma
    cdef Py_ssize_t ia = 0, ib = 0, t
    cdef long odd_rem = 0, flips = 0
    cdef long ga, gb, ea, eb
    for t in range(0, na, 2):
        if <long> parities[<long> ma[t]] and ((<long> ma[t + 1]) & 1):
            odd_rem += 1
    cdef list res = []
    while ia < na and ib < nb:
        ga = <long> ma[ia]
        gb = <long> mb[ib]
        if ga < gb:
            ea = <long> ma[ia + 1]
            res.append(ga)
            res.append(ea)
            if <long> parities[ga] and (ea & 1):
                odd_rem -= 1
            ia += 2
        elif ga > gb:
            eb = <long> mb[ib + 1]
            res.append(gb)
            res.append(eb)
            if <long> parities[gb] and (eb & 1):
                flips += odd_rem
            ib += 2
        else:
            if <long> parities[ga]:
                return None
            res.append(ga)
            res.append((<long> ma[ia + 1]) + (<long> mb[ib + 1]))
            ia += 2
            ib += 2
    while ia < na:
        res.append(ma[ia])
        res.append(ma[ia + 1])
        ia += 2
    while ib < nb:
        res.append(mb[ib])
        res.append(mb[ib + 1])
        ib += 2
    return (-1 if flips & 1 else 1), tuple(res)


def monomial_from_pairs(pairs, tuple parities):
    cdef list items = [(int(i), int(e)) for i, e in pairs if e]
    cdef Py_ssize_t n = len(items)
    cdef Py_ssize_t pos, j
    cdef long flips = 0
    cdef long g, e
    cdef bint cur_odd
    cdef tuple cur
    for pos in range(n):
        if <long> (<tuple> items[pos])[1] < 0:
            raise ValueError("negative exponent in monomial factor list")
    for pos in range(1, n):
        cur = <tuple> items[pos]
        cur_odd = (<long> parities[<long> cur[0]]) != 0 and ((<long> cur[1]) & 1) != 0
        j = pos - 1
        while j >= 0 and <long> (<tuple> items[j])[0] > <long> cur[0]:
            if cur_odd and <long> parities[<long> (<tuple> items[j])[0]] \
                    and ((<long> (<tuple> items[j])[1]) & 1):
                flips += 1
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = cur
    cdef list res = []
    for pos in range(n):
        g = <long> (<tuple> items[pos])[0]
        e = <long> (<tuple> items[pos])[1]
        if res and <long> res[len(res) - 2] == g:
            res[len(res) - 1] = (<long> res[len(res) - 1]) + e
        else:
            res.append(g)
            res.append(e)
        if <long> parities[g] and (<long> res[len(res) - 1]) >= 2:
            return None
    return (-1 if flips & 1 else 1), tuple(res)


def mul_terms(dict ta, dict tb, tuple parities):
    cdef dict out = {}
    if not ta or not tb:
        return out
    cdef tuple ma, mb, mono
    cdef object ca, cb, c, acc, hit
    cdef long sign
    for ma, ca in ta.items():
        for mb, cb in tb.items():
            hit = merge_monomials(ma, mb, parities)
            if hit is None:
                continue
            sign = <long> (<tuple> hit)[0]
            mono = <tuple> (<tuple> hit)[1]
            c = ca * cb
            if sign < 0:
                c = -c
            acc = out.get(mono)
            if acc is None:
                out[mono] = c
            else:
                acc = acc + c
                if acc:
                    out[mono] = acc
                else:
                    del out[mono]
    return out


def add_terms(dict ta, dict tb):
    cdef dict out = dict(ta)
    cdef tuple mono
    cdef object c, acc
    if not tb:
        return out
    for mono, c in tb.items():
        acc = out.get(mono)
        if acc is None:
            out[mono] = c
        else:
            acc = acc + c
            if acc:
                out[mono] = acc
            else:
                del out[mono]
    return out
