"""Pure-Python term kernel: canonical monomials with Koszul signs.

This module is the reference implementation of the hot inner loops of the
engine.  A compiled twin (``_speedups``, built from ``_speedups.pyx``) exports
the same four functions; ``darbouxforge.kernel`` picks one at import time.
Both implementations must stay observationally identical — the test suite
cross-checks them on random inputs.

Encoding
--------
A monomial is a flat tuple ``(i0, e0, i1, e1, ...)`` of generator indices and
exponents, with indices strictly increasing and every exponent >= 1.  The
empty tuple is the unit monomial.  ``parities[i]`` is 0 or 1; generators of
odd parity square to zero and anticommute, so an odd index never carries an
exponent above 1 in a canonical monomial.

A term map is a dict ``{monomial: coefficient}`` with no zero coefficients
stored; coefficients are ``fractions.Fraction`` (any exact field element with
``+``/``*`` works).  The zero element is the empty dict.
"""

from __future__ import annotations


def merge_monomials(ma, mb, parities):
    """Multiply canonical monomials ``ma * mb``.

    Returns ``(sign, monomial)`` with ``sign`` +1 or -1, or ``None`` when the
    product vanishes because an odd generator gets squared.  The sign is the
    Koszul sign of interleaving the factors of ``mb`` into ``ma``: each odd
    factor of ``mb`` that crosses an odd factor of ``ma`` contributes -1.
    """
    if not ma:
        return 1, mb
    if not mb:
        return 1, ma
    # number of odd factors of `ma` not yet consumed by the merge
    odd_rem = 0
    for t in range(0, len(ma), 2):
        if parities[ma[t]] and (ma[t + 1] & 1):
            odd_rem += 1
    res = []
    flips = 0
    ia, ib = 0, 0
    na, nb = len(ma), len(mb)
    while ia < na and ib < nb:
        ga = ma[ia]
        gb = mb[ib]
        if ga < gb:
            ea = ma[ia + 1]
            res.append(ga)
            res.append(ea)
            if parities[ga] and (ea & 1):
                odd_rem -= 1
            ia += 2
        elif ga > gb:
            eb = mb[ib + 1]
            res.append(gb)
            res.append(eb)
            if parities[gb] and (eb & 1):
                flips += odd_rem
            ib += 2
        else:
            if parities[ga]:
                return None
            res.append(ga)
            res.append(ma[ia + 1] + mb[ib + 1])
            ia += 2
            ib += 2
    if ia < na:
        res.extend(ma[ia:])
    else:
        while ib < nb:
            gb = mb[ib]
            eb = mb[ib + 1]
            res.append(gb)
            res.append(eb)
            # odd_rem is zero here; kept explicit for symmetry with the loop
            ib += 2
    return (-1 if flips & 1 else 1), tuple(res)


def monomial_from_pairs(pairs, parities):
    """Canonicalize an unordered factor list ``[(index, exp), ...]``.

    Returns ``(sign, monomial)`` or ``None`` if an odd generator occurs with
    total exponent >= 2.  The sign counts odd-odd transpositions performed
    while sorting, i.e. the Koszul sign of the reordering.
    """
    items = [(int(i), int(e)) for i, e in pairs if e]
    for _, e in items:
        if e < 0:
            raise ValueError("negative exponent in monomial factor list")
    flips = 0
    # insertion sort; stable, counting odd-odd crossings
    for pos in range(1, len(items)):
        cur = items[pos]
        cur_odd = parities[cur[0]] and (cur[1] & 1)
        j = pos - 1
        while j >= 0 and items[j][0] > cur[0]:
            if cur_odd and parities[items[j][0]] and (items[j][1] & 1):
                flips += 1
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = cur
    res = []
    for g, e in items:
        if res and res[-2] == g:
            res[-1] += e
        else:
            res.append(g)
            res.append(e)
        if parities[g] and res[-1] >= 2:
            return None
    return (-1 if flips & 1 else 1), tuple(res)


def mul_terms(ta, tb, parities):
    """Multiply two term maps; drops cancelled terms."""
    if not ta or not tb:
        return {}
    out = {}
    for ma, ca in ta.items():
        for mb, cb in tb.items():
            hit = merge_monomials(ma, mb, parities)
            if hit is None:
                continue
            sign, mono = hit
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


def add_terms(ta, tb):
    """Add two term maps; drops cancelled terms."""
    if not tb:
        return dict(ta)
    out = dict(ta)
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
