"""Constructive generators shared by the property suites."""

import math

from blowdown.rbd import standard_pCq

CONFIGS = {p: standard_pCq(2, p) for p in (2, 3, 5)}


def cor_lift(p: int, a: int, bs, sign: int) -> tuple:
    """A characteristic K in R_{8+p} with K.u_i = 0 (i <= p-2) and K.u_{p-1} = sign * p for 2C_p.

    The roots force e10..e_{8+p} to share one coefficient c; the end sphere
    pairing is 6a + 2(b1 + ... + b9) + p c, so b1 is nudged by 2 until p
    divides 6a + 2S and c is then solved for.
    """
    a = a | 1
    bs = [b | 1 for b in bs[:9]]
    while (6 * a + 2 * sum(bs)) % p:
        bs[0] += 2
    c = (sign * p - 6 * a - 2 * sum(bs)) // p
    assert c % 2
    return (a,) + tuple(bs) + (c,) * (p - 1)


def positive_chamber(c) -> tuple:
    a = math.isqrt(sum(x * x for x in c)) + 1
    return (a,) + tuple(c)
