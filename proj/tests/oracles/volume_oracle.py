"""Deterministic area oracle for the uncoupled double well, N=2.

area{ f(x)+f(y) <= v }, f(q) = q^4/4 - q^2/2, computed as int L(v - f(x)) dx
with L(e) = |{y : f(y) <= e}| in closed form.
"""
import mpmath as mp

mp.mp.dps = 30


def L(e):
    if e < -mp.mpf(1) / 4:
        return mp.mpf(0)
    s = mp.sqrt(1 + 4 * e)
    hi = mp.sqrt(1 + s)
    if e < 0:
        return 2 * (hi - mp.sqrt(1 - s))
    return 2 * hi


def f(q):
    return q ** 4 / 4 - q ** 2 / 2


def area(v):
    v = mp.mpf(v)
    xmax = mp.sqrt(1 + mp.sqrt(1 + 4 * (v + mp.mpf(1) / 4)))
    # breakpoints where v - f(x) crosses -1/4 and 0
    pts = [-xmax, xmax]
    for e in (mp.mpf(0), -mp.mpf(1) / 4):
        c = v - e  # f(x) = c
        d = 1 + 4 * c
        if d >= 0:
            for sgn in (1, -1):
                x2 = 1 + sgn * mp.sqrt(d)
                if x2 >= 0:
                    pts += [mp.sqrt(x2), -mp.sqrt(x2)]
    pts = sorted(set(p for p in pts if -xmax <= p <= xmax))
    return mp.quad(lambda x: L(v - f(x)), pts)


if __name__ == "__main__":
    for v in ("0.5", "0.2", "-0.3", "0.0"):
        print("area(%s) =" % v, mp.nstr(area(v), 15))
