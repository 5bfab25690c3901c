"""Regenerate the Chebyshev coefficient tables used by binloc.bessel.

Fits, in 60-digit arithmetic against mpmath's besseli/besselk:

  small: t = x**2/4 on [0, 1]  ->  I0(x)  and  K0(x) + ln(x/2) I0(x)
  large: u = 2/x on (0, 1]     ->  sqrt(x) exp(x) K0(x)

Usage: python3 scripts/gen_k0_coeffs.py
"""
import mpmath as mp

mp.mp.dps = 60


def cheb_coeffs(f, n):
    nodes = [mp.cos(mp.pi * (j + mp.mpf(1) / 2) / n) for j in range(n)]
    vals = [f(s) for s in nodes]
    out = []
    for k in range(n):
        acc = mp.fsum(vals[j] * mp.cos(mp.pi * k * (j + mp.mpf(1) / 2) / n) for j in range(n))
        out.append(2 * acc / n)
    out[0] /= 2
    return out


def trim(cs, tol=mp.mpf("1e-19")):
    while abs(cs[-1]) < tol:
        cs.pop()
    return cs


def x_small(s):
    t = (s + 1) / 2
    return 2 * mp.sqrt(t)


def i0_small(s):
    return mp.besseli(0, x_small(s))


def p_small(s):
    x = x_small(s)
    if x == 0:
        return -mp.euler
    return mp.besselk(0, x) + mp.log(x / 2) * mp.besseli(0, x)


def g_large(s):
    u = (s + 1) / 2
    if u == 0:
        return mp.sqrt(mp.pi / 2)
    x = 2 / u
    return mp.sqrt(x) * mp.exp(x) * mp.besselk(0, x)


def dump(name, cs):
    print(f"{name} = (")
    for c in cs:
        print(f"    {mp.nstr(c, 20, min_fixed=1, max_fixed=0)},")
    print(")")


if __name__ == "__main__":
    dump("_I0_SMALL", trim(cheb_coeffs(i0_small, 40)))
    dump("_P_SMALL", trim(cheb_coeffs(p_small, 40)))
    dump("_G_LARGE", trim(cheb_coeffs(g_large, 80)))
