"""Generate frozen Chebyshev coefficients for the mid-range Bessel band.

Fits g_nu(x) = sqrt(x) * exp(x) * K_nu(x) on [2, 16] with mpmath at 40
digits and writes the trimmed coefficient tables to
src/diskflow/_bessel_cheb.py.  Run manually when the band or degree
changes; the generated file is committed.
"""

import mpmath as mp

mp.mp.dps = 40

A, B = 2.0, 16.0
DEGREE = 72


def g(nu, x):
    return mp.sqrt(x) * mp.exp(x) * mp.besselk(nu, x)


def cheb_coeffs(f, n):
    # Chebyshev-Gauss nodes on [-1, 1], mapped to [A, B]
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n) for k in range(n)]
    vals = [f((B - A) / 2 * t + (B + A) / 2) for t in nodes]
    out = []
    for j in range(n):
        acc = mp.mpf(0)
        for k in range(n):
            acc += vals[k] * mp.cos(j * mp.pi * (k + mp.mpf(1) / 2) / n)
        out.append(2 * acc / n)
    out[0] /= 2  # Clenshaw convention: f = c0 + sum_{j>=1} c_j T_j
    return out


def trim(coeffs, tol=1e-17):
    n = len(coeffs)
    while n > 1 and abs(coeffs[n - 1]) < tol:
        n -= 1
    return coeffs[:n]


def main():
    c0 = trim(cheb_coeffs(lambda x: g(0, x), DEGREE))
    c1 = trim(cheb_coeffs(lambda x: g(1, x), DEGREE))
    lines = [
        '"""Chebyshev tables for sqrt(x)*exp(x)*K_nu(x) on [2, 16].',
        "",
        "Generated by tools/gen_bessel_cheb.py (mpmath, 40 digits); do not edit.",
        '"""',
        "",
        "import numpy as np",
        "",
        f"BAND_LO = {A!r}",
        f"BAND_HI = {B!r}",
        "",
    ]
    for name, cs in (("CHEB_G0", c0), ("CHEB_G1", c1)):
        lines.append(f"{name} = np.array([")
        for c in cs:
            lines.append(f"    {mp.nstr(c, 20)},")
        lines.append("])")
        lines.append("")
    with open("src/diskflow/_bessel_cheb.py", "w") as fh:
        fh.write("\n".join(lines))
    print(f"wrote {len(c0)} + {len(c1)} coefficients")


if __name__ == "__main__":
    main()
