#!/usr/bin/env python3
"""Arbitrary-precision reference values for the frozen expectations in the test suite.

Everything here is computed with mpmath at elevated precision and with plain
trapezoid grids, independently of the Rust quadrature and Bessel code paths.

Usage:
    python3 gen_oracles.py special       # special-function reference values
    python3 gen_oracles.py channel A     # channel elements for A_I = A_II = A
"""
import sys

import mpmath as mp

mp.mp.dps = 30

MASS = mp.mpf("0.1")
WIDTH = mp.mpf("2")
OMEGA0 = mp.mpf("4.71")


def special():
    print("gamma(1/2 + i) =", mp.gamma(mp.mpc(0.5, 1)))
    print("K_0(1)         =", mp.besselk(0, 1))
    print("K_1/2(1)       =", mp.besselk(0.5, 1))
    print("I_1/2(1)       =", mp.besseli(0.5, 1))
    print("sin2r(1,1)     =", 1 / (1 + mp.exp(2 * mp.pi)))
    print("K_{1/2+2i}(0.3)=", mp.besselk(mp.mpc(0.5, 2), 0.3))
    print("K_{-1/2+i}(0.5)=", mp.besselk(mp.mpc(-0.5, 1), 0.5))
    print("I_{-1/2+i}(0.5)=", mp.besseli(mp.mpc(-0.5, 1), 0.5))
    print("I_{1/2-i}(0.5) =", mp.besseli(mp.mpc(0.5, -1), 0.5))
    # Rindler continuum spinor at Omega/a = 1, m chi = 0.5, a = 1, m = 1.
    nu = mp.mpf(1)
    x = mp.mpf("0.5")
    kp = mp.besselk(mp.mpc(0.5, nu), x)
    km = mp.besselk(mp.mpc(-0.5, nu), x)
    pref = mp.sqrt(1 * mp.cosh(mp.pi * nu) / (2 * mp.pi**2 * 1))
    print("w+ upper       =", pref * (kp + 1j * km))
    print("w+ lower       =", pref * (-kp + 1j * km))


def rindler_packet(accel, a):
    """Normalized packet sampled on a uniform log-grid (trapezoid weights)."""
    chi0 = 1 / accel
    nu0 = OMEGA0 / a
    half = mp.sqrt(20) * WIDTH / chi0
    n = 401
    h = 2 * half / (n - 1)
    us = [mp.log(chi0) - half + j * h for j in range(n)]
    vals = []
    for u in us:
        chi = mp.exp(u)
        x = MASS * chi
        im = mp.besseli(mp.mpc(-0.5, nu0), x) * mp.exp(-mp.pi * nu0 / 2)
        ip = mp.besseli(mp.mpc(0.5, nu0), x) * mp.exp(-mp.pi * nu0 / 2)
        env = mp.exp(-2 * (chi0 / WIDTH * (u - mp.log(chi0))) ** 2)
        vals.append((chi, ((im + 1j * ip) * env, (im - 1j * ip) * env)))
    norm = mp.fsum(h * chi * (abs(p[0]) ** 2 + abs(p[1]) ** 2) for chi, p in vals)
    c = 1 / mp.sqrt(norm)
    return h, [(chi, (p[0] * c, p[1] * c)) for chi, p in vals]


def overlap(h, packet, nu, a):
    pref = mp.sqrt(MASS * mp.cosh(mp.pi * nu) / (2 * mp.pi**2 * a))
    acc = mp.mpc(0)
    for chi, (p1, p2) in packet:
        x = MASS * chi
        kp = mp.besselk(mp.mpc(0.5, nu), x)
        km = mp.besselk(mp.mpc(-0.5, nu), x)
        w1 = pref * (kp + 1j * km)
        w2 = pref * (-kp + 1j * km)
        acc += h * chi * (mp.conj(p1) * w1 + mp.conj(p2) * w2)
    return acc


def channel(accel):
    accel = mp.mpf(accel)
    a = accel
    h, packet = rindler_packet(accel, a)
    dnu = mp.mpf("0.05")
    nus = [dnu * (j + mp.mpf("0.5")) for j in range(int(12 / dnu))]
    n_diag = mp.mpf(0)
    n_cross = mp.mpc(0)
    for nu in nus:
        c = overlap(h, packet, nu, a)
        fermi = 1 / (1 + mp.exp(2 * mp.pi * nu))
        cross = mp.exp(mp.pi * nu) / (1 + mp.exp(2 * mp.pi * nu))
        # c_II^- = conj(c_II^+) = conj(c_I^+) for mirrored packets.
        n_diag += a * dnu * abs(c) ** 2 * fermi
        n_cross += a * dnu * c * mp.conj(c) * cross
    eps = 2 * n_diag
    x = -2 * n_cross
    n = 1 - eps
    root = mp.sqrt((n - n) ** 2 - 4 * abs(x) ** 2)
    arg = (1 + n * n + abs(x) ** 2 + root.real + root.imag) / 2
    print("A =", accel)
    print("  1 - N_I^+   =", mp.nstr(eps, 12))
    print("  N_cross^+   =", mp.nstr(x, 12))
    print("  bound       =", mp.nstr(mp.log(arg), 12))


if __name__ == "__main__":
    if sys.argv[1] == "special":
        special()
    else:
        channel(sys.argv[2])
