#!/usr/bin/env python3
"""Independent re-evaluation of the constants ledger for a 1-D config.

Usage:
  ledger_oracle.py                 print the reference ledger as JSON
  ledger_oracle.py --check FILE    compare against `squeeze_sim constants --format json`
"""
import argparse
import json
import math
import sys

import numpy as np
from scipy.fft import dst
from scipy.optimize import brentq

REFERENCE = dict(L=1.0, n=128, K=128, beta_F=0.1, beta_p=0.1, theta_1=1.0, theta_2=1.0,
                 w0={1: 0.2}, v0={})


def coeffs(modes, K):
    c = np.zeros(K)
    for k, a in modes.items():
        c[k - 1] += a
    return c


def nodal(c, n, L):
    x = L * np.arange(1, n + 1) / (n + 1)
    k = np.arange(1, len(c) + 1)
    return np.sin(np.outer(x, k) * np.pi / L) @ c


def analysis(f):
    # type-I DST, scaled so that f_j = sum_k c_k sin(k pi j/(n+1))
    return dst(f, type=1) / (len(f) + 1)


def ledger(cfg):
    L, n, K = cfg["L"], cfg["n"], cfg["K"]
    bF, bp, th1, th2 = cfg["beta_F"], cfg["beta_p"], cfg["theta_1"], cfg["theta_2"]
    k = np.arange(1, K + 1)
    mu = (k * np.pi / L) ** 2
    nu = mu + mu ** 2
    mass = L / 2
    kf = np.arange(1, n + 1)
    mu_f = (kf * np.pi / L) ** 2
    integ = np.where(kf % 2 == 1, 2 * L / (kf * np.pi), 0.0)

    w0 = coeffs(cfg["w0"], K)
    v0 = coeffs(cfg["v0"], K)

    x = L * np.arange(1, n + 1) / (n + 1)
    phi = np.sin(np.outer(x, k) * np.pi / L)
    C = math.sqrt(np.max((phi ** 2) @ (1.0 / (mass * (1 + mu + mu ** 2)))))
    C_P = 1 / math.sqrt(mu[0])

    w_nodal = nodal(w0, n, L)
    kappa = min(np.min(w_nodal + th2), th2)
    r = kappa / (4 * C)

    def h2_lifted(f, trace):
        c = analysis(f - trace)
        sq = trace ** 2 * L + 2 * trace * np.dot(c, integ) + mass * np.sum((1 + mu_f + mu_f ** 2) * c ** 2)
        return math.sqrt(sq)

    w0_H2 = h2_lifted(w_nodal + th2, th2)
    v0_L2 = math.sqrt(mass * np.sum(v0 ** 2))
    G = -bF / (w_nodal + th2) ** 2 + bp * (th1 - 1)
    G0_H2 = h2_lifted(G, -bF / th2 ** 2 + bp * (th1 - 1))

    C_o = 16 * math.sqrt(C_P ** 2 + 1) / (kappa ** 3 * min(1, C_P ** -2))
    hb = kappa / (2 * C)
    C_o_star = 24 * C * C_o / kappa ** 3 * (w0_H2 + hb) ** 2 * math.sqrt(C ** 2 + 1)
    Ct = hb + w0_H2
    C1 = math.sqrt(4 * L / kappa ** 2 + 16 * Ct ** 2 / kappa ** 4 + (4 / kappa ** 2 + 16 * C * Ct / kappa ** 3) ** 2 * Ct ** 2)
    C2, C3 = 2 * C1 ** 3, 3 * C1 ** 4
    L_G = bF * C2
    L_G_star = L_G + bp * C_o + bp * C_o_star * (v0_L2 + hb)

    # delta_o: first crossing of ||T(t)s0 - s0||_X = r/2
    E = mass * (v0 ** 2 + nu * w0 ** 2)
    om = np.sqrt(nu)
    target = (r / 2) ** 2
    if 4 * E.sum() <= target:
        delta = math.inf
    else:
        f = lambda t: np.sum(4 * E * np.sin(om * t / 2) ** 2) - target
        step = 0.05 / om[E > 1e-12 * target].max()
        t = step
        while f(t) <= 0:
            t += step
        delta = brentq(f, t - step, t, xtol=1e-16, rtol=1e-15)

    inv = lambda a: math.inf if a <= 0 else 1 / a
    t1 = delta
    t2 = inv(2 * L_G_star)
    t3 = kappa / 2 * inv((L_G + bp * C_o) * kappa + 2 * C * (G0_H2 + bp * C_o * v0_L2))
    T0 = min(t1, t2, t3)

    C_theta = kappa * L_G / (2 * C) + G0_H2 + bp * C_o * (v0_L2 + hb)
    C_alpha = C_o_star * (v0_L2 + hb) + C_o
    C_beta = bp * C_alpha + L_G
    s0_DA = math.sqrt(mass * np.sum((1 + nu) * v0 ** 2)) + math.sqrt(mass * np.sum((1 + nu + nu ** 2) * w0 ** 2))
    L_V = (s0_DA + C_theta) * math.exp(L_G * T0)

    return dict(C_embed=C, C_P=C_P, kappa=kappa, r=r, M0=1.0, C_o=C_o, C_o_star=C_o_star, C1=C1, C2=C2, C3=C3,
                L_G=L_G, L_G_star=L_G_star, delta_o=delta, T0=T0, L_V=L_V, C_theta=C_theta, C_alpha=C_alpha,
                C_beta=C_beta, w0_H2=w0_H2, v0_L2=v0_L2, G0_H2=G0_H2, s0_DA=s0_DA,
                T0_delta_o=t1, T0_contraction=t2, T0_ball=t3)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", help="ledger JSON produced by squeeze_sim constants --format json")
    ap.add_argument("--rtol", type=float, default=1e-9)
    args = ap.parse_args()
    ref = ledger(REFERENCE)
    if not args.check:
        print(json.dumps({k: repr(v) for k, v in ref.items()}, indent=1))
        return 0
    with open(args.check) as fh:
        got = {row["name"]: row["value"] for row in json.load(fh)}
    bad = 0
    for name, want in ref.items():
        have = got.get(name)
        if have is None:
            print(f"missing {name}")
            bad += 1
            continue
        have = float(have)
        ok = (math.isinf(want) and math.isinf(have)) or abs(have - want) <= args.rtol * max(abs(want), 1e-300)
        print(f"{'ok  ' if ok else 'BAD '} {name:16s} oracle {want!r:24s} library {have!r}")
        bad += not ok
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
