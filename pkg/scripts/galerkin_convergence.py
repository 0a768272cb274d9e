"""Self-convergence of the Galerkin scheme in the number of modes (double-well energy)."""
import argparse

import numpy as np

from viscodiff import basis, galerkin
from viscodiff.basis import IntervalDomain, make_quadrature
from viscodiff.energy import DoubleWell


def final_coeffs(n, beta, T, dt):
    d = IntervalDomain(1.0, n)
    q = make_quadrature(basis.default_node_count(n), d)
    s = galerkin.GalerkinSystem(d, DoubleWell(1.0), 1.0, beta, galerkin.ZERO_FLUX, q)
    a0 = basis.project(lambda x: 0.5 + 0.1 * np.cos(np.pi * x) + 0.05 * np.cos(2 * np.pi * x), n, q, d)
    return galerkin.integrate(s, a0, T, dt, output_every=10**9).final.a


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--final-time", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--modes", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    args = p.parse_args()
    prev = None
    print(f"{'n':>5} {'||u_n - u_n/2||':>16}")
    for n in args.modes:
        a = final_coeffs(n, args.beta, args.final_time, args.dt)
        if prev is not None:
            gap = np.linalg.norm(np.pad(prev, (0, a.size - prev.size)) - a)
            print(f"{n:5d} {gap:16.4e}")
        prev = a


if __name__ == "__main__":
    main()
