"""Largest stable explicit step as a function of the viscosity beta (double-well, n = 16)."""
import argparse

import numpy as np

from viscodiff import basis, galerkin
from viscodiff.basis import IntervalDomain, make_quadrature
from viscodiff.energy import DoubleWell


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--betas", type=float, nargs="+", default=[1e-3, 1e-2, 1e-1, 1.0])
    p.add_argument("--dts", type=float, nargs="+", default=[1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 1e-4])
    args = p.parse_args()
    n = args.modes
    d = IntervalDomain(1.0, n)
    q = make_quadrature(basis.default_node_count(n), d)
    a0 = basis.project(lambda x: 0.5 + 0.1 * np.cos(np.pi * x) + 0.05 * np.cos(2 * np.pi * x), n, q, d)
    print(f"{'beta':>8} {'|rhs(0)|_max':>14} {'largest stable dt (rk4, T = 1)':>32}")
    for beta in args.betas:
        s = galerkin.GalerkinSystem(d, DoubleWell(1.0), 1.0, beta, galerkin.ZERO_FLUX, q)
        stable = next((dt for dt in sorted(args.dts, reverse=True)
                       if not galerkin.integrate(s, a0, 1.0, dt, output_every=10**9).failed), None)
        print(f"{beta:8.0e} {np.max(np.abs(galerkin.rhs(0.0, a0, s))):14.4e} {str(stable):>32}")


if __name__ == "__main__":
    main()
