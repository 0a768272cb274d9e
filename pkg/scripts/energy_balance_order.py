"""Order of the energy-balance residual in dt for both time schemes (double-well, n = 16)."""
import argparse

import numpy as np

from viscodiff import basis, galerkin
from viscodiff.basis import IntervalDomain, make_quadrature
from viscodiff.energy import DoubleWell


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dts", type=float, nargs="+", default=[4e-3, 2e-3, 1e-3, 5e-4])
    p.add_argument("--beta", type=float, default=0.1)
    args = p.parse_args()
    n = 16
    d = IntervalDomain(1.0, n)
    q = make_quadrature(basis.default_node_count(n), d)
    s = galerkin.GalerkinSystem(d, DoubleWell(1.0), 1.0, args.beta, galerkin.ZERO_FLUX, q)
    a0 = basis.project(lambda x: 0.5 + 0.1 * np.cos(np.pi * x) + 0.05 * np.cos(2 * np.pi * x), n, q, d)
    for scheme in galerkin.SCHEMES:
        print(scheme)
        prev = None
        for dt in args.dts:
            traj = galerkin.integrate(s, a0, 1.0, dt, scheme, output_every=10**9)
            r = abs(traj.column("energy_residual")[-1])
            ratio = f"{prev / r:8.2f}" if prev else " " * 8
            print(f"  dt {dt:8.1e}  |residual(T)| {r:10.3e}  ratio {ratio}")
            prev = r


if __name__ == "__main__":
    main()
