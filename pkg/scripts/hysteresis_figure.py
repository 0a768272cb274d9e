"""Driver/output series and (w, y) loops of the threshold law, quasi-static and viscous."""
import argparse
from pathlib import Path

from viscodiff import cli
from viscodiff.config import HysteresisConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="out/hysteresis")
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--tau", type=float, nargs="+", default=[10.0, 100.0, 1000.0])
    args = p.parse_args()
    base = Path(args.out)
    (base / "quasistatic").mkdir(parents=True, exist_ok=True)
    (base / "viscous").mkdir(parents=True, exist_ok=True)
    cli.cmd_hysteresis(HysteresisConfig(args.A, args.gamma, 1.0), base / "quasistatic")
    cli.cmd_hysteresis(HysteresisConfig(args.A, args.gamma, 1.0, "viscous", 1.0, tuple(args.tau)), base / "viscous")


if __name__ == "__main__":
    main()
