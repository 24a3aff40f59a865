"""Classical optimum of the penalized constrained problem as a function of lambda.

The objective is a sum of positive semidefinite terms, so every optimum is
non-negative; the scan shows how the optimum grows toward the hard-constraint
value as lambda increases.

    python3 scripts/penalty_scan.py --lambdas 0.1 1 10 20 50
"""

import argparse

import numpy as np

from ccvqaoa.encoding import CONSTRAINED_A, CONSTRAINED_B, CONSTRAINED_C, classical_oracle, constrained_quadratic


def hard_constraint_optimum() -> float:
    # B is invertible, so B z = c fixes z
    z = np.linalg.solve(CONSTRAINED_B, CONSTRAINED_C)
    return float(np.real(z.conj() @ CONSTRAINED_A @ z))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambdas", type=float, nargs="+", default=[0.1, 1.0, 10.0, 20.0, 50.0])
    args = ap.parse_args(argv)
    print(f"{'lambda':>8} {'f*':>10}  argmin z")
    for lam in args.lambdas:
        res = classical_oracle(constrained_quadratic(lam), budget=50_000)
        z = res.argmin[0::2] + 1j * res.argmin[1::2]
        print(f"{lam:8.3g} {res.value:10.4f}  {np.round(z, 4)}")
    print(f"{'inf':>8} {hard_constraint_optimum():10.4f}  (B z = c exactly)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
