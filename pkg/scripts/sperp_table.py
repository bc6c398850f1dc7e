"""Dimensions of the contact symbol spaces next to the closed form."""

import argparse

from contactprol.symplectic import build_sperp, sperp_dim_formula


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=3)
    ap.add_argument("--lmax", type=int, default=6)
    args = ap.parse_args()
    for n in range(1, args.nmax + 1):
        built = [build_sperp(n, ell).dim for ell in range(args.lmax + 1)]
        formula = [sperp_dim_formula(n, ell) for ell in range(args.lmax + 1)]
        print(f"n={n} built={built} formula={formula} {'ok' if built == formula else 'MISMATCH'}")


if __name__ == "__main__":
    main()
