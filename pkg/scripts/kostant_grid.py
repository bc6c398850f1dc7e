"""Graded dimension check against Weyl dimensions over a grid of (n, k, m)."""

import argparse
import time

from contactprol.kostant import graded_check


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=2)
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--mmax", type=int, default=3)
    args = ap.parse_args()
    failures = 0
    for n in range(1, args.nmax + 1):
        for k in range(1, args.kmax + 1):
            for m in range(args.mmax + 1):
                t = time.perf_counter()
                rep = graded_check(n, k, m)
                failures += not rep.passed
                print(
                    f"n={n} k={k} m={m} weight={rep.weight} dims={list(rep.dims_Vj)} "
                    f"total={rep.total} weyl={rep.weyl_total} {'ok' if rep.passed else 'MISMATCH'} "
                    f"({time.perf_counter() - t:.2f}s)",
                    flush=True,
                )
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
