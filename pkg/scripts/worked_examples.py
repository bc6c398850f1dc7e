"""Run every problem in problems/ through chain, connection and oracle; print one line each."""

import argparse
from pathlib import Path

from contactprol.document import load_document
from contactprol.oracle import stabilized_dim
from contactprol.prolongation import build_flat_connection, chain_for_operator

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", default=ROOT / "problems", type=Path)
    ap.add_argument("--nmax", type=int, default=7)
    args = ap.parse_args()
    print(f"{'problem':22} {'K_H':>4} {'levels':18} {'verdict':24} {'rank_T':>6} {'oracle':>6} conn")
    for path in sorted(args.dir.glob("*.yaml")):
        doc = load_document(path)
        op = doc.operator()
        chain = chain_for_operator(op, doc.options.lmax or 8)
        prof = stabilized_dim(op, doc.options.nmax or args.nmax)
        conn = ""
        if chain.finite_type and op.n >= 2 and op.order == 1:
            conn = str(build_flat_connection(op, chain).block_dims)
        print(
            f"{path.stem:22} {chain.dim_KH:>4} {str(list(chain.levels)):18} {chain.verdict.value:24} "
            f"{str(chain.rank_T):>6} {str(prof.stabilized_dim):>6} {conn}"
        )


if __name__ == "__main__":
    main()
