"""Log-average and moment tables for digits {0,1} on Fibonacci-like bases."""
import argparse
import math

from digitzeta.moments import chow_slattery_report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("kind", nargs="?", default="fibonacci")
    ap.add_argument("--n-max", type=int, default=25)
    args = ap.parse_args()
    rep = chow_slattery_report(args.kind, n_max=args.n_max)
    print(f"{rep.kind}: beta={rep.beta:.12g} alpha={rep.alpha:.12g} sigma_c={rep.sigma_c:.12g}")
    print(f"limit constant sigma alpha^-sigma int Psi = {rep.log_constant:.10g}")
    print(f"{'n':>3} {'lhs':>14} {'rhs':>14} {'gap':>12} {'diff':>10}")
    for n, lhs, rhs, gap, diff in rep.log_average_rows:
        d = "" if math.isnan(diff) else f"{diff:10.2e}"
        print(f"{n:3d} {lhs:14.8f} {rhs:14.8f} {gap:12.8f} {d}")
    for m in rep.moments:
        gaps = ", ".join(f"{g:.2e}" for g in m.relative_gaps)
        print(f"k={m.k:g}: rhs {m.rhs_value:.8f}, relative gaps at n={list(m.depths)}: {gaps}")


if __name__ == "__main__":
    main()
