"""Compare the direct series with the continuation on Re s = sigma + 0.5."""
import argparse
import math

import numpy as np

from digitzeta.core import geometric, parse_digits
from digitzeta.zeta import zeta_continued_geometric, zeta_direct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--beta", default="3")
    ap.add_argument("--digits", default="0,1,5")
    ap.add_argument("--points", type=int, default=20)
    args = ap.parse_args()
    base = geometric(args.beta)
    d = parse_digits(args.digits)
    sig = math.log(d.cardinality) / math.log(base.beta)
    worst = 0.0
    for t in np.linspace(-5, 5, args.points):
        s = complex(sig + 0.5, t)
        a = zeta_direct(base, d, s).value
        b = zeta_continued_geometric(base, d, s).value
        worst = max(worst, abs(a - b))
        print(f"{s.imag:+7.3f}  direct {a.real:+.12f}{a.imag:+.12f}i  continued {b.real:+.12f}{b.imag:+.12f}i  diff {abs(a - b):.2e}")
    print(f"max difference {worst:.3e}")


if __name__ == "__main__":
    main()
