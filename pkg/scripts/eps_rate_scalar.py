"""Distance between the regularized and unregularized amplitude ODEs.

For spatially constant data the field problem reduces to r' = -lam r zeta(r+1+eps),
so d(eps) = max_t |r_eps(t) - r_0(t)| can be computed with the adaptive oracle
alone. Prints d(eps) and the ratio d(eps_min)/d(eps_max) for several r0.
"""
import argparse
import warnings

import numpy as np

from zetanls import oracle


def distance(r0: float, lam: float, eps: float, points: int = 301) -> float:
    t_ext = oracle.extinction_time_reference(r0, lam)
    ts = np.linspace(0.0, 1.5 * t_ext, points)
    return max(abs(oracle.amplitude_ode_reference(r0, lam, eps, t, 1e-11)
                   - oracle.amplitude_ode_reference(r0, lam, 0.0, t, 1e-11)) for t in ts)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--r0", default="0.1,0.16,0.31,1.0,10.0")
    p.add_argument("--eps", default="0.2,0.1,0.05,0.025,0.0125")
    p.add_argument("--lam", type=float, default=1.0)
    args = p.parse_args()
    eps = [float(x) for x in args.eps.split(",")]
    warnings.simplefilter("ignore")
    print("r0," + ",".join(f"d({e:g})" for e in eps) + ",ratio_last_first")
    for r0 in (float(x) for x in args.r0.split(",")):
        d = [distance(r0, args.lam, e) for e in eps]
        print(f"{r0:g}," + ",".join(f"{x:.6g}" for x in d) + f",{d[-1] / d[0]:.4f}")


if __name__ == "__main__":
    main()
