"""Regenerate the Stieltjes constants embedded in zetanls.specfun.

gamma_k = lim_N [ sum_{n<=N} ln^k(n)/n - ln^{k+1}(N)/(k+1) ]

The partial limits are evaluated in high precision with the Euler-Maclaurin
remainder of f(x) = ln^k(x)/x removed, then Richardson-extrapolated over
N, 2N, 4N. Output is checked against mpmath.stieltjes.
"""
import argparse

import mpmath


def partial_limit(k: int, n: int, terms: int = 6):
    f = lambda x: mpmath.log(x) ** k / x
    s = mpmath.fsum(f(mpmath.mpf(m)) for m in range(1, n + 1))
    s -= mpmath.log(n) ** (k + 1) / (k + 1) + f(n) / 2
    for j in range(1, terms + 1):
        s -= mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * mpmath.diff(f, n, 2 * j - 1)
    return s


def stieltjes(k: int, n: int = 200):
    a = [partial_limit(k, n * 2**i) for i in range(3)]
    # remainder after the corrections is O(ln^k N / N^{2*terms+2}); extrapolate in 1/N^14
    p = mpmath.mpf(2) ** 14
    b = [(p * a[i + 1] - a[i]) / (p - 1) for i in range(2)]
    return (p * b[1] - b[0]) / (p - 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--dps", type=int, default=40)
    args = ap.parse_args()
    mpmath.mp.dps = args.dps
    for k in range(args.count):
        g = stieltjes(k)
        ref = mpmath.stieltjes(k)
        print(f"gamma_{k} = {mpmath.nstr(g, 20):>26}   |diff vs mpmath| = {mpmath.nstr(abs(g - ref), 3)}")


if __name__ == "__main__":
    main()
