"""High-precision values frozen into the test suite (requires mpmath).

    python scripts/derive_constants.py
"""
import mpmath as mp

mp.mp.dps = 30


def antipodal(beta, lam, d):
    # periodic squared-exponential kernel between x and x + pi on every angle axis
    return beta * mp.e ** (-2 * (d - 1) / lam ** 2)


def main():
    beta, lam = mp.mpf("0.9"), mp.pi / 4
    for d in (2, 3):
        print(f"antipodal kernel, beta=0.9, lam=pi/4, d={d}: {mp.nstr(antipodal(beta, lam, d), 21)}")
    print(f"vanishing radius, gamma=1, d=2, n=e: {mp.nstr(mp.sqrt(mp.log(mp.e) / mp.e), 21)}")


if __name__ == "__main__":
    main()
