"""Classical energy concentration under resonant pumping.

Starting from a uniform energy density, the exact pulled-back density
develops an exponentially sharp peak on the stable fixed-point trajectory;
the ring total grows like cosh(2 a~ n) while the drive is weak.
"""

import math

import numpy as np

import floquet_cavity as fc


def main():
    A = 0.1
    p = fc.make_harmonic(1.0, A, math.pi)
    f0 = fc.init_field(p, lambda x: x, 0.0, n=4096)  # uniform |A0'|^2
    e0 = fc.total_energy(p, f0, 0.0)
    at = math.pi * A
    print("n   E/E0 (exact)   cosh(2 a~ n)   peak density   peak width")
    for n in (1, 2, 4, 6, 8):
        rep = fc.energy_density(p, f0, 2.0 * n)
        peak = float(np.max(rep.density))
        width = float(np.mean(rep.density > 0.5 * peak)) * 2.0
        print(f"{n:<3} {rep.total / e0:<14.4f} {math.cosh(2 * at * n):<14.4f} "
              f"{peak:<14.1f} {width:.4f}")
    print()
    print("the peak rides the stable fixed-point trajectory; its height grows")
    print("like e^{4 a~ n} and its width shrinks like e^{-2 a~ n}. The exact")
    print("growth rate is 2 atanh(A*Omega) per period, slightly above the")
    print("leading-order 2 a~, so the cosh column falls behind at late n.")
    print()

    # the weak closed form reproduces the whole density profile
    params = fc.WeakDriveParams(0.02, 1.0, 1)
    p2 = fc.make_harmonic(1.0, 0.02, math.pi)
    f2 = fc.init_field(p2, lambda x: x, 0.0, n=4096)
    rep = fc.energy_density(p2, f2, 2.0 * 8)
    xt = fc.scaled(rep.grid, params) + fc.weak_frame_shift(1)
    weak = fc.weak_g_prime(xt, 8, params) ** 2
    rel = float(np.max(np.abs(rep.density / weak - 1.0)))
    print(f"A = 0.02, n = 8: exact density vs (g')^2 closed form: "
          f"max rel dev = {rel:.2%}")


if __name__ == "__main__":
    main()
