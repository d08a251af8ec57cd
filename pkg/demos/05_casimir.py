"""Vacuum (Casimir) energy under resonant pumping.

At the fundamental resonance the vacuum energy density stays pinned at the
static Casimir value; at higher resonances pulses grow on top of a deepened
background and the net energy eventually turns repulsive.
"""

import math

import numpy as np

import floquet_cavity as fc


def main():
    L = 1.0
    x = -L + 2.0 * L * (np.arange(9) + 0.5) / 9

    p1 = fc.WeakDriveParams(0.02, L, 1)
    d1 = fc.casimir_density(x, 12.0, p1)
    print(f"q = 1: T00 everywhere = {d1[0]:.6f} = -pi/48L^2 = {-math.pi/48:.6f}")
    print("       (the derivatives conspire; pumping leaves the vacuum flat)")
    print()

    p2 = fc.WeakDriveParams(0.02, L, 2)
    print("q = 2: T00 profile after n round trips (static value -0.0654):")
    for n in (0, 4, 8):
        d = fc.casimir_density(x, 2.0 * L * n, p2)
        row = " ".join(f"{v:+.4f}" for v in d)
        print(f"  n={n:<2} {row}")
    print("peaks sharpen at the stable points while the background sinks")
    print("toward -pi q^2/48L^2, a q^2-fold deepened Casimir density.")
    print()

    t_flip = math.acosh(4.0 / 3.0) / (math.pi * 2 * 0.02)
    print(f"ring-integrated energy: E(0) = {fc.casimir_energy(0.0, p2):+.5f}"
          f" (static -pi/24L), crosses zero at c t = {t_flip:.2f}"
          f" (attraction -> repulsion)")
    print()

    # the exact-multiplier evaluation agrees with the closed form
    drive = fc.make_harmonic(L, 0.01, 2 * math.pi / L)
    pw = fc.WeakDriveParams(0.01, L, 2)
    gen = fc.casimir_density_generic(drive, x, 6.0)
    closed = fc.casimir_density(x, 6.0, pw)
    print("generic (exact conformal derivatives) vs closed form at A = 0.01:")
    print("  max |difference| =", f"{float(np.max(np.abs(gen - closed))):.2e}")


if __name__ == "__main__":
    main()
