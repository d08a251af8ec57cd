"""Discrete time reversal: compress a signal, then rebuild it exactly.

Reflecting the mirror law about q*L0 at a valid splice time makes the
stroboscopic sequence run backwards, un-doing the compression without
reversing any world line.
"""

import math

import numpy as np

import floquet_cavity as fc

A = 0.15
N_COMPRESS = 16


def main():
    p = fc.make_harmonic(1.0, A, math.pi)
    t_star = 2.0 * N_COMPRESS
    spliced = fc.time_reverse(p, t_star, q=1)
    z_before, _ = spliced.evaluate(t_star - 0.25)
    z_after, _ = spliced.evaluate(t_star + 0.25)
    print(f"splice at t* = {t_star}: z(t*-) branch has z = {z_before:.4f},")
    print(f"reflected branch gives z = {z_after:.4f} at the mirrored phase")
    print()

    x0 = -1.0 + 2.0 * np.arange(8) / 8
    orbit = fc.iterate(spliced, 0.0, x0, 2 * N_COMPRESS)
    print("tracked rays (coordinates every 4 periods):")
    for k in range(0, 2 * N_COMPRESS + 1, 4):
        row = " ".join(f"{v:+.4f}" for v in orbit[k])
        marker = "  <- splice" if k == N_COMPRESS else ""
        print(f"  n={k:<3} {row}{marker}")
    d = orbit[-1] - orbit[0]
    err = np.abs(d - 2.0 * np.round(d / 2.0))
    print(f"\nmax |x_return - x_0| = {err.max():.3e}")
    print()

    # the field rebuilds as well: evolve a smooth profile out and back
    f0 = fc.init_field(spliced, lambda x: np.sin(math.pi * x), 0.0,
                       n=2048, discontinuities=())
    mid8 = fc.evolve(spliced, f0, 16.0)
    back = fc.evolve(spliced, f0, 2.0 * t_star)
    spread8 = float(np.mean(np.abs(mid8.values) > 0.1))
    err_f = float(np.max(np.abs(back.values - f0.values)))
    print(f"field variation occupies {spread8:.1%} of the ring after 8 periods")
    print(f"(max |A| = {float(np.max(np.abs(mid8.values))):.3f}); by the splice it is "
          f"narrower than the grid spacing,")
    print(f"and it rebuilds after decompression with Linf error = {err_f:.2e}")


if __name__ == "__main__":
    main()
