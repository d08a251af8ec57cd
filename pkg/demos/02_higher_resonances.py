"""Higher-order resonances: multi-period maps and their fixed-point multiplets.

Driving near the q-th cavity resonance gives fixed points of the q-period
map only; they come in q stable / q unstable multiplets, so an initially
uniform field splits into q pulses.
"""

import math

import floquet_cavity as fc


def main():
    for L, q in ((2.0, 2), (3.0, 3)):
        p = fc.make_harmonic(L, 0.1, math.pi)
        one = fc.find_fixed_points(fc.tabulate(p, 0.0, q=1, n=2048))
        multi = fc.find_fixed_points(fc.tabulate(p, 0.0, q=q, n=2048))
        print(f"L = {L}: round trip spans {q} drive periods")
        print(f"  one-period map:  {len(one)} fixed points")
        print(f"  {q}-period map:   {len(multi)} fixed points "
              f"({len(multi.stable)} stable, {len(multi.unstable)} unstable)")
        for pt in multi.points:
            print(f"    x = {pt.x:+.4f}  multiplier = {pt.multiplier:.4f}  {pt.stability}")
        print()
    print("single-period fixed points do not exist off the fundamental; the")
    print("stable orbit visits its q partners once per drive period, carrying")
    print("a compressed pulse each.")


if __name__ == "__main__":
    main()
