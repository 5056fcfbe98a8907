#!/usr/bin/env python3
"""Generate frozen multiprecision reference values for the gamma-factor tests.

Writes crates/voronoi3/tests/data/gamma_refs.in (a Rust include fragment).
Requires mpmath. Values are computed at 30 significant digits and rounded to
the nearest f64, so the shipped data is exact to the last double bit.
"""

import mpmath as mp

mp.mp.dps = 30

OUT = "crates/voronoi3/tests/data/gamma_refs.in"


def f(x) -> str:
    return repr(float(x))


def c(z) -> str:
    return f"{f(z.real)}, {f(z.imag)}"


def gamma_r(s):
    return mp.power(mp.pi, -s / 2) * mp.gamma(s / 2)


def gamma_c(s):
    return 2 * mp.power(2 * mp.pi, -s) * mp.gamma(s)


def g_delta(delta, s):
    return mp.mpc(0, 1) ** delta * gamma_r(s + delta) / gamma_r(1 - s + delta)


def main():
    # 20 x 20 grid: Re in [-5, 5], Im in [-20, 20], avoiding integers and the cut.
    res = [-4.75 + 0.5 * k for k in range(20)]
    ims = [-19.0 + 2.0 * k for k in range(20)]
    grid = [mp.mpc(re, im) for re in res for im in ims]
    # Branch-sensitive extras: on the cut (upper-limit convention), both sides
    # of the cut, a few generic points.
    extras = [
        mp.mpc(-2.5, 0.0),
        mp.mpc(-2.5, 1e-9),
        mp.mpc(-2.5, -1e-9),
        mp.mpc(-0.5, 0.0),
        mp.mpc(-6.5, 0.0),
        mp.mpc(0.25, 14.0),
        mp.mpc(-7.25, -2.0),
        mp.mpc(0.5, 0.0),
        mp.mpc(12.0, 0.0),
        mp.mpc(8.5, -0.25),
        mp.mpc(-4.999, 0.001),
    ]

    lg_rows = []
    gr_rows = []
    gc_rows = []
    for z in grid + extras:
        lg_rows.append(f"    ({c(z)}, {c(mp.loggamma(z))}),")
        gr_rows.append(f"    ({c(z)}, {c(gamma_r(z))}),")
        gc_rows.append(f"    ({c(z)}, {c(gamma_c(z))}),")

    g_pts = [
        mp.mpc(0.5, 0.0),
        mp.mpc(0.5, 2.0),
        mp.mpc(0.5, 7.0),
        mp.mpc(0.5, 40.0),
        mp.mpc(0.5, 80.0),
        mp.mpc(0.5, -160.0),
        mp.mpc(-0.75, -3.0),
        mp.mpc(2.5, 0.25),
        mp.mpc(-5.5, 1.0),
        mp.mpc(-10.5, 60.0),
        mp.mpc(12.3, -75.0),
        mp.mpc(22.7, 0.0),
        mp.mpc(0.7, 0.0),
        mp.mpc(11.7, 0.0),
    ]
    g_rows = []
    for delta in (0, 1):
        for s in g_pts:
            g_rows.append(f"    ({delta}, {c(s)}, {c(g_delta(delta, s))}),")

    with open(OUT, "w") as fh:
        fh.write("// Generated by scripts/gen_gamma_refs.py. Do not edit by hand.\n")
        fh.write("// (z_re, z_im, value_re, value_im)\n")
        fh.write("pub static LOG_GAMMA_REFS: &[(f64, f64, f64, f64)] = &[\n")
        fh.write("\n".join(lg_rows))
        fh.write("\n];\n\npub static GAMMA_R_REFS: &[(f64, f64, f64, f64)] = &[\n")
        fh.write("\n".join(gr_rows))
        fh.write("\n];\n\npub static GAMMA_C_REFS: &[(f64, f64, f64, f64)] = &[\n")
        fh.write("\n".join(gc_rows))
        fh.write("\n];\n\n// (delta, s_re, s_im, value_re, value_im)\n")
        fh.write("pub static G_REFS: &[(u8, f64, f64, f64, f64)] = &[\n")
        fh.write("\n".join(g_rows))
        fh.write("\n];\n")
    print(f"wrote {OUT}: {len(lg_rows)} grid+extra points, {len(g_rows)} G values")


if __name__ == "__main__":
    main()
