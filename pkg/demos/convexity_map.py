"""Chart where the surrogate objective stops being jointly concave.

Each 1-D slice of the surrogate is always unimodal (its reciprocal is
convex per variable), but joint concavity fails below a closed-form source
power threshold.  This demo classifies the Hessian across the power box and
checks the threshold's prediction against the classification.
"""

import numpy as np

import fdrelay as fd


def main():
    config = fd.NetworkConfig(num_relays=1, zeta=0.05,
                              p_s_max=fd.db_to_linear(20.0),
                              p_r_max=fd.db_to_linear(20.0),
                              i_bar_p=fd.db_to_linear(8.0))
    channels = fd.sample_channels(config, seed=21)

    counts = {}
    n = 61
    grid_s = np.geomspace(1e-3, config.p_s_max, n)
    grid_r = np.geomspace(1e-3, config.p_r_max, n)
    for a in grid_s:
        for b in grid_r:
            rep = fd.hessian_noncoh(fd.PowerAllocation(float(a), float(b)),
                                    channels, 0, config)
            counts[rep.definiteness] = counts.get(rep.definiteness, 0) + 1
    total = n * n
    print("power-coordinate Hessian classification over a log-spaced box:")
    for kind, c in sorted(counts.items(), key=lambda kv: -kv[1]):
        print(f"  {kind.value:>22s}: {c:5d}  ({100 * c / total:.1f}%)")

    p_rk = 5.0
    th = fd.threshold_ps(channels, 0, config, p_rk=p_rk)
    print(f"\nsource-power threshold at pr={p_rk}: {th.p_s_tilde:.6f}")
    d_below = fd.sc1(fd.PowerAllocation(0.9 * th.p_s_tilde, p_rk), channels, 0, config)
    print(f"  just below: det = {d_below:+.3e} (indefinite, as certified)")
    # the threshold is sufficient, not tight: walk upward to the actual flip
    ps = th.p_s_tilde
    while fd.sc1(fd.PowerAllocation(ps, p_rk), channels, 0, config) < 0:
        ps *= 2.0
    print(f"  determinant actually flips sign between ps={ps / 2:.4f} and "
          f"ps={ps:.4f} ({ps / th.p_s_tilde:.0f}x the certified bound)")

    (ps_w, pr_w), det = fd.sc2_witness(channels, 0, config)
    print(f"\nsqrt-coordinate nonconvexity witness: ({ps_w:.5f}, {pr_w:.5f}), "
          f"det = {det:+.3e}")


if __name__ == "__main__":
    main()
