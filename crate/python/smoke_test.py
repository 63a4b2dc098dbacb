"""Smoke test for the shocklab_py extension module.

Build and install it first:

    pip install -e crates/python --no-build-isolation
    python python/smoke_test.py
"""

import math

import shocklab_py as sl


def check(label, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {label}")
    return ok


def main():
    results = []

    gauss = sl.Profile("gaussian:1,0,1")
    t_star = gauss.burgers_blowup_time()
    results.append(check("burgers blow-up time of a gaussian", abs(t_star - math.sqrt(math.e / 2)) < 1e-6))
    results.append(check("smooth profiles never steepen when constant", sl.Profile("constant:1").burgers_blowup_time() is None))

    summary = sl.run("[burgers]\nlambda = 1, 0.5\nn_alpha = 21\n")
    results.append(check("config run returns a dict", summary["command"] == "burgers" and len(summary["result"]["runs"]) == 2))

    cfg = sl.Config.defaults("nullcond.aleph")
    cfg.set("metric", "john")
    cfg.set("theta_grid", "16")
    aleph = cfg.run()["result"]
    results.append(check("john metric fails the null condition", aleph["aleph_plus_vanishes"] is False))

    john = sl.MetricFamily("john")
    results.append(check("aleph plus is -1 for john", abs(john.aleph_plus([0.0, 0.0, 1.0]) + 1.0) < 1e-12))
    results.append(check("conformal metric satisfies the null condition", sl.MetricFamily("conformal:2").satisfies_null_condition()))

    fluid = sl.FluidLagrangian("exceptional", 0.5)
    derived = fluid.derived()
    results.append(check("exceptional fluid has H = 1", abs(derived["h"] - 1.0) < 1e-12 and fluid.is_exceptional()))

    try:
        sl.run("[burgers]\nn_t = many\n")
        results.append(check("bad config raises ValueError", False))
    except ValueError:
        results.append(check("bad config raises ValueError", True))

    solve = sl.run("[john.solve]\npsi0_dot = poly_bump:-0.5,4,0.5\nstart_time = -0.5\nt_max = 30\nn_u = 40\n")
    results.append(check("john solve reports an outcome", solve["result"]["report"]["outcome"] in ("shock", "no_shock")))

    if not all(results):
        raise SystemExit(1)
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
