"""Smoke test for the gpbandit_py extension module.

Build the module first, either with maturin (``maturin develop -m
crates/python/Cargo.toml``) or with cargo:

    cargo build --release -p gpbandit-python --features extension-module

When the module is not importable, the script falls back to the cargo build
output in ``target/release``.
"""

import importlib
import math
import os
import shutil
import sys
import tempfile

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("gpbandit_py")
    except ImportError:
        pass
    for name in ("libgpbandit_py.so", "libgpbandit_py.dylib", "gpbandit_py.dll"):
        built = os.path.join(ROOT, "target", "release", name)
        if os.path.exists(built):
            tmp = tempfile.mkdtemp()
            suffix = ".pyd" if name.endswith(".dll") else ".so"
            shutil.copy(built, os.path.join(tmp, "gpbandit_py" + suffix))
            sys.path.insert(0, tmp)
            return importlib.import_module("gpbandit_py")
    raise SystemExit("gpbandit_py not found; build it first (see module docstring)")


def check_posterior(gp):
    rng = np.random.default_rng(0)
    xs = rng.uniform(size=(15, 1))
    ys = rng.normal(size=15)
    lam = 0.1
    kernel = gp.Kernel("matern", 0.2, 2.5)
    post = gp.Posterior.fit(kernel, lam, xs.tolist(), ys.tolist())
    assert len(post) == 15

    k = np.array(kernel.gram(xs.tolist()))
    a = k + lam**2 * np.eye(15)
    x = [0.37]
    kx = np.array(kernel.cross(x, xs.tolist()))
    mu = kx @ np.linalg.solve(a, ys)
    var = 1.0 - kx @ np.linalg.solve(a, kx)
    assert abs(post.mean(x) - mu) < 1e-9
    assert abs(post.variance(x) - var) < 1e-9
    nf, ns = post.variance_decomposition(x)
    assert abs(nf + ns - post.variance(x)) < 1e-8

    gain = 0.5 * np.linalg.slogdet(np.eye(15) + k / lam**2)[1]
    assert abs(post.information_gain() - gain) < 1e-9
    assert abs(gp.information_gain(kernel, lam, xs.tolist()) - gain) < 1e-9

    grown = post.update([0.9], 0.2)
    assert len(grown) == 16 and len(post) == 15

    lo, hi = gp.conf_bounds(post, x, 1.0, 2.0)
    assert lo < post.mean(x) < hi
    return post


def check_policies(gp, post):
    grid = [[i / 49] for i in range(50)]
    variances = [post.variance(p) for p in grid]
    means = [post.mean(p) for p in grid]
    assert gp.mvr_select(post, grid) == int(np.argmax(variances))
    assert gp.mvr_recommend(post, grid) == int(np.argmax(means))
    assert 0 <= gp.ucb_select(post, grid, 2.0) < 50
    assert 0 <= gp.pi_select(post, grid, max(means)) < 50
    assert 0 <= gp.ei_select(post, grid, max(means), alpha=0.0) < 50


def check_bounds(gp):
    h0, xi0 = gp.laplace_lighttail_params(1.0)
    assert h0 == 0.5 and abs(xi0 - 224 / 27) < 1e-12
    beta = gp.beta_subgaussian(0.1, 0.1, 0.05)
    assert abs(beta - math.sqrt(2 * math.log(20))) < 1e-12
    b = gp.regret_bound(100, 5.0, 1.0, 0.1, 1, 0.1, r=0.1)
    assert b > 0.2
    b_lt = gp.regret_bound(100, 5.0, 1.0, 0.1, 1, 0.1, xi0=xi0, h0=h0)
    assert b_lt > 0
    try:
        gp.beta_subgaussian(0.1, 0.1, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("delta outside (0, 1) must raise")


def check_experiment(gp):
    config = "\n".join(
        [
            "kernel = se",
            "lengthscale = 0.2",
            "objective = rkhs",
            "noise = gaussian",
            "budget = 20",
            "trials = 2",
            "base_seed = 3",
            "delta = 0.05",
            "algorithms = MVR,GPEI",
        ]
    )
    records = gp.run_experiment(config)
    assert len(records) == 2 * 2 * 20
    assert records == gp.run_experiment(config)
    curves = gp.regret_curves(config)
    assert set(curves) == {"MVR", "GPEI"}
    assert len(curves["MVR"]) == 20
    assert abs(gp.hartman3([0.114614, 0.555649, 0.852547]) - 3.86278) < 1e-3
    assert gp.rosenbrock2d([(1 + 2.048) / 4.096] * 2) == 0.0
    results = gp.selfcheck(fast=True)
    failed = [r[0] for r in results if not r[1]]
    assert not failed, failed


def main():
    gp = load()
    post = check_posterior(gp)
    check_policies(gp, post)
    check_bounds(gp)
    check_experiment(gp)
    print("gpbandit_py smoke test passed")


if __name__ == "__main__":
    main()
