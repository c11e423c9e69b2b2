#!/usr/bin/env python3
"""Smoke test for the _anplane extension module.

Build the module first, then run this script from anywhere:

    cargo build -p anplane-py
    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load_module():
    root = pathlib.Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / profile / ("lib_anplane" + suffix)
        for profile in ("debug", "release")
        for suffix in (".so", ".dylib")
    ]
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("_anplane", str(path))
            spec = importlib.util.spec_from_loader("_anplane", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("no built extension found; run `cargo build -p anplane-py` first")


an = load_module()


def check(name, cond):
    if not cond:
        sys.exit(f"FAIL {name}")
    print(f"ok {name}")


# Distributions and exact divergences.
p = an.FiniteDistribution(["y0", "y1", "y2"], [0.5, 0.3, 0.2])
q = an.FiniteDistribution(["y0", "y1", "y2"], [0.2, 0.5, 0.3])
check("total variation", abs(an.total_variation(p, q) - 0.3) < 1e-12)
kl = sum(pi * math.log(pi / qi) for pi, qi in zip(p.probs, q.probs))
check("kl divergence", abs(an.kl_divergence(p, q) - kl) < 1e-12)
eye = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]
want = math.sqrt(sum((a - b) ** 2 for a, b in zip(p.probs, q.probs)))
check("kernelized distance", abs(an.d2_exact(p, q, eye) - want) < 1e-12)

# Gaussian closed forms and the large-p limit.
check("gaussian p=2 form", abs(an.dp_gaussian(2.0, 0.7, 1.1) - math.hypot(0.7, 1.1)) < 1e-10)
check("gaussian p=1 form", abs(an.dp_gaussian(1.0, 0.7, 1.1) - an.d1_gaussian(0.7, 1.1)) < 1e-10)
check("large-p limit", abs(an.dp_limit_check(1.0, [1024.0])[0] - 1.0) < 0.02)

# Sampled critics agree with the effective-kernel shortcut.
gram = [[math.exp(-0.5 * (a - b) ** 2) for b in range(3)] for a in range(3)]
eff = an.effective_kernel(gram, link="log")
exact = an.d2_exact(p, q, eff)
value, std_error = an.dp_sampled(q, p, gram, link="log", n_critics=4000, seed=1)
check("sampled critics near exact", abs(value - exact) < 4 * std_error + 1e-3)
again, _ = an.dp_sampled(q, p, gram, link="log", n_critics=4000, seed=1)
check("sampling is deterministic", value == again)

# Two-sample estimator and the risk chain.
signed, _ = an.d2_ustat([0.0, 0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 2.0], kernel="indicator")
check("two-sample estimate finite", math.isfinite(signed))
neg_d_inf, neg_d1, risk, holds = an.risk_chain(
    [-0.3, 0.1, -0.8, 0.4, 0.0], [1.2, 0.9, 1.6, 0.7, 1.1], seed=2
)
check("risk chain", holds and neg_d_inf <= neg_d1 <= risk + 1e-9)

# Frontier solvers on a tiny instance.
inst = an.JointInstance(["x0", "x1"], ["y0", "y1"], [[0.3, 0.2], [0.1, 0.4]])
delta = [[[0.0, 0.6], [0.5, 0.0]], [[0.0, 0.4], [0.7, 0.0]]]
r_y = an.FiniteDistribution(["y0", "y1"], [0.35, 0.65])
swept = an.scalarization_frontier(inst, delta, r_y, betas=[0.0, 0.3, 1.0, 3.0])
# Coincident optima collapse, so four betas may yield fewer points.
passes, _, _ = swept.verify_shape(tol=1e-9)
check("swept frontier shape", passes and 2 <= len(swept) <= 4 and not swept.unconverged_betas)
grid = an.brute_force_frontier(inst, delta, r_y, resolution=80)
n0, a0, beta0 = swept.points[0]
check("grid covers swept optimum", grid.accuracy_at(n0 - 1.0 / 80) >= a0 - 2.0 / 80 - 1e-6)
h, tv, present = an.no_two_birds_demo(inst, delta)
check("copy-vs-marginal tension", h > 0 and tv > 0 and present)

# Oracle sweep over a two-candidate pool: selection switches at beta = 0.1.
segments = [
    {
        "segment_id": "s0",
        "candidates": [
            {"system": "a", "accuracy": 0.8, "logprob": -30.0, "token_count": 10},
            {"system": "b", "accuracy": 0.6, "logprob": -10.0, "token_count": 10},
        ],
    }
]
curve = an.oracle_curve(segments, [0.05, 0.2])
check("oracle switch point", curve[0][1:] == (0.8, 3.0) and curve[1][1:] == (0.6, 1.0))
rows = an.system_points(segments, 2.0)
check("system points", [r[0] for r in rows] == ["a", "b"] and rows[0][2] == 3.0)

# MQM scoring with explicit weights.
annotations = [
    {"system": "sysX", "doc": "d0", "segment_id": "1", "rater": "r1",
     "category": "Accuracy/Mistranslation", "severity": "major"},
    {"system": "sysX", "doc": "d0", "segment_id": "1", "rater": "r1",
     "category": "Fluency/Grammar", "severity": "minor"},
    {"system": "sysX", "doc": "d0", "segment_id": "2", "rater": "r1",
     "category": "no-error", "severity": "neutral"},
]
scores, unknown = an.score_mqm(annotations, schema="ende", weights={"major": 5, "minor": 1})
check("mqm scores", scores == [("sysX", -2.5, -0.5, 2, 3)] and not unknown)

# Special functions.
check("log gamma", abs(an.log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-12)
check("normal cdf", abs(an.normal_cdf(0.0) - 0.5) < 1e-15)
check("erfc", abs(an.erfc(0.0) - 1.0) < 1e-15)
check("kummer", abs(an.kummer_m(-1.0, 0.5, -2.0) - 5.0) < 1e-12)
check("bivariate normal cdf", abs(an.bivariate_normal_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0) < 1e-12)

print(f"smoke test passed ({an.__version__})")
