"""Acceptance gate: one test per released claim, at the stated tolerances.

Each test prints a single [PASS]/[FAIL] line with the measured quantities
(visible with -s, or in captured output on failure) and asserts it.  Under
pytest -v the per-test PASSED/FAILED lines mirror the same verdicts.

Criteria 8 and 9 are long: roughly 50 and 15 minutes respectively on one
core.  Criterion 8 deliberately has no runtime bound; the others assert the
budgets they were given.
"""

import io
import math
import time

import numpy as np

from snl.edm import centered_subspace_basis, edm_normal, edm_normal_inv
from snl.harness import SweepSpec, run_noisy_protocol, sweep
from snl.landscape import (
    NON_STRICT_2_CRITICAL,
    STRICT_2_CRITICAL,
    certify,
    mixed7_example,
    planar7_example,
    simplex_example,
)
from snl.objective import CompleteInstance
from snl.theory import (
    certificate_matrices,
    check_edm_properties,
    gaussian_condition,
    rip_lower_bound,
    sqrtn_threshold,
)
from snl.trust_region import SolverOptions, minimize


def conclude(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:02d} {name}: {detail}"
    print(line, flush=True)
    assert ok, line


def operator_matrix(operator, basis: np.ndarray) -> np.ndarray:
    dim = basis.shape[0]
    out = np.empty((dim, dim))
    for j in range(dim):
        image = operator(basis[j])
        out[:, j] = np.einsum("dij,ij->d", basis, image)
    return out


def test_criterion_01_operator_spectrum():
    t0 = time.perf_counter()
    worst_eig = 0.0
    worst_inv = 0.0
    for n in range(4, 11):
        basis = centered_subspace_basis(n)
        normal = operator_matrix(edm_normal, basis)
        inverse = operator_matrix(edm_normal_inv, basis)
        expected = np.sort(
            np.concatenate(
                [
                    np.full(n * (n - 3) // 2, 1.0),
                    np.full(n - 1, n / 2.0),
                    np.full(1, float(n)),
                ]
            )
        )
        eigs = np.linalg.eigvalsh(normal)
        worst_eig = max(worst_eig, float(np.max(np.abs(eigs - expected))))
        residual = inverse @ normal - np.eye(basis.shape[0])
        worst_inv = max(worst_inv, float(np.max(np.abs(residual))))
    elapsed = time.perf_counter() - t0
    ok = worst_eig <= 1e-9 and worst_inv <= 1e-12 and elapsed < 5.0
    conclude(
        1,
        "operator-spectrum",
        ok,
        f"eig dev {worst_eig:.2e} (tol 1e-9), inverse dev {worst_inv:.2e}"
        f" (tol 1e-12), {elapsed:.2f}s (cap 5s)",
    )


def test_criterion_02_property_suite():
    failures = []
    details = []
    for n in (5, 10, 20):
        reports = check_edm_properties(n, trials=1000, seed=1000 + n)
        for report in reports:
            if not report.passed:
                failures.append((n, report.property_id, report.max_violation))
        details.append(
            f"n={n} worst {max(r.max_violation for r in reports):.2e}"
        )
    ok = not failures
    conclude(
        2,
        "property-suite",
        ok,
        "; ".join(details) + (f"; failures {failures}" if failures else ""),
    )


def test_criterion_03_rip_lower_bound():
    worst_quotient = 0.0
    exact = True
    for n in (4, 6, 100):
        bound = rip_lower_bound(n)
        exact &= bound == 1.0 - 4.0 / (n + 2.0)
        spread = np.zeros((n, n))
        spread[0, 0], spread[1, 1] = 1.0, -1.0
        spread -= spread.mean(axis=0, keepdims=True)
        spread -= spread.mean(axis=1, keepdims=True)
        a = np.zeros(n)
        b = np.zeros(n)
        a[:4] = [1.0, 1.0, -1.0, -1.0]
        b[:4] = [1.0, -1.0, -1.0, 1.0]
        flat = np.outer(a, a) - np.outer(b, b)
        for X, target in ((spread, n / 2.0), (flat, 1.0)):
            quotient = float(np.vdot(X, edm_normal(X)) / np.vdot(X, X))
            worst_quotient = max(worst_quotient, abs(quotient - target))
    ok = exact and worst_quotient <= 1e-10
    conclude(
        3,
        "rip-lower-bound",
        ok,
        f"exact={exact}, witness quotient dev {worst_quotient:.2e} (tol 1e-10)",
    )


def test_criterion_04_counterexample_certificates():
    checks = []
    slowest = 0.0

    def certification(example, k=None):
        nonlocal slowest
        t0 = time.perf_counter()
        report = certify(example.instance(k), example.spurious)
        slowest = max(slowest, time.perf_counter() - t0)
        return report

    planar = planar7_example()
    report = certification(planar)
    checks.append(("planar7-grad", report.grad_norm <= 1e-12 * report.scale))
    checks.append(("planar7-strict", report.verdict == STRICT_2_CRITICAL))
    checks.append(("planar7-kernel-3", report.kernel_dimension == 3))

    s5 = simplex_example(5)
    checks.append(("simplex5-n7", s5.n == 7))
    checks.append(
        ("simplex5-strict", certification(s5).verdict == STRICT_2_CRITICAL)
    )
    s4 = simplex_example(4)
    checks.append(("simplex4-n6", s4.n == 6))
    checks.append(
        ("simplex4-non-strict", certification(s4).verdict == NON_STRICT_2_CRITICAL)
    )
    for dg in (3, 4):
        checks.append(
            (
                f"mixed7({dg})-strict",
                certification(mixed7_example(dg)).verdict == STRICT_2_CRITICAL,
            )
        )
    checks.append(("each-under-2s", slowest < 2.0))
    failed = [name for name, passed in checks if not passed]
    conclude(
        4,
        "counterexample-certificates",
        not failed,
        f"{len(checks)} checks, slowest certification {slowest:.2f}s"
        + (f", failed {failed}" if failed else ""),
    )


def test_criterion_05_spurious_point_certificates():
    example = planar7_example()
    bundle = certificate_matrices(example.spurious, example.ground_truth)
    lam_max = float(np.linalg.eigvalsh(bundle.C).max())
    cz = float(np.abs(bundle.C @ example.spurious).max())
    trace_gap = float(np.trace(bundle.P) - np.trace(bundle.S))
    ok = lam_max <= 1e-10 and cz <= 1e-12 and trace_gap <= 1e-9
    conclude(
        5,
        "spurious-certificates",
        ok,
        f"lambda_max(C) {lam_max:.2e} (tol 1e-10), max|CZ| {cz:.2e},"
        f" tr(P)-tr(S) {trace_gap:.3e} (tol 1e-9)",
    )


def test_criterion_06_rank_deficient_by_one_landscape():
    t0 = time.perf_counter()
    rng = np.random.default_rng(600)
    worst = 0.0
    for _ in range(50):
        Y = rng.standard_normal((10, 2))
        instance = CompleteInstance(Y, 9)
        result = minimize(instance, rng.standard_normal((10, 9)))
        worst = max(worst, result.cost)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 120.0
    conclude(
        6,
        "rank-n-minus-1",
        ok,
        f"50 runs, worst cost {worst:.2e} (tol 1e-10), {elapsed:.1f}s (cap 120s)",
    )


def test_criterion_07_sqrt_threshold_regime():
    threshold = sqrtn_threshold(2, 30)
    rng = np.random.default_rng(700)
    worst = 0.0
    for _ in range(50):
        Y = rng.standard_normal((30, 2))
        instance = CompleteInstance(Y, threshold)
        result = minimize(instance, rng.standard_normal((30, threshold)))
        worst = max(worst, result.cost)
    ok = threshold == 11 and worst <= 1e-10
    conclude(
        7,
        "sqrt-threshold-regime",
        ok,
        f"sqrtn_threshold(2,30)={threshold} (expect 11), 50 runs,"
        f" worst cost {worst:.2e} (tol 1e-10)",
    )


def test_criterion_08_gaussian_condition_regime():
    # deliberately unbounded in time (no cap in the claim); ~50 min serial
    t0 = time.perf_counter()
    rng = np.random.default_rng(800)
    n, dg = 200, 2
    worst = 0.0
    k_range = [math.inf, 0]
    # the default gradient threshold can stop within a factor 2 of the 1e-10
    # bar on ill-conditioned instances; one extra order of gradient decrease
    # rides the superlinear phase down to ~1e-19
    options = SolverOptions(grad_tol=1e-13)
    for _ in range(100):
        Y = rng.standard_normal((n, dg))
        k = dg
        while not gaussian_condition(Y, k):
            k += 1
        k_range = [min(k_range[0], k), max(k_range[1], k)]
        instance = CompleteInstance(Y, k)
        scale = math.sqrt(dg / k)
        for _ in range(20):
            Z0 = scale * rng.standard_normal((n, k))
            result = minimize(instance, Z0, options)
            worst = max(worst, result.cost)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10
    conclude(
        8,
        "gaussian-condition-regime",
        ok,
        f"100 instances x 20 solves, smallest passing k in {k_range},"
        f" worst cost {worst:.2e} (tol 1e-10), {elapsed / 60:.1f} min",
    )


def test_criterion_09_density_sweep_reproduction():
    """Recovery-rate curves: relaxed rank must dominate exact rank everywhere.

    Known honest failure at mid densities (0.2 <= density <= 0.5).  The
    dominance claim is structurally false there for ground-truth recovery:
    a relaxed solve always drives the cost to zero, but on a sparse graph
    the zero-cost set contains genuinely higher-dimensional flexes of the
    framework, so the iterate almost never projects back onto the ground
    truth (it recovers only when every zero-cost realization is forced to
    the ground-truth dimension).  An exact-dimension solve often traps at
    spurious minima, yet when it does reach zero cost the configuration is
    in the right dimension and a lucky choice of reflections recovers the
    ground truth outright.  At density 0.3, dg=1: exact rank recovers
    15.3% of trials, relaxed 7.7% (1000-trial estimates; the gap is four
    standard errors past the allowed slack and survives every solver
    budget tried).
    Replayed relaxed failures confirm the mechanism: converged iterates
    carry two order-one singular values, i.e. true 2-d zero-cost flexes,
    not alignment artifacts.  Cost-based success, by contrast, satisfies
    dominance at every density with wide margins.  The assertion is kept
    faithful to the stated claim rather than weakened to pass.
    """
    t0 = time.perf_counter()
    densities = tuple(i / 10 for i in range(1, 11))
    problems = []
    for dg in (1, 2):
        spec = SweepSpec(
            n=10,
            dg=dg,
            k_values=(dg, dg + 1),
            densities=densities,
            trials_per_cell=100,
            base_seed=900 + dg,
        )
        records, summary = sweep(spec)
        rate = {(cell.k, cell.density): cell.success_rate for cell in summary}
        if rate[(dg + 1, 1.0)] != 1.0:
            problems.append(f"dg={dg} full-density rate {rate[(dg + 1, 1.0)]:.2f}")
        for density in densities:
            if rate[(dg + 1, density)] < rate[(dg, density)] - 0.02:
                problems.append(
                    f"dg={dg} density {density}: k={dg + 1} rate"
                    f" {rate[(dg + 1, density)]:.2f} <"
                    f" k={dg} rate {rate[(dg, density)]:.2f} - 0.02"
                )
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 1800.0
    conclude(
        9,
        "density-sweep",
        ok,
        f"4000 trials, {elapsed / 60:.1f} min (cap 30)"
        + (f", problems {problems}" if problems else ""),
    )


def test_criterion_10_trapping_witness():
    example = planar7_example()
    rng = np.random.default_rng(1000)
    trapped = 0
    for _ in range(100):
        Z0 = example.spurious + 1e-6 * rng.standard_normal(example.spurious.shape)
        result = minimize(example.instance(), Z0)
        trapped += result.cost > 1e-6
    lifted = example.spurious_lifted(3)
    escaped = 0
    worst_escape = 0.0
    for _ in range(100):
        Z0 = lifted + 1e-6 * rng.standard_normal(lifted.shape)
        result = minimize(example.instance(3), Z0)
        escaped += result.cost <= 1e-10
        worst_escape = max(worst_escape, result.cost)
    ok = trapped >= 95 and escaped == 100
    conclude(
        10,
        "trapping-witness",
        ok,
        f"k=2 trapped {trapped}/100 (need >= 95), k=3 escaped {escaped}/100"
        f" worst cost {worst_escape:.2e} (tol 1e-10)",
    )


def test_criterion_11_noise_protocol():
    noisy = SweepSpec(
        n=10,
        dg=2,
        k_values=(3,),
        densities=(1.0,),
        trials_per_cell=20,
        base_seed=1100,
        noise_variance=0.1,
    )
    records, _ = run_noisy_protocol(noisy)
    min_proxy = min(record.proxy_cost for record in records)
    clean = SweepSpec(
        n=10, dg=2, k_values=(3,), densities=(1.0,), trials_per_cell=5, base_seed=1100
    )
    zeroed = SweepSpec(
        n=10,
        dg=2,
        k_values=(3,),
        densities=(1.0,),
        trials_per_cell=5,
        base_seed=1100,
        noise_variance=0.0,
    )
    first, second = io.StringIO(), io.StringIO()
    sweep(clean, first)
    sweep(zeroed, second)
    identical = first.getvalue() == second.getvalue()
    ok = len(records) == 20 and min_proxy > 0 and identical
    conclude(
        11,
        "noise-protocol",
        ok,
        f"20 proxies, min proxy cost {min_proxy:.3e} (need > 0),"
        f" zero-variance CSV identical to noiseless: {identical}",
    )
