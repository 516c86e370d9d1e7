"""One test per acceptance criterion; each prints a PASS/FAIL line with its measured value."""
import os
import subprocess
import sys
import time

from radonhgf import contiguity, matint, weyl
from radonhgf.jordan import Partition, check_theta_expansion
from tests.conftest import CRITERIA_LINES


def criterion(num, name, ok, detail):
    line = f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    CRITERIA_LINES.append(line)
    assert ok, line


def test_01_capelli():
    t0 = time.perf_counter()
    reps = [weyl.capelli_check(r, max_r=3) for r in (1, 2, 3)]
    fast = time.perf_counter() - t0
    t1 = time.perf_counter()
    r4 = weyl.capelli_check(4, max_r=None)
    lifted = time.perf_counter() - t1
    ok = all(r.exact for r in reps) and fast < 5 and r4.exact and lifted < 300
    criterion(1, "capelli", ok, f"r=1..3 exact in {fast:.2f}s < 5s; r=4 lifted exact={r4.exact} in {lifted:.2f}s")


def test_02_cayley():
    t0 = time.perf_counter()
    reps = [weyl.cayley_check(r) for r in (1, 2, 3, 4)]
    dt = time.perf_counter() - t0
    coeffs_ok = all(r.details["coefficients_found"] == r.details["pochhammer_coefficients"] for r in reps)
    ok = all(r.exact for r in reps) and coeffs_ok and dt < 10
    criterion(2, "cayley", ok, f"r=1..4 exact, Pochhammer coefficients match={coeffs_ok}, {dt:.2f}s < 10s")


def test_03_capelli2_property():
    reps = [weyl.capelli2_check(r) for r in (1, 2, 3)]
    criterion(3, "E'_ij f^s suite", all(r.exact for r in reps), "all i,j for r<=3 exact")


def test_04_nonconf_symbolic():
    t0 = time.perf_counter()
    failures, count = [], 0
    for r in (1, 2):
        for m in range(r + 1, 5):
            for n in (2, 3):
                for i in range(1, n + 1):
                    for j in range(1, n + 1):
                        if i != j:
                            count += 1
                            if not contiguity.check_nonconf_integrand(r, m, i, j, n=n).exact:
                                failures.append((r, m, n, i, j))
    dt = time.perf_counter() - t0
    criterion(4, "non-confluent integrand", not failures and dt < 120, f"{count} cases, generic t, {dt:.2f}s < 120s")


def test_05_conf_numeric():
    t0 = time.perf_counter()
    worst, failures, count = 0.0, [], 0
    for lam in [(1, 1, 1), (2, 1), (2, 2), (3, 1)]:
        for r in (1, 2):
            m = max(r + 1, 2 * r)
            n = len(lam)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i == j:
                        continue
                    rep = contiguity.check_conf_integrand(lam, r, m, i, j, trials=20, seed=2024, tol=1e-8)
                    count += 1
                    worst = max(worst, rep.max_rel_err)
                    if not rep.passed:
                        failures.append((lam, r, i, j))
    dt = time.perf_counter() - t0
    criterion(5, "confluent integrand", not failures and dt < 120,
              f"{count} cases x 20 points, max rel err {worst:.2e} <= 1e-8, {dt:.2f}s")


def test_06_theta_expansion():
    rep = check_theta_expansion(r=2, kmax=4)
    criterion(6, "theta_1..theta_4", rep.exact, "symbolic 2x2 entries, exact")


def test_07_covariance_lemma():
    worst, ok = 0.0, True
    for r, m in [(1, 2), (1, 3), (2, 3)]:
        rep = contiguity.check_covariance_lemma(r, m, trials=20, seed=7, tol=1e-9)
        worst = max(worst, rep.max_rel_err)
        ok = ok and rep.passed
    criterion(7, "covariance lemma", ok, f"20 random g per (r,m), max rel err {worst:.2e} <= 1e-9")


def test_08_normal_forms():
    reps = [
        contiguity.check_normal_forms((1, 1, 1), r, draws=100, seed=8) for r in (1, 2)
    ] + [contiguity.check_normal_forms((2, 1), r, draws=100, seed=8, variant=v) for r in (1, 2) for v in ("1", "2")]
    outcomes = {r: reps[r - 1].details["variant_outcomes"] for r in (1, 2)}
    resolved = outcomes[2]["proof"]["failed"] == 0 and outcomes[2]["statement"]["held"] == 0
    ok = all(r.exact for r in reps) and resolved
    criterion(8, "normal forms", ok, f"100 exact draws each; beta variant outcomes r=1 {outcomes[1]}, r=2 {outcomes[2]}")


def test_09_expdet():
    exact = [contiguity.check_proof_identities("expdet", r) for r in (1, 2)]
    num = contiguity.check_proof_identities("expdet", 3, trials=20, seed=9, tol=1e-10)
    ok = all(r.exact for r in exact) and num.passed
    criterion(9, "det(d_v) exp(Tr vA)", ok, f"exact r<=2, r=3 max rel err {num.max_rel_err:.2e} <= 1e-10")


def test_10_gamma_closed_form():
    t0 = time.perf_counter()
    reps = [matint.check_gamma_closed(r, [r + 1, r + 1.5, r + 3], tol=1e-8) for r in (1, 2)]
    r3 = matint.check_gamma_closed(3, [4], tol=1e-6)
    dt = time.perf_counter() - t0
    worst = max(r.max_rel_err for r in reps)
    ok = all(r.passed for r in reps) and r3.passed and dt < 60
    criterion(10, "matrix gamma quadrature", ok,
              f"r<=2 max rel err {worst:.2e} <= 1e-8; r=3 {r3.max_rel_err:.2e} <= 1e-6; {dt:.2f}s")


def test_11_gamma_contiguity():
    reps = [matint.check_gamma_contiguity(r, [r + 0.5, r + 1, r + 2.5], tol=1e-9) for r in (1, 2)]
    worst = max(r.max_rel_err for r in reps)
    criterion(11, "gamma contiguity", all(r.passed for r in reps), f"raw ratios max rel err {worst:.2e} <= 1e-9")


def test_12_beta_contiguity():
    reps = [matint.check_beta_contiguity(r, [(r + 1, r + 1), (r + 1, r + 2), (r + 1.5, r + 0.5)], tol=1e-8)
            for r in (1, 2)]
    example = matint.beta_raw(2, 4, 3) / matint.beta_raw(2, 3, 3)
    ok = all(r.passed for r in reps) and abs(example - 0.2) <= 1e-8 * 0.2
    worst = max(r.max_rel_err for r in reps)
    criterion(12, "beta contiguity", ok, f"raw ratios max rel err {worst:.2e}; B2(4,3)/B2(3,3) = {example:.15f}")


def test_13_negative_controls():
    b = weyl.cayley_check(2, b_perturb=1)
    cap = weyl.capelli_check(2, shift_perturb=1)
    conf = [contiguity.check_conf_integrand(lam, 2, 4, 1, 2, trials=5, seed=13, exponent_perturb=1)
            for lam in [(1, 1, 1), (2, 2)]]
    flipped = [not b.passed, not cap.passed] + [not c.passed for c in conf]
    criterion(13, "negative controls", all(flipped), f"b+1, shift+1, exponent r+1 (both cases) flipped: {flipped}")


def test_14_verify_all():
    t0 = time.perf_counter()
    out = subprocess.run([sys.executable, "-m", "radonhgf.cli", "verify-all"], capture_output=True, text=True,
                         env=dict(os.environ))
    dt = time.perf_counter() - t0
    ok = out.returncode == 0 and dt < 600
    criterion(14, "verify-all defaults", ok, f"exit {out.returncode}, {dt:.1f}s < 600s")
