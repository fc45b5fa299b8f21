"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the terminal
summary (see ``conftest.py``).
"""

import time

import numpy as np
import pytest

from conftest import record
from hbspace.inner_case import commutant_projection_check, inner_case_check
from hbspace.model_space import ModelSpace
from hbspace.reducibility import (
    SAMPLE_ALPHAS,
    CandidatePair,
    ReducibilityConfig,
    build_bilinear_system,
    construct_reducing_subspaces,
    decide_reducibility,
    solve_candidates,
    verify_moment_recurrences,
    verify_subspace_pair,
)
from hbspace.space import (
    cauchy_isometry_residual,
    gram_closed_form,
    gram_model_space,
    gram_via_moments,
    gram_via_pseudoinverse,
    intertwining_residual,
    verify_defect_identities,
)
from hbspace.symbols import (
    evaluate_boundary,
    moments_of_modulus_squared,
    parity_classify,
)

from helpers import HALF, Z3, asymmetric_outer, blaschke_corpus, even_outer, odd_outer

TOL_EXACT = 1e-8
TOL_TRUNCATED = 1e-4
TOL_OUTER = 1e-3
GRIDS = (4096, 8192)
TRUNCATIONS = (256, 512)
L_ORBIT = 16  # orbit length for the truncated-oracle legs


def outer_corpus():
    return {"even": even_outer(), "odd": odd_outer(), "asymmetric": asymmetric_outer()}


def refined_not_worse(coarse, fine, floor=1e-10):
    """``fine <= coarse``, or both already at the roundoff floor."""
    return fine <= max(coarse, floor)


@pytest.fixture(scope="module")
def blaschke_run():
    corpus = blaschke_corpus()
    t0 = time.perf_counter()
    rows = []
    for spec in corpus:
        cert = decide_reducibility(spec, ReducibilityConfig(tol=TOL_EXACT, tol_verify=TOL_EXACT))
        theory = inner_case_check(spec, tol=TOL_EXACT)
        rows.append((spec, cert, theory))
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def outer_certs():
    return {k: decide_reducibility(s) for k, s in outer_corpus().items()}


def test_criterion_1_inner_structure(blaschke_run):
    rows, elapsed = blaschke_run
    degrees = {len(s.zeros) for s, _, _ in rows}
    mismatches = [s.label for s, c, t in rows
                  if c.decision == "inconclusive" or (c.decision == "reducible") != t.reducible]
    ok = len(rows) >= 50 and degrees == set(range(2, 7)) and not mismatches and elapsed < 60
    record(1, ok, f"{len(rows)} products, {len(mismatches)} mismatches, {elapsed:.1f} s")
    assert len(rows) >= 50
    assert degrees == set(range(2, 7))
    assert not mismatches
    assert elapsed < 60


def _moment_gram_levels(spec, L):
    return [gram_via_moments(spec, L, m) for m in GRIDS]


def _pinv_gram_levels(spec, L):
    return [gram_via_pseudoinverse(spec, n, L) for n in TRUNCATIONS]


def _verify_levels(spec, pairs, L, moments):
    """Worst residuals of each pair against moment and oracle Gram matrices."""
    levels = _moment_gram_levels(spec, L) + _pinv_gram_levels(spec, L)
    worst = []
    for G in levels:
        w = {"orthogonality": 0.0, "invariance": 0.0, "complete": True, "passed": True}
        for p in pairs:
            sp = construct_reducing_subspaces(spec, p, L - 4)
            rep = verify_subspace_pair(sp, G, spec, tol=TOL_OUTER, moments=moments)
            w["orthogonality"] = max(w["orthogonality"], rep["orthogonality"])
            w["invariance"] = max(w["invariance"], rep["invariance"])
            w["complete"] &= rep["completeness"]["ok"]
            w["passed"] &= rep["passed"]
        worst.append(w)
    return worst


def test_criterion_2_symmetric_outer(outer_certs):
    L = L_ORBIT
    details, ok = [], True

    even, cert = even_outer(), outer_certs["even"]
    fam = cert.decision == "reducible" and cert.solution_set.relation == "beta = -conj(alpha)"
    pairs = [CandidatePair.make(a, -np.conj(a), source="parity_theory") for a in SAMPLE_ALPHAS]
    moments = moments_of_modulus_squared(evaluate_boundary(even, GRIDS[0]), 2 * L)
    levels = _verify_levels(even, pairs, L, moments)
    even_ok = fam and all(w["passed"] and w["complete"] for w in levels)
    for key in ("orthogonality", "invariance"):
        even_ok &= refined_not_worse(levels[0][key], levels[1][key])
        even_ok &= refined_not_worse(levels[2][key], levels[3][key])
    details.append(f"even: family={fam}, worst residual "
                   f"{max(max(w['orthogonality'], w['invariance']) for w in levels):.1e}")
    ok &= even_ok

    odd, cert = odd_outer(), outer_certs["odd"]
    (pair,) = cert.solution_set.pairs if len(cert.solution_set.pairs) == 1 else (None,)
    single = pair is not None and abs(pair.alpha) <= 1e-10 and abs(pair.beta) <= 1e-10
    sp = construct_reducing_subspaces(odd, parity="odd", n_orbit=L - 4)
    odd_index = all(np.count_nonzero(sp.coords_M1[:, k]) == 1 and sp.coords_M1[2 * k, k] == 1
                    for k in range(sp.coords_M1.shape[1]))
    moments = moments_of_modulus_squared(evaluate_boundary(odd, GRIDS[0]), 2 * L)
    levels = _verify_levels(odd, [CandidatePair(0, 0)], L, moments)
    odd_ok = cert.decision == "reducible" and single and odd_index
    odd_ok &= all(w["passed"] and w["complete"] for w in levels)
    for key in ("orthogonality", "invariance"):
        odd_ok &= refined_not_worse(levels[0][key], levels[1][key])
        odd_ok &= refined_not_worse(levels[2][key], levels[3][key])
    details.append(f"odd: pair (0,0)={single}")
    ok &= odd_ok

    # the Gram approximation driving these residuals converges under doubling
    ref = gram_closed_form(even, L).entries
    errs = [float(np.max(np.abs(G.entries - ref))) for G in _moment_gram_levels(even, L)]
    conv = errs[1] < errs[0]
    details.append(f"moment Gram error {errs[0]:.1e} -> {errs[1]:.1e}")
    ok &= conv
    record(2, ok, ", ".join(details))
    assert even_ok and odd_ok and conv


def test_criterion_3_asymmetric_outer(outer_certs):
    spec = asymmetric_outer()
    cert = outer_certs["asymmetric"]
    tol = TOL_TRUNCATED
    checks = {
        "irreducible": cert.decision == "irreducible",
        "empty": cert.solution_set.kind == "empty",
        "margin": cert.solution_set.min_variety_residual >= 10 * tol,
        "cutoff_stable": cert.diagnostics["stable_under_cutoff"],
    }
    refined = []
    L = 30
    for G in [gram_via_moments(spec, L, m) for m in GRIDS]:
        sol = solve_candidates(build_bilinear_system(G, 12), tol, G=G)
        refined.append((sol.kind, sol.min_variety_residual))
    for G in _pinv_gram_levels(spec, L_ORBIT):
        K = (L_ORBIT - 2) // 2
        sol = solve_candidates(build_bilinear_system(G, K), tol, G=G)
        refined.append((sol.kind, sol.min_variety_residual))
    checks["refinement"] = all(k == "empty" and r >= 10 * tol for k, r in refined)
    ok = all(checks.values())
    record(3, ok, f"min residual {cert.solution_set.min_variety_residual:.3f} "
                  f"(threshold {10 * tol:g}), refined minima "
                  + ", ".join(f"{r:.3f}" for _, r in refined))
    assert ok, checks


def test_criterion_4_gram_agreement():
    worst_exact = 0.0
    for spec in blaschke_corpus():
        ref = gram_model_space(spec, 12).entries
        for G in (gram_via_moments(spec, 12), gram_closed_form(spec, 12),
                  gram_via_pseudoinverse(spec, 256, 12)):
            worst_exact = max(worst_exact, float(np.max(np.abs(G.entries - ref))))
    ok = worst_exact <= 1e-10
    worst_outer, converging = 0.0, True
    for spec in outer_corpus().values():
        C = gram_closed_form(spec, L_ORBIT).entries
        M = [G.entries for G in _moment_gram_levels(spec, L_ORBIT)]
        P = [G.entries for G in _pinv_gram_levels(spec, L_ORBIT)]
        diffs = [np.max(np.abs(M[0] - C)), np.max(np.abs(P[0] - C)), np.max(np.abs(M[0] - P[0]))]
        worst_outer = max(worst_outer, *map(float, diffs))
        converging &= np.max(np.abs(M[1] - C)) < np.max(np.abs(M[0] - C))
        converging &= refined_not_worse(np.max(np.abs(P[0] - C)), np.max(np.abs(P[1] - C)))
    ok &= worst_outer <= TOL_OUTER and converging
    record(4, ok, f"Blaschke max diff {worst_exact:.1e}, outer max diff {worst_outer:.1e}, "
                  f"converging={converging}")
    assert worst_exact <= 1e-10
    assert worst_outer <= TOL_OUTER
    assert converging


def test_criterion_5_identity_suite():
    worst = {"exact": 0.0, "truncated": 0.0, "isometry": 0.0}
    failures = []
    for spec in blaschke_corpus():
        for r in verify_defect_identities(spec, 4):
            worst["exact"] = max(worst["exact"], r.residual)
            if r.residual > 1e-10:
                failures.append((spec.label, r.identity))
    truncated = dict(outer_corpus(), half=HALF)
    for name, spec in truncated.items():
        n = 1024 if name == "half" else 256
        for r in verify_defect_identities(spec, 4, truncation=n):
            if np.isnan(r.residual):
                continue
            worst["truncated"] = max(worst["truncated"], r.residual)
            if r.residual > 1e-3:
                failures.append((name, r.identity))
    for spec in list(outer_corpus().values()) + [Z3, blaschke_corpus()[0]]:
        worst["isometry"] = max(worst["isometry"], cauchy_isometry_residual(spec),
                                intertwining_residual(spec))
    ok = not failures and worst["isometry"] <= 1e-6
    record(5, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert not failures
    assert worst["isometry"] <= 1e-6


def test_criterion_6_commutant(blaschke_run):
    rows, _ = blaschke_run
    bad, checked = [], 0
    for spec, _, theory in rows:
        if not 2 <= len(spec.zeros) <= 5:
            continue
        checked += 1
        cz = commutant_projection_check(spec, "z")
        cz2 = commutant_projection_check(spec, "z2")
        if cz.dimension != 1 or not cz.certified or cz2.reducible != theory.reducible:
            bad.append(spec.label)
    record(6, not bad and checked > 0, f"{checked} products, {len(bad)} failures")
    assert checked > 0 and not bad


def _decay_and_bridge(spec, size, order=64):
    grid = evaluate_boundary(spec, size)
    vals = moments_of_modulus_squared(grid, order).values
    b = spec.coefficients(size // 2)
    norm2 = float(vals[0].real)
    missing = max(norm2 - float(np.sum(np.abs(b) ** 2)), 0.0)
    tails = np.sqrt(np.cumsum((np.abs(b) ** 2)[::-1])[::-1] + missing)
    decay = bool(np.all(np.abs(vals) <= np.sqrt(norm2) * tails[: vals.size] + 1e-10))
    symmetric = parity_classify(spec.coefficients(1024)).label in ("even", "odd")
    odd_vanish = float(np.max(np.abs(vals[1::2]))) <= 1e-8
    return decay, symmetric == odd_vanish


def test_criterion_7_moment_certificates(blaschke_run, outer_certs):
    rows, _ = blaschke_run
    worst_exact, worst_outer = 0.0, 0.0
    for spec, cert, _ in rows:
        m = moments_of_modulus_squared(evaluate_boundary(spec, 256), 24)
        for p in cert.solution_set.pairs:
            worst_exact = max(worst_exact, verify_moment_recurrences(m, p, 10))
    for key, cert in outer_certs.items():
        spec = outer_corpus()[key]
        m = moments_of_modulus_squared(evaluate_boundary(spec, 4096), 24)
        for p in cert.solution_set.pairs:
            worst_outer = max(worst_outer, verify_moment_recurrences(m, p, 10))
    decay = all(_decay_and_bridge(s, 256)[0] for s, _, _ in rows)
    decay &= all(_decay_and_bridge(s, 4096)[0] for s in list(outer_corpus().values()) + [HALF])
    ok = worst_exact <= 1e-6 and worst_outer <= 1e-3 and decay
    record(7, ok, f"recurrences exact {worst_exact:.1e}, outer {worst_outer:.1e}, decay={decay}")
    assert worst_exact <= 1e-6
    assert worst_outer <= 1e-3
    assert decay


def test_criterion_7_bridge_symbols_without_inner_factor():
    symbols = [even_outer(), asymmetric_outer(), HALF]
    holds = all(_decay_and_bridge(s, 4096)[1] for s in symbols)
    record(7, holds, f"bridge on symbols without inner factor: {holds}")
    assert holds


@pytest.mark.xfail(strict=True, reason="|b|^2 is even for every inner b; most Blaschke "
                                        "products are neither even nor odd")
def test_criterion_7_bridge_corpus_wide(blaschke_run):
    rows, _ = blaschke_run
    broken = [s.label for s, _, _ in rows if not _decay_and_bridge(s, 256)[1]]
    broken += [k for k, s in outer_corpus().items() if not _decay_and_bridge(s, 4096)[1]]
    record(7, not broken, f"bridge fails on {len(broken)} corpus symbols "
                          f"(inner symbols that are neither even nor odd)")
    assert not broken


def test_criterion_8_z_cubed_anchor():
    t0 = time.perf_counter()
    G = gram_model_space(Z3, 3).entries
    G_full = gram_model_space(Z3, 10)
    sol = solve_candidates(build_bilinear_system(G_full, 4), G=G_full)
    ms = ModelSpace.from_symbol(Z3)
    sp = construct_reducing_subspaces(Z3, CandidatePair(0, 0), 4, taylor_length=3)
    rep = verify_subspace_pair(sp, gram_model_space(Z3, 4), Z3, model_space=ms, tol=1e-12)
    cert = decide_reducibility(Z3)
    elapsed = time.perf_counter() - t0
    span1 = {tuple(np.round(v.real, 12)) for v in sp.basis_M1 if np.any(v)}
    span2 = {tuple(np.round(v.real, 12)) for v in sp.basis_M2 if np.any(v)}
    checks = {
        "gram_identity": np.max(np.abs(G - np.eye(3))) <= 1e-12,
        "unique_pair": sol.kind == "finite" and len(sol.pairs) == 1
        and sol.pairs[0].alpha == 0 and sol.pairs[0].beta == 0,
        "spans": span1 == {(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)} and span2 == {(0.0, 1.0, 0.0)},
        "residuals": max(rep["orthogonality"], rep["invariance"], rep["commutation"],
                         rep["pair_orthogonality"]) <= 1e-12 and rep["passed"],
        "decision": cert.decision == "reducible",
        "runtime": elapsed < 1.0,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    record(8, ok, f"{elapsed * 1e3:.0f} ms" + (f", failed: {failed}" if failed else ""))
    assert ok, checks
