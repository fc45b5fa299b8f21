import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hbspace.errors import SymbolError
from hbspace.outer import ModulusProfile
from hbspace.symbols import (
    SymbolSpec,
    construct_outer_from_modulus,
    evaluate_boundary,
    extremality_diagnostic,
    inner_diagnostic,
    moments_from_coefficients,
    moments_of_modulus_squared,
    parity_classify,
    parse_symbol,
    resolved_class,
    taylor_coefficients,
)

from helpers import HALF, Z3, Z_HALF, even_outer, odd_outer


class TestParse:
    def test_triple_zero_is_z_cubed(self):
        spec = parse_symbol({"kind": "blaschke", "zeros": [0, 0, 0]})
        assert_allclose(spec.coefficients(6), [0, 0, 0, 1, 0, 0], atol=1e-15)

    def test_polynomial_fields(self):
        spec = parse_symbol('{"kind": "polynomial", "coeffs": [0.5, 0.5]}')
        assert_allclose(spec.coefficients(4), [0.5, 0.5, 0, 0])

    def test_zero_outside_disk(self):
        with pytest.raises(SymbolError, match="zero outside disk"):
            parse_symbol({"kind": "blaschke", "zeros": [2]})

    @pytest.mark.parametrize("doc", [
        "{not json",
        {"kind": "nope"},
        {"kind": "blaschke"},
        {"kind": "polynomial", "coeffs": [1, 1]},
        {"kind": "outer_from_modulus", "modulus": {"default": 0.0}},
        {"kind": "scaled", "scale": 2, "factors": [{"kind": "blaschke", "zeros": [0]}]},
    ])
    def test_rejects_bad_documents(self, doc):
        with pytest.raises(SymbolError):
            parse_symbol(doc)

    def test_complex_zero_strings_and_file(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"kind": "blaschke", "zeros": ["0.25+0.5j", [0.1, -0.2]]}))
        spec = parse_symbol(path)
        assert spec.zeros == (0.25 + 0.5j, 0.1 - 0.2j)

    def test_round_trip_dict(self):
        spec = even_outer()
        again = parse_symbol(spec.to_dict())
        assert_allclose(again.coefficients(32), spec.coefficients(32), atol=1e-15)


class TestBoundary:
    def test_inner_grid(self):
        grid = evaluate_boundary(Z3, 64)
        assert_allclose(np.abs(grid.samples), 1.0, atol=1e-14)
        assert np.all(grid.rho_samples == 0.0)

    def test_half_rho_is_sin_squared(self):
        grid = evaluate_boundary(HALF, 256)
        assert_allclose(grid.rho_samples, np.sin(grid.theta / 2) ** 2, atol=1e-12)

    def test_constant_outer(self):
        grid = evaluate_boundary(SymbolSpec.outer(0.5), 64)
        assert_allclose(np.abs(grid.samples), 0.5, atol=1e-12)

    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            evaluate_boundary(Z3, 100)


class TestOuter:
    def test_constant_modulus(self):
        _, coeffs = construct_outer_from_modulus(ModulusProfile(0.7), 64)
        assert_allclose(coeffs, np.r_[0.7, np.zeros(31)], atol=1e-14)

    def test_cosine_modulus_reproduces_half(self):
        # (1+z)/2 is outer and has modulus |cos(t/2)|
        _, coeffs = construct_outer_from_modulus(ModulusProfile("abs(cos(t/2))"), 4096)
        assert_allclose(coeffs[:8], [0.5, 0.5, 0, 0, 0, 0, 0, 0], atol=1e-8)

    def test_two_arc_is_even(self):
        coeffs = even_outer().coefficients(2048)
        assert np.max(np.abs(coeffs[1::2])) <= 1e-8

    def test_parseval_against_quadrature(self):
        spec = even_outer()
        for size in (4096, 8192):
            grid = evaluate_boundary(spec, size)
            m0 = moments_of_modulus_squared(grid, 4)[0].real
            energy = np.sum(np.abs(spec.coefficients(size // 2)) ** 2)
            assert abs(energy - m0) <= 1e-4 * 4096 / size

    def test_idempotent_reconstruction(self):
        spec = even_outer()
        grid = evaluate_boundary(spec, 4096)
        t = grid.theta
        w = np.abs(grid.samples)
        # feed the reconstructed modulus back in as a sampled expression
        rebuilt = SymbolSpec.outer(0.5, arcs=[(-np.pi / 4, np.pi / 4, 1.0),
                                              (3 * np.pi / 4, 5 * np.pi / 4, 1.0)])
        assert_allclose(np.abs(evaluate_boundary(rebuilt, 4096).samples), w, atol=1e-12)
        assert_allclose(rebuilt.coefficients(64), spec.coefficients(64), atol=1e-12)
        assert t.size == 4096


class TestTaylorAndMoments:
    def test_z_cubed_coefficients(self):
        grid = evaluate_boundary(Z3, 64)
        assert_allclose(taylor_coefficients(grid, 6), [0, 0, 0, 1, 0, 0], atol=1e-14)

    def test_half_coefficients(self):
        grid = evaluate_boundary(HALF, 64)
        assert_allclose(taylor_coefficients(grid, 4), [0.5, 0.5, 0, 0], atol=1e-12)

    def test_inner_moments(self):
        m = moments_of_modulus_squared(evaluate_boundary(Z_HALF, 256), 10)
        assert_allclose(m.values, np.r_[1.0, np.zeros(10)], atol=1e-14)

    def test_half_moments(self):
        # |b|^2 = (1 + cos t)/2
        m = moments_of_modulus_squared(evaluate_boundary(HALF, 256), 5)
        assert_allclose(m.values, [0.5, 0.25, 0, 0, 0, 0], atol=1e-14)

    def test_negative_index_conjugates(self):
        m = moments_of_modulus_squared(evaluate_boundary(odd_outer(), 4096), 5)
        assert m.pairing(-3) == np.conj(m.pairing(3))
        assert m.pairing(99) == 0

    def test_even_symbol_odd_moments_vanish(self):
        m = moments_of_modulus_squared(evaluate_boundary(even_outer(), 4096), 33)
        assert np.max(np.abs(m.values[1::2])) <= 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=0.8), min_size=1, max_size=4))
    def test_moments_match_coefficients_for_blaschke_times_polynomial(self, zeros):
        spec = SymbolSpec.product(SymbolSpec.blaschke(zeros), HALF)
        grid = evaluate_boundary(spec, 1024)
        quad = moments_of_modulus_squared(grid, 6).values
        direct = moments_from_coefficients(spec.coefficients(512), 6)
        assert_allclose(quad, direct, atol=1e-10)


class TestDiagnostics:
    @pytest.mark.parametrize("coeffs, label", [
        ((0, 0.5, 0, 0.25), "odd"),
        ((1, 0, 0.3), "even"),
        ((0.5, 0.5), "neither"),
    ])
    def test_parity(self, coeffs, label):
        assert parity_classify(coeffs).label == label

    def test_parity_residuals_half(self):
        res = parity_classify((0.5, 0.5))
        assert res.odd_fraction == pytest.approx(0.5)
        assert res.even_fraction == pytest.approx(0.5)

    def test_inner_diagnostic(self):
        assert inner_diagnostic(evaluate_boundary(Z_HALF, 256)).deviation <= 1e-12
        half = inner_diagnostic(evaluate_boundary(HALF, 256))
        assert half.label == "not_inner"
        assert half.deviation == pytest.approx(1.0, abs=1e-12)
        outer = inner_diagnostic(evaluate_boundary(even_outer(), 4096))
        assert outer.deviation == pytest.approx(0.75, abs=1e-12)

    def test_extremality(self):
        half = extremality_diagnostic(HALF)
        assert half.label == "nonextreme"
        assert half.estimates[-1] == pytest.approx(-2 * np.log(2), abs=1e-3)
        assert extremality_diagnostic(Z3).label == "extreme"
        assert extremality_diagnostic(SymbolSpec.outer(0.5, arcs=[(0, np.pi, 1.0)])).label == "extreme"

    def test_declared_class_wins(self):
        assert resolved_class(even_outer()) == "extreme_non_inner"
        assert resolved_class(HALF) == "nonextreme"
        assert resolved_class(Z3) == "inner"

    def test_inner_factor_detection(self):
        assert Z3.has_inner_factor
        assert odd_outer().has_inner_factor
        assert not HALF.has_inner_factor
        assert not even_outer().has_inner_factor
