"""Coefficient maximization over schedule families."""

import math

import numpy as np
import pytest

from polyloewner import (
    DomainError,
    HerglotzField,
    SearchSpace,
    bang_bang_probe,
    catalog_generator,
    decode_field,
    maximize,
    objective,
    rotate_generator,
)


class TestSpace:
    def test_auto_name_pool_respects_dimension(self):
        space = SearchSpace(dim=2, alpha=(1, 1))
        assert space.names == ("H1", "H2", "H3", "H4", "H5")
        space3 = SearchSpace(dim=3, alpha=(1, 1, 0))
        assert space3.names == tuple(f"H{j}" for j in range(1, 8))

    def test_validation(self):
        with pytest.raises(DomainError):
            SearchSpace(dim=1, alpha=(2,))
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1, 0))
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 0))
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1), family="annealing")
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1), pieces=0)
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1), names=("H6",))
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1), horizon=0.5)
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(1, 1), horizon=20.0, certify_horizon=15.0)
        with pytest.raises(DomainError):
            SearchSpace(dim=2, alpha=(0, 4), degree=3)


class TestDecode:
    def test_rotation_identity_angles_recover_catalog_entry(self):
        space = SearchSpace(dim=2, alpha=(0, 2), names=("H4",))
        field = decode_field(space, ((0,), (0.0, 0.0)))
        assert isinstance(field, HerglotzField)
        gen = field.generator_at(0.0)
        want = catalog_generator("H4")
        got = gen.jet_array(3)
        assert np.max(np.abs(got - want.jet_array(3))) < 1e-12

    def test_piecewise_breaks_are_decoded_in_order(self):
        space = SearchSpace(dim=2, alpha=(0, 2), names=("H1", "H4"), pieces=2)
        field = decode_field(space, ((0, 1), (0.0, 0.0, 0.0, 0.0, 7.3)))
        assert len(field.breakpoints) == 1
        assert 0.0 < field.breakpoints[0] < space.horizon

    def test_convex_combo_weights(self):
        space = SearchSpace(
            dim=2, alpha=(1, 1), family="convex-combo", names=("H2", "H4")
        )
        # two parts: angles + raw weight each; equal weights
        field = decode_field(space, ((0, 1), (0.0, 0.0, 0.5, 0.0, 0.0, 0.5)))
        gen = field.generator_at(0.0)
        assert gen.provenance["kind"] == "convex-combination"

    def test_product_form_objective_vanishes_off_family(self):
        # component 0 of a product-form generator always carries a z1 factor,
        # so the (0,2) coefficient of the limit stays 0 for any parameters
        space = SearchSpace(dim=2, alpha=(0, 2), family="product-form", atoms=2)
        params = (
            (1, 0),
            (0.3, 0.4, 1.1, 0.6, 2.0, 0.2, 0.7, 0.8),
        )
        field = decode_field(space, params)
        assert abs(objective(space, params, horizon=6.0)) < 1e-8
        assert field.dim == 2


class TestMaximize:
    def test_rotation_search_is_sound_and_reaches_known_value(self):
        space = SearchSpace(
            dim=2, alpha=(1, 1), horizon=8.0, certify_horizon=10.0, degree=3
        )
        res = maximize(space, budget=60, seed=3)
        bound = 2.0
        assert res.certified_value <= bound + 1e-4
        assert res.certified_value >= bound - 1e-2
        assert res.evaluations <= 60
        assert res.certified_tail < 1e-3
        vals = [v for _, v in res.history]
        assert vals == sorted(vals)
        assert res.best_field().dim == 2

    def test_same_seed_reproduces_everything(self):
        space = SearchSpace(
            dim=2, alpha=(0, 2), horizon=6.0, certify_horizon=8.0, degree=3
        )
        a = maximize(space, budget=40, seed=11)
        b = maximize(space, budget=40, seed=11)
        assert a.best_params == b.best_params
        assert a.best_value == b.best_value
        assert a.history == b.history
        assert a.evaluations == b.evaluations

    def test_result_json_and_csv(self):
        space = SearchSpace(
            dim=2, alpha=(0, 2), horizon=6.0, certify_horizon=8.0, degree=3
        )
        res = maximize(space, budget=25, seed=0)
        payload = res.to_json()
        assert payload["family"] == "catalog-rotation"
        assert payload["alpha"] == [0, 2]
        assert payload["budget"] == 25
        assert payload["best_params"]["ints"] == list(res.best_params[0])
        assert payload["history"][-1]["value"] == res.best_value
        rows = res.history_csv_rows()
        assert rows[-1][1] == res.best_value

    def test_polish_method_runs(self):
        space = SearchSpace(
            dim=2, alpha=(1, 1), horizon=6.0, certify_horizon=8.0, degree=3
        )
        res = maximize(space, budget=40, seed=5, method="coordinate-ascent+polish")
        assert res.method == "coordinate-ascent+polish"
        assert res.certified_value <= 2.0 + 1e-4

    def test_unknown_method_rejected(self):
        space = SearchSpace(dim=2, alpha=(1, 1))
        with pytest.raises(DomainError):
            maximize(space, budget=10, method="gradient-descent")


class TestProbe:
    def test_ranking_matches_rotation_arithmetic(self):
        T = 9.0
        h4 = catalog_generator("H4")
        rot = rotate_generator(h4, (0.0, np.pi / 3.0))
        out = bang_bang_probe((0, 2), [("plain", h4), ("spun", rot)], horizon=T)
        assert [o.label for o in out] == ["plain", "spun"]
        scale = 1.0 - math.exp(-T)
        assert out[0].value == pytest.approx(scale, abs=1e-6)
        # alpha.theta - theta_0 = 2pi/3 puts Re at -1/2
        assert out[1].value == pytest.approx(-0.5 * scale, abs=1e-6)
        assert all(o.tail_bound < 1e-3 for o in out)
        payload = out[0].to_json()
        assert payload["label"] == "plain"
        assert payload["value"] == out[0].value

    def test_unlabeled_candidates_use_provenance(self):
        h1 = catalog_generator("H1")
        out = bang_bang_probe((2, 0), [h1], horizon=6.0)
        assert out[0].label == "H1"
