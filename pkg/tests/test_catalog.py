"""The named extremal maps and their generator identities."""

import numpy as np
import pytest

from polyloewner import (
    DomainError,
    catalog_generator,
    catalog_get,
    catalog_names,
    from_starlike,
    map_distance,
    minimal_dimension,
    ring_jacobian,
    verify_catalog,
)

PAIRS = [(f"F{j}", f"H{j}") for j in range(1, 8)]


def test_names_cover_both_roles():
    names = catalog_names()
    assert len(names) == 14
    assert all(n[0] in "FH" for n in names)


@pytest.mark.parametrize("fname,hname", PAIRS)
def test_starlike_generator_identity(fname, hname):
    F = catalog_get(fname)
    H = catalog_get(hname)
    got = from_starlike(F)
    assert map_distance(got.jet, H.jet) <= 1e-10


def test_identity_survives_ambient_extension():
    F = catalog_get("F2", dim=3)
    H = catalog_get("H2", dim=3)
    assert map_distance(from_starlike(F).jet, H.jet) <= 1e-10


def test_verify_catalog_passes():
    report = verify_catalog()
    assert report.passed
    assert report.max_jet_error <= 1e-10
    assert len(report.checks) == 7
    payload = report.to_json()
    assert payload["passed"] is True
    assert len(payload["checks"]) == 7
    assert all(c["membership"]["passed"] for c in payload["checks"])


@pytest.mark.parametrize("fname", [p[0] for p in PAIRS])
def test_closed_form_jacobians_match_ring_probe(fname, make_interior_points):
    entry = catalog_get(fname)
    z = make_interior_points(5, entry.dim, radius=0.55)
    got = entry.jacobian(z)
    want = ring_jacobian(entry.evaluator, z)
    assert np.max(np.abs(got - want)) < 1e-8


def test_known_evaluator_values():
    F1 = catalog_get("F1")
    z = np.array([[0.3 + 0.2j, -0.4j]])
    want0 = z[0, 0] / (1 - z[0, 0]) ** 2
    got = F1.evaluator(z)
    assert got[0, 0] == pytest.approx(want0, abs=1e-14)
    assert got[0, 1] == z[0, 1]

    H6 = catalog_get("H6", dim=3)
    z = np.array([[0.1, 0.2j, 0.3]])
    got = H6.evaluator(z)
    assert got[0, 0] == pytest.approx(-0.1 + 0.2j * 0.3, abs=1e-14)
    assert got[0, 1] == pytest.approx(-0.2j)
    assert got[0, 2] == pytest.approx(-0.3)


def test_evaluators_survive_pole_guards():
    # H2's raw formula divides by 1+z2; the entry must stay finite near -1
    H2 = catalog_get("H2")
    z = np.array([[0.1, -1.0 + 1e-9], [0.1, -1.0 + 1e-12j]])
    vals = H2.evaluator(z)
    assert np.all(np.isfinite(vals))
    F7 = catalog_get("F7", dim=3)
    z = np.array([[0.1, 0.2, 0.2], [0.1, 0.2, 0.2 + 1e-13]])
    vals = F7.evaluator(z)
    assert np.all(np.isfinite(vals))
    # the two nearly-equal-arguments rows agree to high accuracy
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-9


def test_extension_fills_with_identity_or_dilation():
    F4 = catalog_get("F4", dim=4)
    H4 = catalog_get("H4", dim=4)
    z = np.array([[0.1, 0.2, 0.3j, -0.4]])
    assert F4.evaluator(z)[0, 2] == 0.3j
    assert H4.evaluator(z)[0, 3] == 0.4
    assert F4.jet.coefficient(2, (0, 0, 1, 0)) == 1.0
    assert H4.jet.coefficient(3, (0, 0, 0, 1)) == -1.0


def test_lookup_validation():
    with pytest.raises(DomainError):
        catalog_get("F9")
    with pytest.raises(DomainError):
        catalog_get("F6", dim=2)
    with pytest.raises(DomainError):
        catalog_get("F1", degree=1)
    assert minimal_dimension("h7") == 3
    with pytest.raises(DomainError):
        minimal_dimension("Q1")


def test_catalog_generator_role_check():
    with pytest.raises(DomainError):
        catalog_generator("F1")
    g = catalog_generator("H5")
    assert g.trusted
    assert g.provenance["name"] == "H5"


def test_lookup_is_cached():
    assert catalog_get("F3") is catalog_get("F3")
    assert catalog_generator("H1") is catalog_generator("H1")


def test_margin_dependency_sets():
    expected = {
        "H1": ({0}, set()),
        "H2": ({1}, set()),
        "H3": ({1}, {1}),
        "H4": ({0, 1}, set()),
        "H5": ({0, 1}, {1}),
        "H6": ({0, 1, 2}, set(), set()),
        "H7": ({0, 1, 2}, {1}, {2}),
    }
    for name, deps in expected.items():
        g = catalog_generator(name)
        assert tuple(set(d) for d in g.margin_deps) == deps
