import math

import numpy as np
import pytest

from hardymap.errors import (
    BranchDomainError,
    InverseUnavailableError,
    OutsideDiskError,
    ParameterRangeError,
    UnknownMapError,
)
from hardymap.hypgeo import DiskAutomorphism
from hardymap.maps import catalog_get, parse_map_spec, precompose

ALL_SPECS = ["halfplane", "sector:0.5", "sector:1", "sector:2", "strip", "koebe"]


def sample_disk(rng, n, rmax):
    r = rmax * np.sqrt(rng.random(n))
    t = 2.0 * math.pi * rng.random(n)
    return r * np.exp(1j * t)


def test_catalog_point_values():
    hp = catalog_get("halfplane")
    assert hp(0.0) == 1.0 + 0j
    assert abs(catalog_get("sector", (2,))(0.5) - 9.0) < 1e-12
    kb = catalog_get("koebe")
    assert abs(kb(0.5) - 2.0) < 1e-12
    assert kb.deriv(0.0) == 1.0 + 0j
    assert catalog_get("strip")(0.0) == 0j
    assert abs(hp.inverse(3.0) - 0.5) < 1e-15


def test_base_values_and_known_hardy_numbers():
    assert catalog_get("halfplane").base_value == 1.0 + 0j
    assert catalog_get("strip").base_value == 0j
    assert catalog_get("koebe").base_value == 0j
    assert catalog_get("halfplane").known_hardy_number == 1.0
    assert catalog_get("sector", (0.5,)).known_hardy_number == 2.0
    assert catalog_get("koebe").known_hardy_number == 0.5
    assert math.isinf(catalog_get("strip").known_hardy_number)


def test_unknown_name_and_parameter_errors():
    with pytest.raises(UnknownMapError):
        catalog_get("annulus")
    with pytest.raises(ParameterRangeError):
        catalog_get("sector", (2.5,))
    with pytest.raises(ParameterRangeError):
        catalog_get("sector", (0.0,))
    with pytest.raises(ParameterRangeError):
        catalog_get("sector", ())
    with pytest.raises(ParameterRangeError):
        catalog_get("halfplane", (1.0,))


def test_parse_map_spec():
    assert parse_map_spec("sector:0.5").params == (0.5,)
    assert parse_map_spec("koebe").name == "koebe"
    assert parse_map_spec("sector:2").spec == "sector:2"
    with pytest.raises(ParameterRangeError):
        parse_map_spec("sector:x")
    with pytest.raises(UnknownMapError):
        parse_map_spec("blob:3")


def test_boundary_guard():
    hp = catalog_get("halfplane")
    with pytest.raises(OutsideDiskError):
        hp(1.0 - 1e-16)
    with pytest.raises(OutsideDiskError):
        hp.deriv(1.0 + 0j)
    with pytest.raises(OutsideDiskError):
        hp(np.array([0.1, 0.999999999999999999 + 0j]))


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_inverse_roundtrip(spec):
    m = parse_map_spec(spec)
    rng = np.random.default_rng(hash(spec) % 2**32)
    z = sample_disk(rng, 1500, rmax=0.999)
    w = m(z)
    assert np.all(m.contains(w))
    back = m.inverse(w)
    assert np.max(np.abs(back - z)) <= 1e-10


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_derivative_matches_finite_differences(spec):
    m = parse_map_spec(spec)
    rng = np.random.default_rng(42)
    z = sample_disk(rng, 400, rmax=0.9)
    h = 1e-5
    for step in (h, 1j * h):
        fd = (m(z + step) - m(z - step)) / (2.0 * step)
        rel = np.abs(fd - m.deriv(z)) / np.abs(m.deriv(z))
        assert np.max(rel) <= 1e-6


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_injectivity_on_random_samples(spec):
    m = parse_map_spec(spec)
    rng = np.random.default_rng(3)
    z = sample_disk(rng, 700, rmax=0.995)
    w = m(z)
    diff = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(diff, np.inf)
    assert diff.min() > 0.0


def test_sector_modulus_identity():
    hp = catalog_get("halfplane")
    rng = np.random.default_rng(9)
    z = sample_disk(rng, 2000, rmax=0.999)
    for beta in (0.5, 1.0, 2.0):
        sec = catalog_get("sector", (beta,))
        lhs = np.abs(sec(z))
        rhs = np.abs(hp(z)) ** beta
        assert np.max(np.abs(lhs - rhs) / rhs) <= 1e-12


def test_branch_domain_errors():
    with pytest.raises(BranchDomainError):
        catalog_get("halfplane").inverse(-1.0 + 0j)
    with pytest.raises(BranchDomainError):
        catalog_get("sector", (2,)).inverse(-5.0 + 0j)
    with pytest.raises(BranchDomainError):
        catalog_get("koebe").inverse(-0.3 + 0j)
    with pytest.raises(BranchDomainError):
        catalog_get("strip").inverse(1.0 + 2.0j)
    # membership probes, elementwise
    kb = catalog_get("koebe")
    assert kb.contains(0j)
    assert not kb.contains(-0.25 + 0j)
    assert kb.contains(-0.3 + 1e-9j)


def test_strip_image_is_a_height_pi_band():
    st = catalog_get("strip")
    rng = np.random.default_rng(12)
    z = sample_disk(rng, 4000, rmax=0.99999)
    w = st(z)
    assert np.max(np.abs(w.imag)) < math.pi / 2.0


def test_precompose_preserves_structure():
    hp = catalog_get("halfplane")
    aut = DiskAutomorphism(0.3 - 0.25j, 1.3)
    m = precompose(hp, aut)
    assert m.known_hardy_number == hp.known_hardy_number
    rng = np.random.default_rng(31)
    z = sample_disk(rng, 500, rmax=0.99)
    assert np.allclose(m(z), hp(aut(z)), rtol=1e-13, atol=0.0)
    back = m.inverse(m(z))
    assert np.max(np.abs(back - z)) <= 1e-10
    assert abs(m.base_value - hp(aut(0j))) < 1e-14


def test_precompose_without_inverse_stays_uninvertible():
    import dataclasses

    bare = dataclasses.replace(catalog_get("halfplane"), inverse_fn=None)
    m = precompose(bare, DiskAutomorphism(0.1 + 0.1j))
    with pytest.raises(InverseUnavailableError):
        m.inverse(2.0 + 0j)
