import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecplast import (
    INFINITE,
    DomainError,
    EmptyDescriptorError,
    SchemaError,
    canonicalize,
    enumerate_points,
    parse_descriptor,
    serialize_descriptor,
    spectral_bounds,
)
from conftest import atom, cantor, density, descriptor, random_descriptor, seq


class TestParse:
    def test_single_infinite_atom(self):
        d = parse_descriptor({"atoms": [{"value": 1, "multiplicity": "inf"}]})
        assert len(d.atoms) == 1
        assert d.atoms[0].value == 1.0
        assert d.atoms[0].is_infinite
        assert not d.sequences and not d.continuous

    def test_sequence_terms(self):
        d = parse_descriptor(
            {
                "sequences": [
                    {"limit": 1, "direction": "dec", "offset": 1, "ratio": 0.5, "multiplicity": 1}
                ]
            }
        )
        assert d.sequences[0].term(1) == 1.5
        assert d.sequences[0].term(2) == 1.25

    def test_negative_value_rejected(self):
        with pytest.raises(DomainError):
            parse_descriptor({"atoms": [{"value": -1, "multiplicity": 1}]})

    def test_bad_ratio_rejected(self):
        with pytest.raises(DomainError):
            parse_descriptor(
                {
                    "sequences": [
                        {"limit": 1, "direction": "dec", "offset": 1, "ratio": 1.5, "multiplicity": 1}
                    ]
                }
            )

    def test_unknown_field_is_schema_error(self):
        with pytest.raises(SchemaError):
            parse_descriptor({"atoms": [{"value": 1, "multiplicity": 1, "extra": 0}]})

    def test_empty_descriptor_rejected(self):
        with pytest.raises(DomainError):
            parse_descriptor({})

    def test_negative_density_rejected(self):
        with pytest.raises(DomainError):
            parse_descriptor(
                {"continuous": [{"kind": "density", "support": [1, 2], "coeffs": [-1]}]}
            )

    def test_spectral_support_must_avoid_zero(self):
        with pytest.raises(DomainError):
            parse_descriptor(
                {"continuous": [{"kind": "density", "support": [0, 1], "coeffs": [1]}]}
            )


class TestCanonicalize:
    def test_multiplicities_add(self):
        d = descriptor(atoms=[atom(1, 2), atom(1, 3)])
        assert d.atoms == (atom(1, 5),)

    def test_infinite_absorbs(self):
        d = descriptor(atoms=[atom(1, 2), atom(1, INFINITE)])
        assert d.atoms == (atom(1, INFINITE),)

    def test_atoms_sorted(self):
        d = descriptor(atoms=[atom(2, 1), atom(1, 1)])
        assert d.atoms == (atom(1, 1), atom(2, 1))

    def test_idempotent_on_random_descriptors(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = random_descriptor(rng)
            if d.is_empty:
                continue
            assert canonicalize(d) == d


class TestBounds:
    def test_two_atoms(self):
        assert spectral_bounds(descriptor(atoms=[atom(1, INFINITE), atom(2, INFINITE)])) == (1, 2)

    def test_decreasing_sequence_unattained_limit(self):
        d = descriptor(sequences=[seq(1, "dec")])
        assert spectral_bounds(d) == (1.0, 1.5)

    def test_envelope_of_components(self):
        d = descriptor(atoms=[atom(3, 1)], continuous=[density(1, 2)])
        assert spectral_bounds(d) == (1.0, 3.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyDescriptorError):
            spectral_bounds(descriptor())

    def test_enumerated_points_stay_in_envelope(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            d = random_descriptor(rng, allow_continuous=False)
            if d.is_empty:
                continue
            lo, hi = spectral_bounds(d)
            for depth in (1, 3, 17):
                for value, _ in enumerate_points(d, depth):
                    assert lo <= value <= hi


class TestEnumerate:
    def test_infinite_replication_default(self):
        d = descriptor(atoms=[atom(1, INFINITE)])
        assert enumerate_points(d, 3) == [(1.0, 6)]

    def test_sequence_terms(self):
        d = descriptor(sequences=[seq(2, "inc")])
        assert enumerate_points(d, 3) == [(1.5, 1), (1.75, 1), (1.875, 1)]

    def test_overlay_merge(self):
        d = descriptor(atoms=[atom(1.5, 1)], sequences=[seq(2, "inc")])
        assert enumerate_points(d, 3) == [(1.5, 2), (1.75, 1), (1.875, 1)]


class TestSequenceTerms:
    def test_distance_to_limit_is_geometric(self):
        s = seq(2, "inc", offset=1.0, ratio=0.5)
        for j in range(1, 40):
            assert abs(s.term(j) - s.limit) == 1.0 * 0.5**j

    @given(
        limit=st.floats(1.0, 8.0),
        offset=st.floats(0.01, 0.4),
        ratio=st.floats(0.3, 0.9),
    )
    @settings(max_examples=50, deadline=None)
    def test_terms_strictly_monotone(self, limit, offset, ratio):
        # 12 terms keep the geometric increments above float resolution
        s = seq(limit, "dec", offset=offset, ratio=ratio)
        values = s.terms(12)
        assert (np.diff(values) < 0).all()
        assert abs(values[-1] - limit) <= offset * ratio**12 + 1e-15 * limit


class TestRoundTrip:
    def test_parse_serialize_identity(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d = random_descriptor(rng)
            if d.is_empty:
                continue
            assert parse_descriptor(serialize_descriptor(d)) == d

    def test_serialized_multiplicity_token(self):
        doc = serialize_descriptor(descriptor(atoms=[atom(1, INFINITE), atom(2, 3)]))
        assert doc["atoms"][0]["multiplicity"] == "inf"
        assert doc["atoms"][1]["multiplicity"] == 3

    def test_serialize_parts(self):
        doc = serialize_descriptor(descriptor(continuous=[cantor(1, 2, mass=0.5)]))
        assert doc["continuous"][0] == {"kind": "cantor", "support": [1.0, 2.0], "mass": 0.5}
