import json

import numpy as np
import pytest
from hypothesis import given

from kakeya.sticky import (
    EdgeId,
    EdgeLabeling,
    StickyMap,
    apply,
    enumerate_all_labelings,
    is_cantor,
    is_sticky,
    ones_to_zeros_map,
    labeling_from_map,
    sample_edge_labels,
)
from kakeya.tree import ROOT, BudgetExceeded, TernaryString, enumerate_level, prefix

from strategies import sticky_maps

S = TernaryString.parse


def labeling(n, mapping):
    return EdgeLabeling.from_mapping(n, {EdgeId(S(p), d): v for (p, d), v in mapping.items()})


def test_sample_shapes():
    assert sample_edge_labels(1, 0).flat().shape == (3,)
    lab = sample_edge_labels(2, 0)
    assert lab.flat().shape == (12,) and set(lab.flat()) <= {0, 2}


def test_sample_deterministic_and_seed_sensitive():
    assert sample_edge_labels(4, 11) == sample_edge_labels(4, 11)
    assert sample_edge_labels(4, 11) != sample_edge_labels(4, 12)


def test_sample_frequency():
    # each fixed edge is labelled 2 with frequency 1/2 +- 0.02 over 10^4 seeds
    counts = np.zeros(12)
    for seed in range(10_000):
        counts += sample_edge_labels(2, seed).flat() == 2
    assert np.all(np.abs(counts / 10_000 - 0.5) <= 0.02)


def test_apply_examples():
    sigma = StickyMap(labeling(1, {(".", 0): 2, (".", 1): 0, (".", 2): 2}))
    assert apply(sigma, S(".1")) == S(".0")
    assert apply(sigma, S(".0")) == S(".2")
    with pytest.raises(ValueError):
        apply(sigma, S(".01"))


def test_apply_first_digit_is_root_edge():
    for seed in range(20):
        sigma = StickyMap(sample_edge_labels(2, seed))
        first = sigma.labeling.label(EdgeId(ROOT, 0))
        assert all(apply(sigma, S(s)).digits[0] == first for s in (".00", ".01", ".02"))


def test_is_sticky_examples():
    assert is_sticky(StickyMap(sample_edge_labels(3, 5)), 3)
    f = {s: S(".00") for s in enumerate_level(2)}
    f[S(".01")] = S(".20")
    assert not is_sticky(f, 2)
    cantor1 = [S(".0"), S(".2")]
    for a in cantor1:
        for b in cantor1:
            for c in cantor1:
                assert is_sticky({S(".0"): a, S(".1"): b, S(".2"): c}, 1)


def test_ones_to_zeros_map():
    k1 = ones_to_zeros_map(1)
    assert [str(apply(k1, S(s))) for s in (".0", ".1", ".2")] == [".0", ".0", ".2"]
    assert apply(ones_to_zeros_map(2), S(".21")) == S(".20")
    assert all(is_sticky(ones_to_zeros_map(n), n) for n in range(1, 5))
    assert ones_to_zeros_map(3).seed is None


def test_enumerate_all_labelings():
    one = enumerate_all_labelings(1)
    assert len(one) == 8
    two = enumerate_all_labelings(2)
    assert len(two) == 4096 == len(set(two))


def test_enumerate_budget(monkeypatch):
    monkeypatch.setenv("KAKEYA_BUDGET", "1000")
    with pytest.raises(BudgetExceeded):
        enumerate_all_labelings(2)


def test_all_n1_labelings_give_all_sticky_maps():
    maps = {tuple(apply(StickyMap(lab), s) for s in enumerate_level(1)) for lab in enumerate_all_labelings(1)}
    assert len(maps) == 8


def test_exhaustive_stickiness_n2():
    for lab in enumerate_all_labelings(2)[::16]:
        assert is_sticky(StickyMap(lab), 2)


def test_json_round_trip():
    lab = sample_edge_labels(3, 42)
    text = lab.to_json()
    back = EdgeLabeling.from_json(text)
    assert back == lab and back.seed == 42 and back.to_json() == text
    payload = json.loads(text)
    assert set(payload) == {"n", "seed", "labels"} and len(payload["labels"]) == 39


def test_rejects_bad_labels():
    with pytest.raises(ValueError):
        EdgeLabeling.from_flat(1, [0, 1, 2])
    with pytest.raises(ValueError):
        EdgeLabeling.from_json('{"n": 1, "labels": "012"}')


@given(sticky_maps(max_n=4))
def test_apply_is_sticky_and_cantor(sigma):
    images = sigma.as_dict()
    assert all(is_cantor(c) and c.level == sigma.n for c in images.values())
    assert is_sticky(images, sigma.n)


@given(sticky_maps(max_n=4))
def test_labels_round_trip_through_map(sigma):
    assert labeling_from_map(sigma.as_dict(), sigma.n) == sigma.labeling


@given(sticky_maps(max_n=4))
def test_stickiness_by_prefix(sigma):
    for s in enumerate_level(sigma.n)[::7]:
        for j in range(sigma.n + 1):
            t = prefix(s, j)
            assert prefix(apply(sigma, s), j) == prefix(apply(sigma, TernaryString(t.digits + (0,) * (sigma.n - j))), j)
