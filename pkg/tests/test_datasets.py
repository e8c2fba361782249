import numpy as np

from clfbench.data import load_dataset
from clfbench.datasets import (
    hill_valley_like,
    ringnorm,
    twonorm,
    vehicle_like,
    waveform,
    write_arff,
    write_desk_suite,
)


def test_generators_deterministic():
    for gen in (ringnorm, twonorm, waveform, vehicle_like, hill_valley_like):
        a = gen(seed=3)
        b = gen(seed=3)
        assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
        c = gen(seed=4)
        assert not np.array_equal(a.X, c.X)


def test_generator_shapes():
    assert vehicle_like().X.shape == (846, 18)
    assert vehicle_like().schema.num_classes == 4
    assert hill_valley_like().X.shape == (606, 100)
    assert ringnorm().X.shape == (400, 20)
    assert waveform().X.shape == (400, 21)


def test_class_balance_roughly_even():
    counts = vehicle_like(seed=1).class_counts()
    assert counts.min() >= 200
    hv = hill_valley_like(seed=1).class_counts()
    assert hv.min() >= 250


def test_arff_round_trip(tmp_path):
    d = ringnorm(n=30, seed=5)
    path = tmp_path / "ring.arff"
    write_arff(d, path)
    back = load_dataset(path)
    assert back.schema.class_values == d.schema.class_values
    assert np.array_equal(back.y, d.y)
    assert np.array_equal(back.X, d.X)  # repr round-trips floats exactly


def test_write_desk_suite(tmp_path):
    written = write_desk_suite(tmp_path, seed=2)
    assert len(written) == 5
    for path in written:
        d = load_dataset(path)
        assert d.n_rows > 0 and d.schema.num_classes >= 2
