import numpy as np
from hypothesis import given, strategies as st

from src.rng import CounterRng, Purpose


@given(st.integers(0, 2**32), st.integers(0, 10_000), st.integers(0, 500))
def test_single_draw_matches_block(seed, t, i):
    rng = CounterRng(seed)
    block = rng.block(Purpose.OUTCOME, t, t + 1, i + 1, replication=3)
    assert float(rng.uniforms(Purpose.OUTCOME, t, i, replication=3)) == block[0, i]


def test_uniforms_in_unit_interval_and_roughly_uniform():
    u = CounterRng(1).block(Purpose.TREATMENT, 0, 200, 500)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / u.size)


def test_streams_are_separated():
    rng = CounterRng(7)
    base = rng.block(Purpose.TREATMENT, 0, 10, 10)
    assert not np.array_equal(base, rng.block(Purpose.OUTCOME, 0, 10, 10))
    assert not np.array_equal(base, rng.block(Purpose.TREATMENT, 0, 10, 10, replication=1))
    assert not np.array_equal(base, rng.block(Purpose.TREATMENT, 0, 10, 10, lane=1))
    assert not np.array_equal(base, CounterRng(8).block(Purpose.TREATMENT, 0, 10, 10))


def test_blocks_are_order_independent():
    rng = CounterRng(5)
    whole = rng.block(Purpose.INIT, 0, 50, 4)
    parts = np.vstack([rng.block(Purpose.INIT, 30, 50, 4), rng.block(Purpose.INIT, 0, 30, 4)])
    assert np.array_equal(whole, np.vstack([parts[20:], parts[:20]]))
