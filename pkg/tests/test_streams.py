"""Stream identity, sampler correctness, and the CRN synchronization contract."""

import math

import numpy as np
import pytest

from crossdock_sim.streams import (DEFAULT_ROOT_SEED, Discrete, DistributionError,
                                   Exponential, SOURCES, Stream, StreamId, StreamSet,
                                   Triangular, substream)


class _FakeGen:
    """Feeds preset uniforms into a Stream."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, n):
        out, self.values = self.values[:n], self.values[n:]
        return np.asarray(out + [0.5] * (n - len(out)))


def _fed(*values) -> Stream:
    return Stream(_FakeGen(values))


# -- identity and purity ---------------------------------------------------

def test_substream_is_pure():
    a = substream(42, StreamId("arrivals", 3))
    b = substream(42, StreamId("arrivals", 3))
    assert [a.uniform() for _ in range(50)] == [b.uniform() for _ in range(50)]


def test_substreams_differ_across_sources_replications_lanes():
    base = [substream(7, StreamId("arrivals", 0)).uniform() for _ in range(1)]
    for stream_id, lane in [(StreamId("buffer", 0), 0), (StreamId("arrivals", 1), 0),
                            (StreamId("arrivals", 0), 1)]:
        other = substream(7, stream_id, lane)
        assert [other.uniform()] != base


def test_substream_differs_across_root_seeds():
    a = substream(1, StreamId("manual-pick", 0))
    b = substream(2, StreamId("manual-pick", 0))
    assert [a.uniform() for _ in range(8)] != [b.uniform() for _ in range(8)]


def test_consuming_one_stream_never_moves_another():
    fresh = substream(99, StreamId("manual-pick", 0))
    expected = [fresh.uniform() for _ in range(10)]

    streams = StreamSet.dedicated(99, 0)
    for _ in range(1000):
        streams.buffer.uniform()
    assert [streams.manual_pick.uniform() for _ in range(10)] == expected


def test_buffered_draws_match_scalar_numpy_sequence():
    # The chunked buffer must not change any value.
    seq = np.random.SeedSequence(5, spawn_key=(0, 0, 0))
    raw = np.random.Generator(np.random.PCG64(seq))
    stream = substream(5, StreamId("arrivals", 0))
    for _ in range(5000):
        assert stream.uniform() == raw.random()


def test_stream_id_validation():
    with pytest.raises(ValueError):
        StreamId("not-a-source", 0)
    with pytest.raises(ValueError):
        StreamId("arrivals", -1)


def test_sources_are_the_model_randomness_sources():
    assert SOURCES == ("arrivals", "order-type-mix", "manual-pick",
                       "auto-dispense", "buffer", "failure")


# -- policies --------------------------------------------------------------

def test_shared_policy_uses_one_stream_for_everything():
    streams = StreamSet.shared(11, 0)
    assert (streams.arrivals is streams.order_type is streams.routing
            is streams.manual_pick is streams.buffer is streams.failure)


def test_dedicated_policy_uses_distinct_streams():
    streams = StreamSet.dedicated(11, 0)
    named = [streams.arrivals, streams.order_type, streams.routing,
             streams.manual_pick, streams.auto_dispense, streams.buffer,
             streams.failure]
    assert len({id(s) for s in named}) == len(named)


def test_shared_extra_draw_desynchronizes_later_draws():
    # The naive single-stream policy: one extra draw shifts everything after.
    plain = StreamSet.shared(3, 0)
    shifted = StreamSet.shared(3, 0)
    plain.arrivals.uniform()
    shifted.arrivals.uniform()
    shifted.buffer.uniform()  # the extra draw (a buffer delay)
    assert plain.arrivals.uniform() != shifted.arrivals.uniform()


def test_dedicated_extra_draw_leaves_other_sources_in_step():
    plain = StreamSet.dedicated(3, 0)
    shifted = StreamSet.dedicated(3, 0)
    plain.arrivals.uniform()
    shifted.arrivals.uniform()
    shifted.buffer.uniform()
    assert plain.arrivals.uniform() == shifted.arrivals.uniform()
    assert plain.manual_pick.uniform() == shifted.manual_pick.uniform()


def test_for_policy_dispatch():
    assert StreamSet.for_policy("shared", 1, 0).policy == "shared"
    assert StreamSet.for_policy("dedicated", 1, 0).policy == "dedicated"
    with pytest.raises(ValueError):
        StreamSet.for_policy("mystery", 1, 0)


def test_default_root_seed_value():
    assert DEFAULT_ROOT_SEED == 12345


# -- samplers: one uniform per sample, exact inverse CDF -------------------

def test_exponential_inverts_its_cdf():
    mean = 2.5
    for u in (0.0, 0.1, 0.5, 0.9, 0.999):
        x = Exponential(mean).sample(_fed(u))
        assert 1.0 - math.exp(-x / mean) == pytest.approx(u, abs=1e-12)


def test_triangular_inverts_its_cdf():
    low, mode, high = 2.0, 3.5, 5.0
    span = high - low

    def cdf(x):
        if x < mode:
            return (x - low) ** 2 / (span * (mode - low))
        return 1.0 - (high - x) ** 2 / (span * (high - mode))

    for u in (0.0, 0.2, 0.5, 0.8, 0.99):
        x = Triangular(low, mode, high).sample(_fed(u))
        assert low <= x <= high
        assert cdf(x) == pytest.approx(u, abs=1e-12)


def test_discrete_picks_by_cumulative_scan():
    dist = Discrete((0.2, 0.3, 0.5))
    assert dist.sample(_fed(0.0)) == 0
    assert dist.sample(_fed(0.19)) == 0
    assert dist.sample(_fed(0.2)) == 1
    assert dist.sample(_fed(0.499)) == 1
    assert dist.sample(_fed(0.5)) == 2
    assert dist.sample(_fed(0.999)) == 2


def test_each_sample_consumes_exactly_one_uniform():
    class Counting(Stream):
        __slots__ = ("count",)

        def __init__(self, generator):
            super().__init__(generator)
            self.count = 0

        def uniform(self):
            self.count += 1
            return super().uniform()

    stream = Counting(np.random.Generator(np.random.PCG64(0)))
    Exponential(1.0).sample(stream)
    Triangular(0.0, 1.0, 2.0).sample(stream)
    Discrete((0.25, 0.75)).sample(stream)
    assert stream.count == 3


def test_zero_weight_outcomes_are_unreachable():
    dist = Discrete((0.25, 0.50, 0.25, 0.0, 0.0))
    stream = substream(8, StreamId("order-type-mix", 0))
    draws = {dist.sample(stream) for _ in range(20_000)}
    assert draws == {0, 1, 2}


def test_sampler_moments_match_theory():
    stream = substream(21, StreamId("manual-pick", 0))
    tri = Triangular(2.0, 3.5, 5.0)
    xs = [tri.sample(stream) for _ in range(40_000)]
    assert sum(xs) / len(xs) == pytest.approx(tri.theoretical_mean(), rel=0.01)

    exp = Exponential(2.0)
    ys = [exp.sample(stream) for _ in range(40_000)]
    assert sum(ys) / len(ys) == pytest.approx(2.0, rel=0.02)


def test_ks_goodness_of_fit_sanity():
    scipy_stats = pytest.importorskip("scipy.stats")
    stream = substream(77, StreamId("auto-dispense", 0))
    exp = Exponential(1.5)
    xs = [exp.sample(stream) for _ in range(20_000)]
    assert scipy_stats.kstest(xs, lambda x: 1.0 - np.exp(-x / 1.5)).pvalue > 0.01


# -- distribution parameter validation ------------------------------------

def test_distribution_validation():
    with pytest.raises(DistributionError):
        Exponential(0.0)
    with pytest.raises(DistributionError):
        Exponential(-1.0)
    with pytest.raises(DistributionError):
        Triangular(5.0, 3.0, 4.0)
    with pytest.raises(DistributionError):
        Triangular(2.0, 2.0, 2.0)
    with pytest.raises(DistributionError):
        Discrete((0.5, 0.6))
    with pytest.raises(DistributionError):
        Discrete((1.1, -0.1))


def test_infinite_mean_is_the_disabled_sentinel():
    assert Exponential(math.inf).sample(_fed(0.3)) == math.inf


def test_triangular_scaled():
    assert Triangular(1.0, 2.0, 4.0).scaled(2.0) == Triangular(2.0, 4.0, 8.0)


def test_as_dict_round_trip_values():
    assert Exponential(1.5).as_dict() == {"kind": "exponential", "mean": 1.5}
    assert Triangular(1.0, 2.0, 3.0).as_dict() == {
        "kind": "triangular", "min": 1.0, "mode": 2.0, "max": 3.0}
    assert Discrete((0.5, 0.5)).as_dict() == {"kind": "discrete", "weights": [0.5, 0.5]}
