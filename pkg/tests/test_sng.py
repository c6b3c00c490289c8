import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from mtjsng.device import MtjState
from mtjsng.energy import bit_period, expected_bit_energy
from mtjsng.errors import DomainError
from mtjsng.policy import Policy
from mtjsng.sng import (
    BitstreamRecord,
    SngConfig,
    generate_bit,
    generate_stream,
    pack_bits,
    read_dump,
    read_records,
    record_for,
    stream_statistics,
    substream,
    unpack_bits,
    write_dump,
    write_records,
)


def test_config_validation():
    with pytest.raises(DomainError):
        SngConfig(1.2, Policy.NORMAL, 10, 1)
    with pytest.raises(DomainError):
        SngConfig(0.5, Policy.NORMAL, 0, 1)
    with pytest.raises(DomainError):
        SngConfig(0.5, Policy.NORMAL, 10, 1, stream_id=-1)


def test_stream_invariants(params, ops):
    for pol in Policy:
        sn = generate_stream(SngConfig(0.3, pol, 5000, 11), ops, params)
        assert sn.bits.size == sn.energy_per_bit.size == 5000
        assert set(np.unique(sn.bits)) <= {0, 1}
        assert sn.total_time == 5000 * bit_period(pol, ops)
        assert math.fsum(sn.energy_per_bit) == pytest.approx(sn.total_energy, rel=1e-12)
        k = int(sn.bits.sum())
        assert sn.decoded_value == ((1 - k / 5000) if sn.inverted else k / 5000)


def test_reproducible(params, ops):
    cfg = SngConfig(0.37, Policy.SR_BMS, 20000, 99, stream_id=3)
    a, b = generate_stream(cfg, ops, params), generate_stream(cfg, ops, params)
    assert a.bits.tobytes() == b.bits.tobytes()
    assert a.energy_per_bit.tobytes() == b.energy_per_bit.tobytes()
    c = generate_stream(SngConfig(0.37, Policy.SR_BMS, 20000, 100, stream_id=3), ops, params)
    assert a.bits.tobytes() != c.bits.tobytes()


@pytest.mark.parametrize("policy", list(Policy))
def test_stream_equals_iterated_bits(params, ops, policy):
    cfg = SngConfig(0.35, policy, 400, 5, stream_id=2)
    sn = generate_stream(cfg, ops, params)
    from mtjsng.policy import plan_generation

    q, _ = plan_generation(cfg.p_target, policy)
    rng = substream(5, 2)
    state = MtjState.AP
    bits, energies, fired = [], [], 0
    for _ in range(cfg.n_bits):
        out = generate_bit(state, q, policy, rng, ops, params)
        bits.append(out.bit)
        energies.append(out.energy)
        fired += out.reset_fired
        state = out.state
    assert np.array_equal(sn.bits, bits)
    assert np.allclose(sn.energy_per_bit, energies, rtol=1e-15, atol=0)
    assert sn.resets_fired == fired


def test_generate_bit_degenerate(params, ops):
    rng = np.random.default_rng(0)
    for _ in range(50):
        out = generate_bit(MtjState.AP, 0.0, Policy.SMART_RESET, rng, ops, params)
        assert out.bit == 1 and not out.reset_fired
        assert out.state is MtjState.AP
    # q = 0 writes nothing; only the read is charged.
    assert out.energy == pytest.approx(0.01 * 2e-9 / (4310.3448 * (1 + params.tmr)), rel=1e-6)


def test_high_q_binomial(params, ops):
    n, q = 100_000, 0.99
    sn = generate_stream(SngConfig(1 - q, Policy.NORMAL, n, 3), ops, params)
    zeros = n - int(sn.bits.sum())
    assert abs(zeros / n - q) <= 4 * math.sqrt(q * (1 - q) / n)


def test_degenerate_targets(params, ops):
    for pol in Policy:
        sn = generate_stream(SngConfig(1.0, pol, 2000, 1), ops, params)
        assert sn.decoded_value == 1.0 and not sn.inverted
    sn = generate_stream(SngConfig(0.0, Policy.SR_BMS, 2000, 1), ops, params)
    assert sn.inverted and np.all(sn.bits == 1) and sn.decoded_value == 0.0
    st_ = stream_statistics(generate_stream(SngConfig(1.0, Policy.NORMAL, 100, 1), ops, params))
    assert st_.degenerate and st_.lag1_autocorrelation == 0.0 and st_.decoded_value == 1.0


def test_decoded_concentration(params, ops):
    for seed in range(3):
        sn = generate_stream(SngConfig(0.7, Policy.SR_BMS, 4096, seed), ops, params)
        assert abs(sn.decoded_value - 0.7) <= 4 * math.sqrt(0.21 / 4096)


def test_stream_statistics(params, ops):
    n = 100_000
    sn = generate_stream(SngConfig(0.5, Policy.SR_BMS, n, 8), ops, params)
    s = stream_statistics(sn)
    assert abs(s.lag1_autocorrelation) <= 4 / math.sqrt(n)
    assert abs(s.mean_energy - expected_bit_energy(0.5, Policy.SR_BMS, ops, params)) <= 3 * s.energy_sem


def test_reset_accounting(params, ops):
    n = 100_000
    sn = generate_stream(SngConfig(0.3, Policy.NORMAL, n, 4), ops, params)
    assert sn.resets_fired == n
    sn = generate_stream(SngConfig(0.3, Policy.SMART_RESET, n, 4), ops, params)
    q = 0.7
    assert abs(sn.resets_fired / n - q) <= 4 * math.sqrt(q * (1 - q) / n)


def test_substream_independence(params, ops):
    n = 100_000
    a = generate_stream(SngConfig(0.5, Policy.NORMAL, n, 42, stream_id=0), ops, params).bits
    b = generate_stream(SngConfig(0.5, Policy.NORMAL, n, 42, stream_id=1), ops, params).bits
    table = np.array([[np.sum((a == i) & (b == j)) for j in (0, 1)] for i in (0, 1)])
    _, pval, _, _ = stats.chi2_contingency(table, correction=False)
    assert pval > 1e-3


def test_normal_and_sr_bits_identically_distributed(params, ops):
    n = 100_000
    a = generate_stream(SngConfig(0.3, Policy.NORMAL, n, 1), ops, params).bits
    b = generate_stream(SngConfig(0.3, Policy.SMART_RESET, n, 2), ops, params).bits
    p1, p2 = a.mean(), b.mean()
    pooled = (a.sum() + b.sum()) / (2 * n)
    z = (p1 - p2) / math.sqrt(pooled * (1 - pooled) * 2 / n)
    assert abs(z) < 4


@settings(max_examples=50, deadline=None)
@given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=100))
def test_pack_round_trip(bits):
    arr = np.array(bits, dtype=np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(arr), arr.size), arr)


def test_pack_bit_order():
    assert pack_bits(np.array([1, 0, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)) == bytes([1, 1])


def test_dump_round_trip(tmp_path, params, ops):
    sns = [generate_stream(SngConfig(p, Policy.SR_BMS, 1001, 7, stream_id=i), ops, params) for i, p in enumerate((0.2, 0.7))]
    path = tmp_path / "bits.bin"
    write_dump(path, [record_for(s) for s in sns])
    recs = read_dump(path)
    assert len(recs) == 2
    for rec, sn in zip(recs, sns):
        assert np.array_equal(rec.bits, sn.bits)
        assert rec.header["inverted"] == sn.inverted
        assert rec.header["n_bits"] == 1001 and rec.header["policy"] == "srbms"


def test_dump_rejects_bad_input():
    buf = io.BytesIO()
    with pytest.raises(ValueError):
        write_records(buf, [BitstreamRecord({"n_bits": 3}, np.zeros(3, np.uint8))])
    with pytest.raises(ValueError):
        read_records(io.BytesIO(b"garbage!"))
