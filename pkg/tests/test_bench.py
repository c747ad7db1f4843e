"""Tests for workloads, the timing harness, verification suites and persistence."""

import random

import numpy as np
import pytest
from pydantic import ValidationError

from src.bench.harness import (
    bench_cache_build,
    bench_encrypt,
    cache_growth_is_linear,
    fl_round,
)
from src.bench.verify import (
    homomorphism_suite,
    immutability_suite,
    oracle_suite,
    parametrization_suite,
    randomness_suite,
    roundtrip_suite,
    verify,
)
from src.bench.workloads import MODEL_PRESETS, WORKLOAD_PRESETS, model_size, synth_tensor, workload_spec
from src.core.engine import ChemEngine
from src.core.radix_cache import addition_count, build_cache
from src.errors import CapacityError, ConfigurationError, KeyContextError, SerializationError
from src.models.bench_models import (
    BenchReport,
    CacheBuildPoint,
    CacheParams,
    FlRoundSpec,
    TimingStats,
    WorkloadSpec,
)
from src.models.tensor_models import QuantParams, TensorPlain
from src.schemes import PaillierScheme
from src.storage import ArtifactStore

SMALL_CACHE = CacheParams(radix=2, bit_width=8, zero_pool_size=8)


class TestWorkloads:
    """Tests for presets and synthetic tensors."""

    def test_presets(self):
        assert WORKLOAD_PRESETS["mnist"].shape == [28, 28]
        assert WORKLOAD_PRESETS["mnist"].nonempty_rate == pytest.approx(0.1790)
        assert WORKLOAD_PRESETS["stanford_cars"].shape == [360, 640]
        assert WORKLOAD_PRESETS["cmu_arctic"].nonempty_rate == pytest.approx(0.9972)
        assert MODEL_PRESETS == {"cnn": 5280, "mlp": 50890}

    def test_overrides(self):
        spec = workload_spec("stanford_cars", shape=[28, 28], rate=0.5, sample_count=2, seed=3)
        assert spec.shape == [28, 28]
        assert spec.nonempty_rate == 0.5
        assert spec.sample_count == 2
        assert WORKLOAD_PRESETS["stanford_cars"].shape == [360, 640]

    def test_unknown_names(self):
        with pytest.raises(ConfigurationError):
            workload_spec("cifar")
        with pytest.raises(ConfigurationError):
            model_size("resnet", 100)
        assert model_size(None, 100) == 100
        assert model_size("cnn", 100) == 5280

    def test_synth_tensor_sparsity(self):
        spec = WorkloadSpec(name="t", shape=[100, 100], nonempty_rate=0.25, bit_width=8)
        t = synth_tensor(spec, np.random.default_rng(0))
        assert t.shape == [100, 100]
        assert 0.22 <= t.nonempty_rate <= 0.28
        assert max(t.values) <= 255

    def test_synth_tensor_extremes(self):
        rng = np.random.default_rng(1)
        empty = synth_tensor(WorkloadSpec(name="e", shape=[50], nonempty_rate=0.0), rng)
        full = synth_tensor(WorkloadSpec(name="f", shape=[50], nonempty_rate=1.0), rng)
        assert empty.nonzero_count == 0
        assert full.nonzero_count == 50

    def test_synth_tensor_reproducible(self):
        spec = WORKLOAD_PRESETS["mnist"]
        a = synth_tensor(spec, np.random.default_rng(5))
        b = synth_tensor(spec, np.random.default_rng(5))
        assert a.values == b.values


class TestModels:
    """Tests for report and spec models."""

    def test_participants(self):
        assert FlRoundSpec().participants == 3
        assert FlRoundSpec(client_count=30, fraction=0.5).participants == 15
        with pytest.raises(ValidationError):
            FlRoundSpec(client_count=3, fraction=0.1)

    def test_timing_stats(self):
        stats = TimingStats(samples=[1.0, 2.0, 3.0])
        assert stats.mean == 2.0
        assert stats.std == pytest.approx(1.0)
        assert TimingStats(samples=[4.0]).std == 0.0

    def test_reduction_percent(self):
        report = BenchReport(
            run="bench-encrypt",
            scheme="debug",
            key_bits=64,
            radix=2,
            bit_width=8,
            zero_pool_size=8,
            repetitions=3,
            direct_encrypt=TimingStats(samples=[2.0, 2.0, 2.0]),
            cached_encrypt=TimingStats(samples=[0.5, 0.5, 0.5]),
        )
        assert report.reduction_percent == pytest.approx(75.0)
        assert len(report.to_flat_rows()) == 6

    def test_cache_params_floor(self):
        with pytest.raises(ValidationError):
            CacheParams(zero_pool_size=4, min_zero_inclusions=5)

    def test_linear_growth_check(self):
        def point(bits, entries, seconds):
            return CacheBuildPoint(bit_width=bits, entries=entries, timing=TimingStats(samples=[seconds]))

        linear = [point(8, 72, 0.72), point(16, 80, 0.80), point(32, 96, 0.96)]
        assert cache_growth_is_linear(linear)
        skewed = [point(8, 72, 0.072), point(16, 80, 0.80)]
        assert not cache_growth_is_linear(skewed)


class TestHarness:
    """Tests for the timing harness, using the debug scheme."""

    def test_bench_encrypt(self):
        spec = WorkloadSpec(name="tiny", shape=[8, 8], nonempty_rate=0.5, sample_count=2)
        report = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", seed=1)
        assert report.run == "bench-encrypt"
        assert report.element_count == 128
        assert len(report.direct_encrypt.samples) == 3
        assert len(report.cached_encrypt.samples) == 3
        assert report.cache_build is not None
        assert report.key_bits == 64
        assert report.counters.randomizer > 0

    def test_counters_reproducible_with_seed(self):
        spec = WorkloadSpec(name="tiny", shape=[16], nonempty_rate=0.5)
        a = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", seed=9)
        b = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", seed=9)
        assert a.counters == b.counters

    def test_spec_seed_used_without_seed_argument(self):
        spec = WorkloadSpec(name="tiny", shape=[16], nonempty_rate=0.5, seed=21)
        a = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug")
        b = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug")
        assert a.seed == b.seed == 21
        assert a.counters == b.counters
        assert a.metadata["cache_fingerprint"] == b.metadata["cache_fingerprint"]

    def test_digit_join_counter_matches_digit_sums(self):
        quant = QuantParams.for_images()
        tensors = [
            TensorPlain(shape=[4, 4], values=[0, 1, 2, 3, 0, 0, 255, 128, 7, 0, 0, 0, 64, 65, 0, 9], quant=quant),
            TensorPlain(shape=[4, 4], values=[0] * 16, quant=quant),
        ]
        spec = WorkloadSpec(name="fixed", shape=[4, 4], nonempty_rate=0.5, sample_count=2)
        report = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", seed=3, tensors=tensors)
        expected = sum(addition_count(v, 2, 7) for t in tensors for v in t.values if v)
        assert expected == 12
        assert report.counters.digit_join == expected

    def test_worker_pool_shared_across_repetitions(self):
        spec = WorkloadSpec(name="tiny", shape=[6, 6], nonempty_rate=0.5, sample_count=2, seed=4)
        serial = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug")
        parallel = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", workers=2)
        assert parallel.workers == 2
        assert len(parallel.cached_encrypt.samples) == 3
        assert parallel.counters.digit_join == serial.counters.digit_join

    def test_bench_encrypt_with_existing_cache(self, debug_keypair, rng):
        cache = build_cache(debug_keypair.public_key, 3, 8, 8, rng)
        spec = WorkloadSpec(name="tiny", shape=[10], nonempty_rate=1.0)
        report = bench_encrypt(spec, SMALL_CACHE, key_bits=2048, scheme="paillier", seed=2, cache=cache)
        assert report.cache_build is None
        assert report.scheme == "debug"
        assert report.radix == 3
        assert report.metadata["cache_fingerprint"] == cache.fingerprint

    def test_too_few_repetitions(self):
        spec = WorkloadSpec(name="tiny", shape=[4], nonempty_rate=0.5)
        with pytest.raises(ConfigurationError):
            bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", repetitions=2)

    def test_bench_cache_build(self):
        report = bench_cache_build(2, [16, 8], 8, key_bits=64, scheme="debug", seed=4)
        assert [p.bit_width for p in report.cache_build_sweep] == [8, 16]
        assert [p.entries for p in report.cache_build_sweep] == [16, 24]
        assert report.bit_width == 16
        assert report.metadata["linear_growth"] in ("true", "false")

    def test_fl_round_is_exact(self):
        spec = FlRoundSpec(client_count=30, fraction=0.1, model_size=20, seed=5)
        report = fl_round(spec, SMALL_CACHE, key_bits=64, scheme="debug")
        verdict = report.aggregation
        assert verdict.participants == 3
        assert verdict.exact and verdict.direct_exact
        assert verdict.mismatches == 0
        assert verdict.max_abs_error <= 3 * QuantParams.for_weights().scale / 2
        assert report.bit_width == 16
        assert report.element_count == 60

    def test_fl_round_with_workers(self):
        spec = FlRoundSpec(client_count=10, fraction=0.3, model_size=12, seed=8)
        report = fl_round(spec, SMALL_CACHE, key_bits=64, scheme="debug", workers=2)
        assert report.aggregation.exact and report.aggregation.direct_exact

    def test_fl_round_paillier(self):
        spec = FlRoundSpec(client_count=10, fraction=0.2, model_size=8, seed=6)
        report = fl_round(spec, SMALL_CACHE, key_bits=128, scheme="paillier")
        assert report.aggregation.exact
        assert report.aggregation.direct_exact

    def test_fl_round_wrap_refused(self):
        spec = FlRoundSpec(client_count=30, fraction=1.0, model_size=4, seed=1)
        with pytest.raises(CapacityError):
            fl_round(spec, SMALL_CACHE, key_bits=20, scheme="debug")


class TestVerifySuites:
    """Tests for the invariant suites."""

    @pytest.mark.parametrize(
        "suite",
        [roundtrip_suite, oracle_suite, randomness_suite, homomorphism_suite, immutability_suite],
    )
    def test_suite_passes(self, suite):
        checks = suite(random.Random(17), 128)
        assert checks
        assert all(check.passed for check in checks), [c for c in checks if not c.passed]

    def test_oracle_compares_cached_with_direct(self):
        checks = oracle_suite(random.Random(2), 64)
        compared = [c for c in checks if c.invariant.startswith("cached matches direct")]
        assert [c.invariant for c in compared] == [f"cached matches direct r={r} B=12" for r in (2, 3, 10)]
        assert all(c.passed for c in compared)
        assert all(c.detail == "0 of 4096 differ" for c in compared)

    def test_parametrization_suite_small_grid(self):
        checks = parametrization_suite(random.Random(0), 128, radixes=range(2, 6), exponents=range(1, 4))
        assert all(check.passed for check in checks)

    def test_verify_summary(self):
        summary = verify(["oracle", "immutability"], key_bits=128, seed=3)
        assert summary.status == "pass"
        assert summary.suites == ["oracle", "immutability"]
        assert not summary.failures

    def test_unknown_suite(self):
        with pytest.raises(ConfigurationError):
            verify(["speed"])

    @pytest.mark.slow
    def test_everything_at_acceptance_scale(self):
        assert verify(["all"], key_bits=1024, seed=1).status == "pass"


@pytest.fixture(scope="module")
def paillier_2048_keypair():
    return PaillierScheme().keygen(2048, random.Random(2048))


@pytest.mark.slow
class TestAcceptanceScale:
    """Directional performance checks under 2048-bit Paillier."""

    def test_sparse_images_encrypt_faster_than_dense(self, paillier_2048_keypair):
        params = CacheParams(radix=2, bit_width=8, zero_pool_size=64)
        cache = build_cache(paillier_2048_keypair.public_key, 2, 8, 64, random.Random(5))
        sparse = bench_encrypt(
            workload_spec("mnist", seed=1), params, key_bits=2048, repetitions=3, cache=cache
        )
        dense = bench_encrypt(
            workload_spec("stanford_cars", shape=[28, 28], seed=1), params, key_bits=2048, repetitions=3, cache=cache
        )
        assert sparse.reduction_percent >= 40.0
        assert dense.reduction_percent < sparse.reduction_percent
        assert dense.counters.digit_join > sparse.counters.digit_join

    def test_cache_build_overhead(self):
        report = bench_cache_build(2, [16, 32, 64, 128], 128, key_bits=2048, seed=6)
        sweep = report.cache_build_sweep
        assert [p.bit_width for p in sweep] == [16, 32, 64, 128]
        assert sweep[-1].entries == 128 + 128
        assert sweep[-1].timing.mean < 5.0
        assert report.metadata["linear_growth"] == "true"

    @pytest.mark.parametrize("fraction, participants", [(0.1, 3), (0.5, 15), (1.0, 30)])
    def test_aggregation_round(self, fraction, participants):
        spec = FlRoundSpec(client_count=30, fraction=fraction, model_size=20, seed=7)
        report = fl_round(spec, CacheParams(radix=2, bit_width=16, zero_pool_size=64), key_bits=2048)
        assert report.aggregation.participants == participants
        assert report.aggregation.exact and report.aggregation.direct_exact
        assert report.cached_encrypt.mean < report.direct_encrypt.mean


class TestArtifactStore:
    """Tests for JSON containers."""

    def test_keypair_and_cache_roundtrip(self, tmp_path, paillier_keypair, rng):
        store = ArtifactStore(tmp_path)
        cache = build_cache(paillier_keypair.public_key, 2, 8, 4, rng)
        store.write_keypair("keys.json", paillier_keypair)
        store.write_cache("cache.json", cache)

        keypair = store.read_keypair("keys.json")
        loaded = store.read_cache("cache.json")
        assert keypair.public_key == paillier_keypair.public_key
        assert loaded.fingerprint == cache.fingerprint
        assert loaded.radix_ctxts == cache.radix_ctxts

    def test_tampered_cache_rejected(self, tmp_path, debug_keypair, rng):
        store = ArtifactStore(tmp_path)
        cache = build_cache(debug_keypair.public_key, 2, 8, 4, rng)
        payload = store.cache_to_dict(cache)
        payload["zero_ctxts"][0]["nonce"] = "1"
        store.write_json("cache.json", payload)
        with pytest.raises(SerializationError):
            store.read_cache("cache.json")

    def test_wrong_format_rejected(self, tmp_path):
        store = ArtifactStore(tmp_path)
        store.write_json("x.json", {"format": "something-else/1"})
        with pytest.raises(SerializationError):
            store.read_keypair("x.json")
        with pytest.raises(SerializationError):
            store.read_cache(tmp_path / "missing.json")

    def test_tensor_containers(self, tmp_path, debug_keypair, rng):
        store = ArtifactStore(tmp_path)
        quant = QuantParams.for_images()
        t = TensorPlain(shape=[2, 2], values=[0, 1, 2, 255], quant=quant)
        store.write_tensor_plain("plain.json", t)
        assert store.read_tensor_plain("plain.json").model_dump() == t.model_dump()

        engine = ChemEngine("debug", rng=rng, store=store)
        engine.use_keys(debug_keypair)
        engine.build_cache(SMALL_CACHE)
        tc = engine.encrypt(t)
        store.write_tensor_cipher("cipher.json", tc, debug_keypair.public_key)
        loaded = store.read_tensor_cipher("cipher.json", debug_keypair.public_key)
        assert loaded == tc
        assert engine.decrypt(loaded).values == t.values

    def test_flat_tensor_import(self, tmp_path):
        store = ArtifactStore(tmp_path)
        quant = QuantParams.for_images()
        np.save(tmp_path / "ints.npy", np.array([[0, 4], [9, 255]], dtype=np.int64))
        (tmp_path / "floats.csv").write_text("0.4,1.6,300\n", encoding="utf-8")

        ints = store.load_flat_tensor("ints.npy", quant)
        assert ints.shape == [2, 2]
        assert ints.values == [0, 4, 9, 255]

        floats = store.load_flat_tensor("floats.csv", quant, shape=[3, 1])
        assert floats.shape == [3, 1]
        assert floats.values == [0, 2, 255]

        np.save(tmp_path / "big.npy", np.array([256], dtype=np.int64))
        with pytest.raises(SerializationError):
            store.load_flat_tensor("big.npy", quant)

    def test_report_json_and_csv(self, tmp_path):
        store = ArtifactStore(tmp_path)
        spec = WorkloadSpec(name="tiny", shape=[4], nonempty_rate=0.5)
        report = bench_encrypt(spec, SMALL_CACHE, key_bits=64, scheme="debug", seed=1)
        store.write_report("out/report.json", report)
        store.write_report_csv("out/report.csv", report)
        assert store.read_json("out/report.json")["run"] == "bench-encrypt"
        lines = (tmp_path / "out" / "report.csv").read_text(encoding="utf-8").strip().splitlines()
        assert len(lines) == 1 + 1 + 3 + 3


class TestChemEngine:
    """Tests for the engine facade."""

    def test_requires_keys_and_cache(self, image_tensor):
        engine = ChemEngine("debug", rng=random.Random(0))
        with pytest.raises(KeyContextError):
            engine.build_cache(SMALL_CACHE)
        engine.generate_keys(64)
        with pytest.raises(KeyContextError):
            engine.encrypt(image_tensor)

    def test_array_roundtrip_and_aggregate(self):
        engine = ChemEngine("paillier", rng=random.Random(2))
        engine.generate_keys(128)
        engine.build_cache(CacheParams(radix=2, bit_width=16, zero_pool_size=8), fan_in=2)
        quant = QuantParams.for_weights()
        a = np.array([0.5, -0.25, 0.0])
        b = np.array([-0.5, 0.75, 1.0])
        total = engine.aggregate([engine.encrypt_array(a, quant), engine.encrypt_array(b, quant)])
        np.testing.assert_allclose(engine.decrypt_array(total), a + b)
        assert engine.counter.randomizer > 0

    def test_direct_baseline(self, image_tensor):
        engine = ChemEngine("debug", rng=random.Random(3))
        engine.generate_keys(64)
        assert engine.decrypt(engine.encrypt_direct(image_tensor)).values == image_tensor.values

    def test_foreign_cache_rejected(self, tmp_path):
        store = ArtifactStore(tmp_path)
        first = ChemEngine("debug", rng=random.Random(4), store=store)
        first.generate_keys(64)
        first.build_cache(SMALL_CACHE)
        first.save_cache("cache.json")
        first.save_keys("keys.json")

        other = ChemEngine("debug", rng=random.Random(5), store=store)
        other.generate_keys(64)
        with pytest.raises(KeyContextError):
            other.load_cache("cache.json")

        reloaded = ChemEngine("debug", rng=random.Random(6), store=store)
        reloaded.load_keys("keys.json")
        assert reloaded.load_cache("cache.json").fingerprint == first.cache.fingerprint


@pytest.fixture
def image_tensor():
    return TensorPlain(shape=[2, 3], values=[0, 1, 0, 200, 255, 7], quant=QuantParams.for_images())
