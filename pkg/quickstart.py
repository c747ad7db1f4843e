"""Quick start script to test the engine."""

import random

import numpy as np

from src.core.engine import ChemEngine
from src.core.parametrization import optimal_radix, predicted_cost
from src.models.bench_models import CacheParams
from src.models.tensor_models import QuantParams

# Debug scheme keeps this instant; pass scheme="paillier" for real keys
engine = ChemEngine(scheme="debug", rng=random.Random(0))
engine.generate_keys(64)
print(f"Scheme: {engine.scheme.scheme_id}  key fingerprint: {engine.public_key.fingerprint}")

cache = engine.build_cache(CacheParams(radix=2, bit_width=8, zero_pool_size=16))
print(f"\nCache: radix={cache.radix} entries={cache.entry_count} fingerprint={cache.fingerprint}")

image = np.array([[0, 12, 0], [255, 3, 0]], dtype=float)
encrypted = engine.encrypt_array(image, QuantParams.for_images())
restored = engine.decrypt_array(encrypted)
print(f"\nEncrypted {len(encrypted.ciphertexts)} pixels, digit joins: {engine.counter.digit_join}")
print(f"Round trip exact: {np.array_equal(restored, image)}")

print(f"\nPredicted worst-case additions for r=2, B=8: {predicted_cost(2, 255):.1f}")
print(f"Optimal radix for B=16 in [2, 64]: {optimal_radix(65535, (2, 64))}")

print("\n✓ Engine initialized successfully!")
print("\nNext steps:")
print("1. Run 'python tools/chem_bench.py verify' to check the invariants")
print("2. Run 'pytest tests/' to run unit tests")
print("3. Run 'python tools/chem_bench.py bench-encrypt --workload mnist' to benchmark")
