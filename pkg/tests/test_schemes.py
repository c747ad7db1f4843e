"""Tests for the additive encryption schemes."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from src.errors import (
    ConfigurationError,
    KeyContextError,
    KeyGenerationError,
    MalformedCiphertextError,
    PlaintextRangeError,
)
from src.schemes import (
    DebugCiphertext,
    DebugScheme,
    PaillierCiphertext,
    PaillierScheme,
    PlainInt,
    get_scheme,
    keypair_from_primes,
)

PAILLIER = PaillierScheme()
DEBUG = DebugScheme()


class TestPaillierKeys:
    """Tests for Paillier key generation."""

    def test_toy_key_parameters(self, tiny_paillier_keypair):
        """p=5, q=7 gives n=35, lambda=12, mu=3."""
        sk = tiny_paillier_keypair.secret_key
        assert tiny_paillier_keypair.public_key.modulus == 35
        assert tiny_paillier_keypair.public_key.generator == 36
        assert sk.lam == 12
        assert sk.mu == 3

    @pytest.mark.parametrize("key_bits", [16, 64, 128])
    def test_keygen_exact_bit_length(self, key_bits):
        keypair = PAILLIER.keygen(key_bits, random.Random(key_bits))
        assert int(keypair.public_key.modulus).bit_length() == key_bits
        assert keypair.key_bits == key_bits
        assert keypair.public_key.key_bits == key_bits

    def test_keygen_is_reproducible_with_seed(self):
        a = PAILLIER.keygen(64, random.Random(3))
        b = PAILLIER.keygen(64, random.Random(3))
        assert a.public_key == b.public_key

    @pytest.mark.slow
    def test_2048_bit_roundtrip(self):
        keypair = PAILLIER.keygen(2048, random.Random(2048))
        assert int(keypair.public_key.modulus).bit_length() == 2048
        c = PAILLIER.encrypt(keypair.public_key, 123456789, random.Random(1))
        assert PAILLIER.decrypt(keypair.secret_key, c).value == 123456789

    def test_keygen_rejects_tiny_keys(self):
        with pytest.raises(KeyGenerationError):
            PAILLIER.keygen(8, random.Random(0))

    @pytest.mark.parametrize("p, q", [(7, 7), (4, 7), (2, 7), (3, 7)])
    def test_invalid_primes_rejected(self, p, q):
        """Equal, composite, even, or gcd(pq, (p-1)(q-1)) != 1."""
        with pytest.raises(KeyGenerationError):
            keypair_from_primes(p, q)


class TestPaillierScheme:
    """Tests for Paillier encryption and homomorphic operations."""

    def test_roundtrip_every_plaintext_of_toy_key(self, tiny_paillier_keypair, rng):
        pk, sk = tiny_paillier_keypair.public_key, tiny_paillier_keypair.secret_key
        for m in range(35):
            assert PAILLIER.decrypt(sk, PAILLIER.encrypt(pk, m, rng)).value == m

    @pytest.mark.parametrize("m", [35, -1, 2.5, True, "3"])
    def test_out_of_range_plaintext(self, tiny_paillier_keypair, rng, m):
        with pytest.raises(PlaintextRangeError):
            PAILLIER.encrypt(tiny_paillier_keypair.public_key, m, rng)

    def test_accepts_plain_int(self, tiny_paillier_keypair, rng):
        pk, sk = tiny_paillier_keypair.public_key, tiny_paillier_keypair.secret_key
        c = PAILLIER.encrypt(pk, PlainInt(value=9, modulus=35), rng)
        assert PAILLIER.decrypt(sk, c).value == 9

    def test_plain_int_range_checked(self):
        with pytest.raises(PlaintextRangeError):
            PlainInt(value=35, modulus=35)

    def test_encryption_is_probabilistic(self, paillier_keypair, rng):
        pk = paillier_keypair.public_key
        assert PAILLIER.encrypt(pk, 5, rng) != PAILLIER.encrypt(pk, 5, rng)

    def test_random_plaintexts_roundtrip(self, paillier_keypair, rng):
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        n = int(pk.modulus)
        for _ in range(1000):
            m = rng.randrange(n)
            assert PAILLIER.decrypt(sk, PAILLIER.encrypt(pk, m, rng)).value == m

    def test_thousand_encryptions_of_one_value_differ(self, paillier_1024_keypair, rng):
        pk, sk = paillier_1024_keypair.public_key, paillier_1024_keypair.secret_key
        outputs = [PAILLIER.encrypt(pk, 7, rng) for _ in range(1000)]
        assert len({c.value for c in outputs}) == 1000
        assert PAILLIER.decrypt(sk, outputs[-1]).value == 7

    def test_full_range_sums_wrap_modulo_n(self, paillier_keypair, rng):
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        n = int(pk.modulus)
        wrapped = 0
        for _ in range(1000):
            a, b = rng.randrange(n), rng.randrange(n)
            total = PAILLIER.add(pk, PAILLIER.encrypt(pk, a, rng), PAILLIER.encrypt(pk, b, rng))
            assert PAILLIER.decrypt(sk, total).value == (a + b) % n
            wrapped += a + b >= n
        assert wrapped > 0

    @settings(max_examples=50, deadline=None)
    @given(a=st.integers(min_value=0, max_value=2**64), b=st.integers(min_value=0, max_value=2**64))
    def test_addition_is_homomorphic(self, paillier_keypair, a, b):
        rng = random.Random(a ^ b)
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        total = PAILLIER.add(pk, PAILLIER.encrypt(pk, a, rng), PAILLIER.encrypt(pk, b, rng))
        assert PAILLIER.decrypt(sk, total).value == a + b

    @settings(max_examples=25, deadline=None)
    @given(m=st.integers(min_value=0, max_value=2**32), k=st.integers(min_value=0, max_value=2**16))
    def test_scalar_mul(self, paillier_keypair, m, k):
        rng = random.Random(m)
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        c = PAILLIER.scalar_mul(pk, PAILLIER.encrypt(pk, m, rng), k)
        assert PAILLIER.decrypt(sk, c).value == m * k

    def test_repeated_addition_of_one(self, paillier_keypair, rng):
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        one = PAILLIER.encrypt(pk, 1, rng)
        acc = one
        for _ in range(9):
            acc = PAILLIER.add(pk, acc, one)
        assert PAILLIER.decrypt(sk, acc).value == 10

    def test_sum_wraps_modulo_n(self, tiny_paillier_keypair, rng):
        pk, sk = tiny_paillier_keypair.public_key, tiny_paillier_keypair.secret_key
        total = PAILLIER.add(pk, PAILLIER.encrypt(pk, 30, rng), PAILLIER.encrypt(pk, 10, rng))
        assert PAILLIER.decrypt(sk, total).value == 5

    def test_negative_scalar_rejected(self, paillier_keypair, rng):
        pk = paillier_keypair.public_key
        with pytest.raises(ValueError):
            PAILLIER.scalar_mul(pk, PAILLIER.encrypt(pk, 1, rng), -1)

    def test_out_of_range_ciphertext(self, tiny_paillier_keypair):
        pk, sk = tiny_paillier_keypair.public_key, tiny_paillier_keypair.secret_key
        bad = PaillierCiphertext(context=pk.fingerprint, value=35 * 35)
        with pytest.raises(MalformedCiphertextError):
            PAILLIER.decrypt(sk, bad)

    def test_foreign_ciphertext_type(self, paillier_keypair, debug_keypair, rng):
        c = DEBUG.encrypt(debug_keypair.public_key, 1, rng)
        with pytest.raises(MalformedCiphertextError):
            PAILLIER.decrypt(paillier_keypair.secret_key, c)

    def test_mixed_keys_rejected(self, paillier_keypair, toy_paillier_keypair, rng):
        pk = paillier_keypair.public_key
        c1 = PAILLIER.encrypt(pk, 1, rng)
        c2 = PAILLIER.encrypt(toy_paillier_keypair.public_key, 1, rng)
        with pytest.raises(KeyContextError):
            PAILLIER.add(pk, c1, c2)
        with pytest.raises(KeyContextError):
            PAILLIER.decrypt(toy_paillier_keypair.secret_key, c1)

    def test_serialization_preserves_decryption(self, paillier_keypair, rng):
        pk, sk = paillier_keypair.public_key, paillier_keypair.secret_key
        c = PAILLIER.encrypt(pk, 1234, rng)

        pk2 = PAILLIER.public_key_from_dict(PAILLIER.public_key_to_dict(pk))
        sk2 = PAILLIER.secret_key_from_dict(pk2, PAILLIER.secret_key_to_dict(sk))
        c2 = PAILLIER.ciphertext_from_dict(pk2, PAILLIER.ciphertext_to_dict(c))

        assert pk2 == pk
        assert PAILLIER.decrypt(sk2, c2).value == 1234
        assert all(isinstance(v, str) for v in PAILLIER.ciphertext_to_dict(c).values())


class TestDebugScheme:
    """Tests for the transparent debug scheme."""

    def test_not_secure(self):
        assert DebugScheme.secure is False
        assert PaillierScheme.secure is True

    def test_roundtrip_and_algebra(self, debug_keypair, rng):
        pk, sk = debug_keypair.public_key, debug_keypair.secret_key
        a, b = DEBUG.encrypt(pk, 40, rng), DEBUG.encrypt(pk, 2, rng)
        assert DEBUG.decrypt(sk, a).value == 40
        assert DEBUG.decrypt(sk, DEBUG.add(pk, a, b)).value == 42
        assert DEBUG.decrypt(sk, DEBUG.scalar_mul(pk, a, 3)).value == 120

    def test_sum_wraps_modulo_two_power(self, rng):
        keypair = DEBUG.keygen(4, rng)
        pk, sk = keypair.public_key, keypair.secret_key
        total = DEBUG.add(pk, DEBUG.encrypt(pk, 15, rng), DEBUG.encrypt(pk, 3, rng))
        assert DEBUG.decrypt(sk, total).value == 2
        assert pk.key_bits == 4

    def test_independent_keys_do_not_mix(self, rng):
        k1, k2 = DEBUG.keygen(32, rng), DEBUG.keygen(32, rng)
        assert k1.public_key.fingerprint != k2.public_key.fingerprint
        with pytest.raises(KeyContextError):
            DEBUG.decrypt(k2.secret_key, DEBUG.encrypt(k1.public_key, 1, rng))

    def test_nonce_out_of_range(self, debug_keypair):
        pk = debug_keypair.public_key
        bad = DebugCiphertext(context=pk.fingerprint, plain=1, nonce=-1)
        with pytest.raises(MalformedCiphertextError):
            DEBUG.decrypt(debug_keypair.secret_key, bad)

    def test_keygen_rejects_tiny_keys(self, rng):
        with pytest.raises(KeyGenerationError):
            DEBUG.keygen(1, rng)


class TestRegistry:
    """Tests for scheme lookup."""

    def test_lookup_by_id_and_key(self, debug_keypair, paillier_keypair):
        assert isinstance(get_scheme("paillier"), PaillierScheme)
        assert isinstance(get_scheme(debug_keypair), DebugScheme)
        assert isinstance(get_scheme(paillier_keypair.secret_key), PaillierScheme)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigurationError):
            get_scheme("rsa")
