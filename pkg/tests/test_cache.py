"""Library packing, cache encoding, and snapshot round trips."""

from fractions import Fraction

import numpy as np
import pytest

from edgepir import cache, codes, gf


def example_cache():
    lib = cache.FileLibrary([[[1, 0, 0, 1, 1]], [[0, 1, 1, 0, 1]]], 5,
                            [0.5, 0.5])
    scheme = cache.CachingScheme(6, Fraction(6, 5),
                                 [Fraction(1), Fraction(1, 5)], q=2)
    return cache.EncodedCache(lib, scheme)


def test_library_validation():
    with pytest.raises(ValueError):
        cache.FileLibrary([[[1, 0]]], 2, [0.5, 0.5])  # popularity length
    with pytest.raises(ValueError):
        cache.FileLibrary([[[1, 0]], [[1, 1]]], 2, [0.3, 0.7])  # increasing
    with pytest.raises(ValueError):
        cache.FileLibrary([[[1, 0]], [[1, 1]]], 2, [0.6, 0.6])  # sum != 1
    with pytest.raises(ValueError):
        cache.FileLibrary([[[1, 2]], [[1, 1]]], 2, [0.5, 0.5])  # non-bit


def test_scheme_constraints():
    with pytest.raises(ValueError):
        cache.CachingScheme(4, 1, [Fraction(1), Fraction(1)])  # over budget
    with pytest.raises(ValueError):
        cache.CachingScheme(4, 2, [Fraction(1, 4), Fraction(1)])  # mu=1/N
    cache.CachingScheme(4, 2, [Fraction(1, 4), Fraction(1)],
                        allow_full_spread=True)
    with pytest.raises(ValueError):
        cache.CachingScheme(6, 2, [Fraction(1, 2), Fraction(1, 3)])  # 2 not| 3
    with pytest.raises(ValueError):
        cache.CachingScheme(4, 2, [Fraction(2, 3)])  # not 1/k


def test_pack_file_example_shapes():
    packed, field, pad = cache.pack_file([[1, 0, 0, 1, 1]], 1, 2, 5)
    assert field.order == 32 and pad == 0
    assert packed == [[0b10011]]
    packed, field, pad = cache.pack_file([[1, 0, 0, 1, 1]], 5, 2, 5)
    assert field.order == 2 and pad == 0
    assert packed == [[1, 0, 0, 1, 1]]


def test_pack_zero_bits():
    packed, field, _ = cache.pack_file([[0] * 6], 3, 2, 6)
    assert packed == [[0, 0, 0]]


def test_pack_unpack_roundtrip_with_padding():
    rng = np.random.default_rng(0)
    for k, q, L in [(3, 2, 7), (2, 4, 9), (1, 8, 10), (4, 2, 4)]:
        bits = [int(rng.integers(2)) for _ in range(L)]
        packed, field, pad = cache.pack_file([bits], k, q, L)
        assert cache.unpack_stripe(packed[0], field, L) == bits


def test_packing_params_divisibility():
    scheme = cache.CachingScheme(8, 3, [Fraction(1, 2), Fraction(1, 4)], q=2)
    dmax, deltas, pad = cache.packing_params(scheme, 11)
    assert deltas[0] % deltas[1] == 0 or dmax % deltas[0] == 0
    for d in deltas.values():
        assert dmax % d == 0
    # equal per-file packed size: delta_i * k_i constant
    sizes = {d * k for d, k in zip(deltas.values(), (2, 4))}
    assert len(sizes) == 1
    assert dmax * 2 >= 11  # covers L


def test_encoded_rows_are_codewords():
    enc = example_cache()
    for i in enc.scheme.cached_files():
        code = enc.codes[i]
        field = enc.fields[i]
        for row in enc.symbols[i]:
            # parity checks hold over the symbol field
            for hrow in code.H:
                acc = 0
                for h, s in zip(hrow, row):
                    acc = field.add(acc, field.mul(gf.embed(h, code.field, field), s))
                assert acc == 0


def test_example_layout():
    """SBS j stores the repeated GF(2^5) symbol and coordinate j of the
    parity-check codeword."""
    enc = example_cache()
    x1 = 0b10011
    assert enc.symbols[0][0] == [x1] * 6
    spc_word = enc.symbols[1][0]
    assert spc_word[:5] == [0, 1, 1, 0, 1]
    assert spc_word[5] == (0 + 1 + 1 + 0 + 1) % 2


def test_cache_column_example():
    enc = example_cache()
    col6 = enc.cache_column(5)
    assert col6 == [0b10011, gf.embed(1, gf.make_field(2), gf.make_field(2, 5))]
    with pytest.raises(ValueError):
        enc.cache_column(6)


def test_mbs_column_matches_sbs_cache():
    enc = example_cache()
    for j in range(6):
        assert enc.mbs_column(j) == enc.cache_column(j)


def test_empty_placement_empty_cache():
    lib = cache.FileLibrary([[[1, 0]], [[0, 1]]], 2, [0.5, 0.5])
    scheme = cache.CachingScheme(4, 0, [Fraction(0), Fraction(0)])
    enc = cache.EncodedCache(lib, scheme)
    assert enc.symbols == {}
    assert enc.cache_column(0) == []


def test_decode_any_k_columns():
    rng = np.random.default_rng(1)
    lib = cache.FileLibrary.random(3, 1, 6, [0.5, 0.3, 0.2], rng)
    scheme = cache.CachingScheme(7, 3, [Fraction(1), Fraction(1, 2),
                                        Fraction(1, 2)], q=8)
    enc = cache.EncodedCache(lib, scheme)
    for i in scheme.cached_files():
        k = scheme.k[i]
        coords = list(rng.choice(7, size=k, replace=False))
        syms = [[enc.symbols[i][a][c] for c in coords]
                for a in range(lib.beta)]
        assert enc.decode_file(i, coords, syms) == lib.files[i]


def test_storage_fraction_per_sbs():
    enc = example_cache()
    # file 0: k=1, each SBS stores the whole 5-bit symbol; file 1: k=5,
    # each SBS stores one bit = 1/5 of the stripe
    assert enc.deltas[0] == 5 and enc.deltas[1] == 1


def test_snapshot_roundtrip(tmp_path):
    enc = example_cache()
    path = tmp_path / "cache.epir"
    cache.save_snapshot(str(path), enc)
    loaded = cache.load_snapshot(str(path))
    assert loaded.library.files == enc.library.files
    assert loaded.symbols == enc.symbols
    assert loaded.scheme.mu == enc.scheme.mu
    assert loaded.delta_max == enc.delta_max
    # byte-identical on re-save
    path2 = tmp_path / "cache2.epir"
    cache.save_snapshot(str(path2), loaded)
    assert path.read_bytes() == path2.read_bytes()


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.epir"
    path.write_bytes(b"nope")
    with pytest.raises(ValueError):
        cache.load_snapshot(str(path))


def test_storage_code_fallbacks():
    scheme = cache.CachingScheme(6, 2, [Fraction(1), Fraction(1, 5)], q=2)
    assert scheme.storage_code(0).k == 1
    assert scheme.storage_code(1).k == 5
    bad = cache.CachingScheme(6, 2, [Fraction(1, 3)], q=2)
    with pytest.raises(ValueError):
        bad.storage_code(0)
    grs_scheme = cache.CachingScheme(6, 2, [Fraction(1, 3)], q=8)
    assert isinstance(grs_scheme.storage_code(0), codes.GrsCode)
