"""File library, stripe/packet partitioning, and MDS-coded SBS caches.

A library holds F files of beta stripes, each stripe L bits.  A caching
scheme assigns each file a cached fraction mu_i in {0} or {1/k : k integer};
a file with mu_i = 1/k is split per stripe into k packets, each packet is
one symbol of GF(q^{delta_i}), and the k symbols are encoded with an
(N_sbs, k) MDS storage code so that SBS j stores coordinate j of every
stripe codeword.  The MBS keeps every file in plaintext and can synthesize
any coded coordinate on demand.

Bit packing is big-endian per packet: the packet's bits, most significant
first, form the integer encoding of the field element.  Stripes are padded
with zero bits up to a common packed length so that all delta_i divide
delta_max; the pad length is recorded and stripped on unpack.
"""

from __future__ import annotations

import json
import struct
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from . import codes, gf

MAGIC = b"EPIR"


class FileLibrary:
    """F files, each beta stripes of L bits, with a popularity vector."""

    def __init__(self, files: Sequence[Sequence[Sequence[int]]], L: int,
                 popularity: Sequence[float]):
        self.F = len(files)
        if self.F == 0:
            raise ValueError("library must contain at least one file")
        self.beta = len(files[0])
        self.L = L
        self.files = [[list(stripe) for stripe in f] for f in files]
        for f in self.files:
            if len(f) != self.beta or any(len(s) != L for s in f):
                raise ValueError("every file must be beta stripes of L bits")
            if any(b not in (0, 1) for s in f for b in s):
                raise ValueError("file contents must be bits")
        p = list(popularity)
        if len(p) != self.F:
            raise ValueError("popularity length must equal file count")
        if any(p[i] < p[i + 1] - 1e-12 for i in range(self.F - 1)):
            raise ValueError("popularity must be non-increasing")
        if abs(sum(p) - 1.0) > 1e-12:
            raise ValueError("popularity must sum to 1")
        self.popularity = p

    @classmethod
    def random(cls, F: int, beta: int, L: int, popularity: Sequence[float], rng):
        files = [[[int(rng.integers(2)) for _ in range(L)] for _ in range(beta)]
                 for _ in range(F)]
        return cls(files, L, popularity)


def _as_mu(value) -> Fraction:
    mu = Fraction(value)
    if mu == 0:
        return mu
    if mu.numerator != 1:
        raise ValueError(f"cached fraction must be 0 or 1/k, got {mu}")
    return mu


class CachingScheme:
    """Placement vector mu over N_sbs SBSs with cache budget M files.

    ``allow_full_spread`` permits mu_i = 1/N_sbs, which is valid only when
    retrieval needs no privacy (no redundancy left for blinding).
    """

    def __init__(self, N_sbs: int, M, mu: Sequence, q: int = 2,
                 allow_full_spread: bool = False):
        self.N_sbs = N_sbs
        self.M = Fraction(M)
        self.mu = [_as_mu(m) for m in mu]
        self.q = q
        if sum(self.mu) > self.M:
            raise ValueError("placement exceeds cache budget: sum(mu) > M")
        cached_k = []
        for m in self.mu:
            if m == 0:
                continue
            k = m.denominator
            if k > N_sbs:
                raise ValueError(f"mu=1/{k} needs more than {N_sbs} SBSs")
            if k == N_sbs and not allow_full_spread:
                raise ValueError("mu = 1/N_sbs leaves no redundancy for PIR")
            cached_k.append(k)
        self.k = [m.denominator if m else 0 for m in self.mu]
        if cached_k:
            self.k_min = min(cached_k)
            self.k_max = max(cached_k)
            if any(k % self.k_min for k in cached_k):
                raise ValueError("k_min must divide every cached k_i")
            self.mu_min = Fraction(1, self.k_max)
            self.mu_max = Fraction(1, self.k_min)
        else:
            self.k_min = self.k_max = 0
            self.mu_min = self.mu_max = Fraction(0)

    def cached_files(self) -> list[int]:
        return [i for i, m in enumerate(self.mu) if m != 0]

    def storage_code(self, file_index: int) -> codes.LinearCode:
        """(N_sbs, k_i) MDS storage code over GF(q), shared evaluation
        points across files so the codes are nested (smaller-k codes sit
        inside larger-k ones)."""
        k = self.k[file_index]
        if k == 0:
            raise ValueError("file is not cached")
        field = gf.make_field(self.q)
        n = self.N_sbs
        if n <= field.order - 1:
            return codes.grs(field, n, k)
        # the field has too few evaluation points for GRS; the repetition
        # and single parity-check codes are still MDS over any field
        if k == 1:
            return codes.repetition_code(field, n)
        if k == n - 1:
            return codes.spc_code(field, n)
        raise ValueError(
            f"no (n={n}, k={k}) MDS storage code available over GF({self.q}); "
            "use a larger field")


def packing_params(scheme: CachingScheme, L: int) -> tuple[int, dict, int]:
    """Return (delta_max, {file: delta_i}, pad_bits).

    delta_max is the packed stripe length in GF(q) symbols for the
    smallest-k file, chosen so every delta_i = delta_max*k_min/k_i is an
    integer and divides delta_max; pad_bits is the zero padding appended to
    each stripe to reach the common packed length.
    """
    p, m = gf.factor_prime_power(scheme.q)
    if p != 2:
        raise ValueError("bit packing requires q to be a power of 2")
    cached = scheme.cached_files()
    if not cached:
        return 0, {}, 0
    kmin = scheme.k_min
    ratio = lcm(*[scheme.k[i] // kmin for i in cached])
    raw = -(-L // (kmin * m))  # ceil
    delta_max = -(-raw // ratio) * ratio
    deltas = {i: delta_max * kmin // scheme.k[i] for i in cached}
    pad_bits = delta_max * kmin * m - L
    return delta_max, deltas, pad_bits


def pack_stripe(bits: Sequence[int], k: int, field) -> list[int]:
    """Split a (padded) stripe into k packets and map each big-endian to a
    GF(q^delta) element int."""
    delta_bits = len(bits) // k
    if delta_bits * k != len(bits):
        raise ValueError("stripe length not divisible by k")
    out = []
    for j in range(k):
        val = 0
        for b in bits[j * delta_bits:(j + 1) * delta_bits]:
            val = (val << 1) | b
        if val >= field.order:
            raise ValueError("packet does not fit the symbol field")
        out.append(val)
    return out


def unpack_stripe(symbols: Sequence[int], field, L: int) -> list[int]:
    """Inverse of pack_stripe, truncating padding down to L bits."""
    p, m = gf.factor_prime_power(field.order)
    delta_bits = m
    bits: list[int] = []
    for s in symbols:
        bits.extend((s >> (delta_bits - 1 - t)) & 1 for t in range(delta_bits))
    return bits[:L]


def pack_file(stripes: Sequence[Sequence[int]], k: int, q: int, L: int):
    """Pack a file's stripes into k symbols each over GF(q^delta).

    Returns (list of per-stripe symbol vectors, symbol field, pad_bits).
    """
    p, m = gf.factor_prime_power(q)
    if p != 2:
        raise ValueError("bit packing requires q to be a power of 2")
    delta = -(-L // (k * m))
    pad = delta * k * m - L
    field = gf.make_field(q, delta)
    packed = [pack_stripe(list(s) + [0] * pad, k, field) for s in stripes]
    return packed, field, pad


class EncodedCache:
    """Coded symbols c^(i)_{a,j} for every cached file i, stripe a, SBS j,
    plus the plaintext library retained at the MBS."""

    def __init__(self, library: FileLibrary, scheme: CachingScheme):
        if scheme.N_sbs < 1:
            raise ValueError("need at least one SBS")
        if len(scheme.mu) != library.F:
            raise ValueError("placement length must equal file count")
        self.library = library
        self.scheme = scheme
        self.delta_max, self.deltas, self.pad_bits = packing_params(scheme, library.L)
        self.fields = {i: gf.make_field(scheme.q, d) for i, d in self.deltas.items()}
        self.codes = {i: scheme.storage_code(i) for i in scheme.cached_files()}
        self.messages: dict[int, list[list[int]]] = {}
        self.symbols: dict[int, list[list[int]]] = {}
        pad = self.pad_bits
        for i in scheme.cached_files():
            k = scheme.k[i]
            field = self.fields[i]
            code = self.codes[i]
            stripes = []
            rows = []
            for a in range(library.beta):
                bits = list(library.files[i][a]) + [0] * pad
                msg = pack_stripe(bits, k, field)
                stripes.append(msg)
                rows.append(self._encode_row(code, msg, field))
            self.messages[i] = stripes
            self.symbols[i] = rows

    def _encode_row(self, code: codes.LinearCode, msg: Sequence[int], field) -> list[int]:
        Gemb = [[gf.embed(x, code.field, field) for x in row] for row in code.G]
        return gf.mat_vec(field, [list(c) for c in zip(*Gemb)], msg)

    @property
    def symbol_field(self):
        """GF(q^{delta_max}), the field all protocol arithmetic runs in."""
        return gf.make_field(self.scheme.q, self.delta_max) if self.delta_max else None

    def cache_column(self, sbs_j: int) -> list[int]:
        """Symbols stored at SBS j for all cached files, file-major then
        stripe-minor, embedded into GF(q^{delta_max})."""
        if not 0 <= sbs_j < self.scheme.N_sbs:
            raise ValueError("unknown SBS index")
        big = self.symbol_field
        out = []
        for i in self.scheme.cached_files():
            small = self.fields[i]
            for a in range(self.library.beta):
                out.append(gf.embed(self.symbols[i][a][sbs_j], small, big))
        return out

    def mbs_column(self, coord: int) -> list[int]:
        """Synthesize storage-code coordinate ``coord`` at the MBS from the
        plaintext library (same layout as cache_column)."""
        big = self.symbol_field
        out = []
        for i in self.scheme.cached_files():
            code = self.codes[i]
            small = self.fields[i]
            for a in range(self.library.beta):
                row = self._encode_row(code, self.messages[i][a], small)
                out.append(gf.embed(row[coord], small, big))
        return out

    def decode_file(self, i: int, coords: Sequence[int],
                    symbols_by_stripe: Sequence[Sequence[int]]) -> list[list[int]]:
        """Erasure-decode file i's stripes from >= k_i symbols at the given
        storage-code coordinates; returns the file's bit stripes."""
        code = self.codes[i]
        field = self.fields[i]
        out = []
        for a, syms in enumerate(symbols_by_stripe):
            word: list[Optional[int]] = [None] * code.n
            for c, s in zip(coords, syms):
                word[c] = s
            cw = codes.erasure_decode(code, word, symbol_field=field)
            Gt = [list(r) for r in zip(*[[gf.embed(x, code.field, field) for x in row] for row in code.G])]
            msg = gf.solve(field, Gt, cw)
            out.append(unpack_stripe(msg, field, self.library.L))
        return out


# ---------------------------------------------------------------------------
# snapshot container: MAGIC | u32 header length | JSON header | body
# body = library bits (file-major, stripe-major, bit-packed big-endian,
# byte-aligned per stripe) then cached symbols (file-major, stripe-major,
# coordinate-minor, fixed width per file)
# ---------------------------------------------------------------------------

def save_snapshot(path: str, cache: EncodedCache) -> None:
    lib, scheme = cache.library, cache.scheme
    header = {
        "q": scheme.q,
        "delta_max": cache.delta_max,
        "F": lib.F,
        "beta": lib.beta,
        "L": lib.L,
        "N_sbs": scheme.N_sbs,
        "M": str(scheme.M),
        "mu": [str(m) for m in scheme.mu],
        "popularity": lib.popularity,
        "pad_bits": cache.pad_bits,
        "allow_full_spread": scheme.N_sbs in [m.denominator for m in scheme.mu if m],
    }
    hdr = json.dumps(header, sort_keys=True).encode()
    body = bytearray()
    stripe_bytes = (lib.L + 7) // 8
    for f in lib.files:
        for stripe in f:
            val = 0
            for b in stripe:
                val = (val << 1) | b
            val <<= (stripe_bytes * 8 - lib.L)
            body += val.to_bytes(stripe_bytes, "big")
    for i in scheme.cached_files():
        width = (cache.fields[i].order - 1).bit_length()
        width = (width + 7) // 8
        for a in range(lib.beta):
            for s in cache.symbols[i][a]:
                body += s.to_bytes(width, "big")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack(">I", len(hdr)))
        fh.write(hdr)
        fh.write(body)


def load_snapshot(path: str) -> EncodedCache:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError("not a cache snapshot file")
        (hlen,) = struct.unpack(">I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        body = fh.read()
    F, beta, L = header["F"], header["beta"], header["L"]
    stripe_bytes = (L + 7) // 8
    files = []
    off = 0
    for _ in range(F):
        stripes = []
        for _ in range(beta):
            val = int.from_bytes(body[off:off + stripe_bytes], "big")
            off += stripe_bytes
            val >>= stripe_bytes * 8 - L
            stripes.append([(val >> (L - 1 - t)) & 1 for t in range(L)])
        files.append(stripes)
    lib = FileLibrary(files, L, header["popularity"])
    scheme = CachingScheme(header["N_sbs"], Fraction(header["M"]),
                           [Fraction(m) for m in header["mu"]], q=header["q"],
                           allow_full_spread=header.get("allow_full_spread", False))
    cache = EncodedCache(lib, scheme)
    # verify stored symbols match re-encoding (corruption check)
    for i in scheme.cached_files():
        width = ((cache.fields[i].order - 1).bit_length() + 7) // 8
        for a in range(beta):
            for s in cache.symbols[i][a]:
                stored = int.from_bytes(body[off:off + width], "big")
                off += width
                if stored != s:
                    raise ValueError("snapshot symbols inconsistent with library")
    return cache
