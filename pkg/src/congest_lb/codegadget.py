"""Code-mappings that fix the geometry of the code gadgets.

A code-mapping sends a message ``m`` in ``[k]`` to a codeword of length
``ell + alpha`` over the alphabet ``{1, ..., ell + alpha}`` so that distinct
messages land at Hamming distance at least ``ell``.

Two backends are provided:

``reed_solomon``
    Messages are polynomials of degree < ``alpha`` over GF(q), ``q = ell + alpha``,
    evaluated at every field element.  ``m - 1`` is written in base ``q``,
    least-significant digit first, and digit ``j`` is the coefficient of ``x**j``.
    Field elements are integers ``0..q-1`` (for ``q = p**e`` the base-``p``
    digits of the integer are the coefficients of the residue polynomial);
    element ``e`` is printed as symbol ``e + 1``, and position ``h`` evaluates
    at element ``h - 1``.

``explicit_table``
    A user-supplied list of codewords (1-based symbols), validated for range,
    injectivity and distance.  With ``alpha == 1`` and no table the cyclic table
    ``C(m)_h = ((m - 1) + h) mod q + 1`` is used; for ``ell=2`` it starts with
    ``C(1) = (2, 3, 1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "BACKENDS",
    "CodeParams",
    "Codeword",
    "CodeError",
    "make_params",
    "encode",
    "codebook",
    "hamming_distance",
    "min_pairwise_distance",
    "max_agreement",
    "load_table",
    "next_prime_power",
    "is_prime_power",
]

BACKENDS = ("reed_solomon", "explicit_table")
PAIRWISE_GUARD = 10_000


class CodeError(ValueError):
    """Invalid code parameters, tables or messages."""


def _factor_prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


def is_prime_power(q: int) -> bool:
    return _factor_prime_power(q) is not None


def next_prime_power(q: int) -> int:
    """Smallest prime power >= q (the documented fallback for raising ell)."""
    q = max(q, 2)
    while not is_prime_power(q):
        q += 1
    return q


@dataclass(frozen=True)
class Codeword:
    symbols: tuple[int, ...]
    sigma_size: int

    def __post_init__(self):
        if any(not 1 <= s <= self.sigma_size for s in self.symbols):
            raise CodeError(f"symbol out of range 1..{self.sigma_size}: {self.symbols}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, h: int) -> int:
        """1-based position access, matching the clique index ``h``."""
        if not 1 <= h <= len(self.symbols):
            raise IndexError(h)
        return self.symbols[h - 1]

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class CodeParams:
    alpha: int
    ell: int
    backend: str = "reed_solomon"
    table: tuple[tuple[int, ...], ...] | None = None
    allow_tiny: bool = False
    m_len: int = field(init=False)
    sigma_size: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "m_len", self.ell + self.alpha)
        object.__setattr__(self, "sigma_size", self.ell + self.alpha)
        object.__setattr__(self, "k", (self.ell + self.alpha) ** self.alpha)

    @property
    def q(self) -> int:
        return self.sigma_size

    def describe(self) -> dict:
        return {
            "ell": self.ell,
            "alpha": self.alpha,
            "q": self.q,
            "k": self.k,
            "backend": self.backend,
        }


def make_params(
    ell: int,
    alpha: int,
    backend: str = "reed_solomon",
    allow_tiny: bool = False,
    table: Sequence[Sequence[int]] | None = None,
) -> CodeParams:
    """Validate ``(ell, alpha)`` and build :class:`CodeParams`.

    Raises :class:`CodeError` when ``ell <= alpha`` (unless ``allow_tiny``), when
    ``ell + alpha`` is not a prime power under ``reed_solomon``, or when an
    explicit table is malformed or has distance below ``ell``.
    """
    if not isinstance(ell, int) or not isinstance(alpha, int) or ell < 1 or alpha < 1:
        raise CodeError("ell and alpha must be positive integers")
    if backend not in BACKENDS:
        raise CodeError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if ell <= alpha and not allow_tiny:
        raise CodeError(f"need ell > alpha (got ell={ell}, alpha={alpha}); pass allow_tiny to override")
    q = ell + alpha
    if backend == "reed_solomon":
        if table is not None:
            raise CodeError("reed_solomon backend does not take a table")
        if not is_prime_power(q):
            raise CodeError(
                f"ell + alpha = {q} is not a prime power; "
                f"raise ell to {next_prime_power(q) - alpha} for q = {next_prime_power(q)}"
            )
        return CodeParams(alpha=alpha, ell=ell, backend=backend, allow_tiny=allow_tiny)

    if table is None:
        if alpha != 1:
            raise CodeError("explicit_table backend needs a table when alpha > 1")
        table = _cyclic_table(q)
    rows = tuple(tuple(int(s) for s in row) for row in table)
    params = CodeParams(alpha=alpha, ell=ell, backend=backend, table=rows, allow_tiny=allow_tiny)
    _validate_table(params)
    return params


def _cyclic_table(q: int) -> list[list[int]]:
    return [[((m - 1) + h) % q + 1 for h in range(1, q + 1)] for m in range(1, q + 1)]


def _validate_table(params: CodeParams) -> None:
    rows = params.table
    if len(rows) != params.k:
        raise CodeError(f"table has {len(rows)} codewords, expected k = {params.k}")
    for row in rows:
        if len(row) != params.m_len:
            raise CodeError(f"codeword {row} has length {len(row)}, expected {params.m_len}")
        if any(not 1 <= s <= params.q for s in row):
            raise CodeError(f"codeword {row} has a symbol outside 1..{params.q}")
    if params.k <= PAIRWISE_GUARD:
        d = min_pairwise_distance(params)
        if d < params.ell:
            raise CodeError(f"table distance {d} is below ell = {params.ell}")


def load_table(path: str | Path) -> list[list[int]]:
    """Read an explicit table: a JSON array of arrays of 1-based symbols."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise CodeError("table JSON must be an array of arrays")
    return data


# -- finite field arithmetic -------------------------------------------------


class _Field:
    """GF(p**e) on integer representatives 0..q-1."""

    def __init__(self, q: int):
        pe = _factor_prime_power(q)
        if pe is None:
            raise CodeError(f"{q} is not a prime power")
        self.q = q
        self.p, self.e = pe
        if self.e == 1:
            self.modulus = None
        else:
            self.modulus = _smallest_irreducible(self.p, self.e)
        self._mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def _from_digits(self, ds: Sequence[int]) -> int:
        a = 0
        for d in reversed(ds):
            a = a * self.p + d
        return a

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        da, db = self._digits(a), self._digits(b)
        return self._from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def _slow_mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(self._digits(a)):
            for j, y in enumerate(self._digits(b)):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus, coefficients low-first
        mod = self.modulus
        for deg in range(len(prod) - 1, e - 1, -1):
            c = prod[deg]
            if c:
                for j in range(e + 1):
                    prod[deg - e + j] = (prod[deg - e + j] - c * mod[j]) % p
        return self._from_digits(prod[:e])


def _smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``e`` over GF(p), first in lexicographic order."""
    for low in product(range(p), repeat=e):
        coeffs = tuple(reversed(low)) + (1,)  # low-first, monic
        if coeffs[0] == 0:
            continue
        if not any(_poly_has_factor(coeffs, d, p) for d in range(1, e // 2 + 1)):
            return coeffs
    raise CodeError(f"no irreducible polynomial of degree {e} over GF({p})")


def _poly_has_factor(f: tuple[int, ...], d: int, p: int) -> bool:
    for low in product(range(p), repeat=d):
        g = tuple(reversed(low)) + (1,)
        if _poly_mod(list(f), g, p) == [0] * d:
            return True
    return False


def _poly_mod(f: list[int], g: tuple[int, ...], p: int) -> list[int]:
    d = len(g) - 1
    f = f[:]
    for deg in range(len(f) - 1, d - 1, -1):
        c = f[deg]
        if c:
            for j in range(d + 1):
                f[deg - d + j] = (f[deg - d + j] - c * g[j]) % p
    return f[:d]


@lru_cache(maxsize=None)
def _field(q: int) -> _Field:
    return _Field(q)


# -- encoding ------------------------------------------------------------------


def _check_message(params: CodeParams, m: int) -> None:
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= params.k:
        raise CodeError(f"message {m} outside 1..{params.k}")


def _rs_symbols(params: CodeParams, m: int) -> tuple[int, ...]:
    F = _field(params.q)
    coeffs = []
    rest = m - 1
    for _ in range(params.alpha):
        coeffs.append(rest % params.q)
        rest //= params.q
    out = []
    for x in range(params.q):
        # Horner from the highest coefficient
        acc = 0
        for c in reversed(coeffs):
            acc = F.add(F.mul(acc, x), c)
        out.append(acc + 1)
    return tuple(out)


def encode(params: CodeParams, m: int) -> Codeword:
    """Codeword of message ``m`` (1-based)."""
    _check_message(params, m)
    if params.backend == "explicit_table":
        return Codeword(params.table[m - 1], params.q)
    return Codeword(_rs_symbols(params, int(m)), params.q)


@lru_cache(maxsize=64)
def codebook(params: CodeParams) -> tuple[Codeword, ...]:
    """All ``k`` codewords in message order."""
    return tuple(encode(params, m) for m in range(1, params.k + 1))


def hamming_distance(a: Codeword | Sequence[int], b: Codeword | Sequence[int]) -> int:
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise CodeError("codewords of different length")
    return sum(x != y for x, y in zip(a, b))


def min_pairwise_distance(params: CodeParams) -> int:
    """Exhaustive minimum Hamming distance over all pairs of distinct messages."""
    if params.k > PAIRWISE_GUARD:
        raise CodeError(f"k = {params.k} exceeds the pairwise guard {PAIRWISE_GUARD}")
    if params.k < 2:
        return params.m_len
    if params.backend == "explicit_table":
        words = np.array(params.table, dtype=np.int64)
    else:
        words = np.array([_rs_symbols(params, m) for m in range(1, params.k + 1)], dtype=np.int64)
    best = params.m_len
    for i in range(len(words) - 1):
        d = (words[i + 1 :] != words[i]).sum(axis=1).min()
        best = min(best, int(d))
    return best


def max_agreement(params: CodeParams) -> int:
    """Largest number of positions on which two distinct codewords agree."""
    return params.m_len - min_pairwise_distance(params)
