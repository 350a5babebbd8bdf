"""Promise pairwise-disjointness inputs for ``t`` players.

Strings are packed into Python ints: position ``m`` (1-based) is bit ``m - 1``.
The quadratic family indexes its ``k**2`` positions by pairs ``(m1, m2)`` in
row-major order, see :func:`pair_index`.

JSON form::

    {"t": 2, "len": 9, "shape": "quadratic", "k": 3, "strings": ["0x1", "0x10"]}

Each hex string is the packed int of one player's string; ``len`` gives the
explicit bit length.
"""

from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

__all__ = [
    "DisjointnessInstance",
    "PromiseKind",
    "PromiseVerdict",
    "InstanceError",
    "make_intersecting",
    "make_pairwise_disjoint",
    "from_bitstrings",
    "from_supports",
    "verify_promise",
    "pair_index",
    "unpair_index",
    "enumerate_promise_instances",
]


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class DisjointnessInstance:
    t: int
    length: int
    strings: tuple[int, ...]
    shape: str = "linear"
    k: int | None = None

    def __post_init__(self):
        if self.t < 1:
            raise InstanceError("need at least one player")
        if self.length < 1:
            raise InstanceError("string length must be positive")
        if len(self.strings) != self.t:
            raise InstanceError(f"expected {self.t} strings, got {len(self.strings)}")
        for s in self.strings:
            if s < 0 or s >> self.length:
                raise InstanceError(f"string {s:#x} does not fit in {self.length} bits")
        if self.shape == "linear":
            if self.k is not None and self.k != self.length:
                raise InstanceError("linear instance: k must equal len")
        elif self.shape == "quadratic":
            if self.k is None or self.k * self.k != self.length:
                raise InstanceError("quadratic(k) instance needs len == k**2")
        else:
            raise InstanceError(f"unknown shape {self.shape!r}")

    def bit(self, player: int, m: int) -> int:
        """``x^player_m`` with 1-based player and position."""
        if not 1 <= m <= self.length:
            raise InstanceError(f"position {m} outside 1..{self.length}")
        return (self.strings[player - 1] >> (m - 1)) & 1

    def pair_bit(self, player: int, m1: int, m2: int) -> int:
        if self.shape != "quadratic":
            raise InstanceError("pair access needs a quadratic instance")
        return self.bit(player, pair_index(self.k, m1, m2))

    def support(self, player: int) -> list[int]:
        s = self.strings[player - 1]
        return [m for m in range(1, self.length + 1) if (s >> (m - 1)) & 1]

    def bitstrings(self) -> list[str]:
        return ["".join(str(self.bit(i, m)) for m in range(1, self.length + 1)) for i in range(1, self.t + 1)]

    def with_string(self, player: int, value: int) -> DisjointnessInstance:
        strings = list(self.strings)
        strings[player - 1] = value
        return DisjointnessInstance(self.t, self.length, tuple(strings), self.shape, self.k)

    def to_json(self) -> dict:
        out = {"t": self.t, "len": self.length, "shape": self.shape}
        if self.shape == "quadratic":
            out["k"] = self.k
        out["strings"] = [hex(s) for s in self.strings]
        return out

    @classmethod
    def from_json(cls, data: dict) -> DisjointnessInstance:
        try:
            strings = tuple(int(s, 16) for s in data["strings"])
            return cls(int(data["t"]), int(data["len"]), strings, data.get("shape", "linear"), data.get("k"))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed instance JSON: {exc}") from exc

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class PromiseKind(enum.Enum):
    UNIQUELY_INTERSECTING = "uniquely_intersecting"
    PAIRWISE_DISJOINT = "pairwise_disjoint"
    PROMISE_VIOLATED = "promise_violated"


@dataclass(frozen=True)
class PromiseVerdict:
    kind: PromiseKind
    index: int | None = None

    @property
    def disjoint(self) -> bool:
        return self.kind is PromiseKind.PAIRWISE_DISJOINT

    @property
    def intersecting(self) -> bool:
        return self.kind is PromiseKind.UNIQUELY_INTERSECTING

    def __str__(self) -> str:
        if self.intersecting:
            return f"UniquelyIntersecting({self.index})"
        return "PairwiseDisjoint" if self.disjoint else "PromiseViolated"


def pair_index(k: int, m1: int, m2: int) -> int:
    """Row-major flat position of ``(m1, m2)`` in ``[k] x [k]``, 1-based."""
    if not (1 <= m1 <= k and 1 <= m2 <= k):
        raise InstanceError(f"pair ({m1}, {m2}) outside [{k}] x [{k}]")
    return (m1 - 1) * k + m2


def unpair_index(k: int, flat: int) -> tuple[int, int]:
    if not 1 <= flat <= k * k:
        raise InstanceError(f"flat index {flat} outside 1..{k * k}")
    q, r = divmod(flat - 1, k)
    return q + 1, r + 1


def verify_promise(instance: DisjointnessInstance) -> PromiseVerdict:
    """Classify an instance against the promise.

    Pairwise disjoint when every pair of supports is disjoint.  Uniquely
    intersecting at ``m`` when ``m`` is the only position set in every string
    and no pair of strings shares any other position.  Anything else violates
    the promise.
    """
    xs = instance.strings
    if instance.t < 2:
        raise InstanceError("the promise needs t >= 2 players")
    common = xs[0]
    for s in xs[1:]:
        common &= s
    pairwise = 0
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            pairwise |= xs[i] & xs[j]
    if pairwise == 0:
        return PromiseVerdict(PromiseKind.PAIRWISE_DISJOINT)
    if common and common & (common - 1) == 0 and pairwise == common:
        return PromiseVerdict(PromiseKind.UNIQUELY_INTERSECTING, common.bit_length())
    return PromiseVerdict(PromiseKind.PROMISE_VIOLATED)


def _shape_args(length: int, k: int | None) -> tuple[str, int | None]:
    if k is None:
        return "linear", None
    if k * k != length:
        raise InstanceError(f"quadratic instance needs len == k**2 (k={k}, len={length})")
    return "quadratic", k


def _check_density(fill_density: float) -> None:
    if not 0.0 <= fill_density <= 1.0:
        raise InstanceError(f"fill_density {fill_density} infeasible; need 0 <= density <= 1")


def _disjoint_fill(t: int, length: int, skip: int | None, fill_density: float, rng: random.Random) -> list[int]:
    strings = [0] * t
    for m in range(1, length + 1):
        if m == skip:
            continue
        # draw both numbers every position so the stream does not depend on outcomes
        u, owner = rng.random(), rng.randrange(t)
        if u < fill_density:
            strings[owner] |= 1 << (m - 1)
    return strings


def make_intersecting(
    t: int,
    length: int,
    common_index: int,
    fill_density: float = 0.0,
    seed: int | None = 0,
    k: int | None = None,
) -> DisjointnessInstance:
    """Strict uniquely-intersecting instance.

    Every string has bit ``common_index`` set; every other position is, with
    probability ``fill_density``, given to one uniformly chosen player.
    Pass ``k`` for a quadratic(k) instance of length ``k**2``.
    """
    if not 1 <= common_index <= length:
        raise InstanceError(f"common index {common_index} outside 1..{length}")
    _check_density(fill_density)
    shape, k = _shape_args(length, k)
    rng = random.Random(seed)
    strings = _disjoint_fill(t, length, common_index, fill_density, rng)
    strings = [s | (1 << (common_index - 1)) for s in strings]
    return DisjointnessInstance(t, length, tuple(strings), shape, k)


def make_pairwise_disjoint(
    t: int,
    length: int,
    fill_density: float = 0.0,
    seed: int | None = 0,
    k: int | None = None,
) -> DisjointnessInstance:
    """Instance with pairwise-disjoint supports, each position owned w.p. ``fill_density``."""
    _check_density(fill_density)
    shape, k = _shape_args(length, k)
    rng = random.Random(seed)
    strings = _disjoint_fill(t, length, None, fill_density, rng)
    return DisjointnessInstance(t, length, tuple(strings), shape, k)


def from_bitstrings(strings: Sequence[str], k: int | None = None) -> DisjointnessInstance:
    """Build from ``"0101"``-style strings; the first character is position 1."""
    if not strings:
        raise InstanceError("no strings given")
    length = len(strings[0])
    packed = []
    for s in strings:
        if len(s) != length or set(s) - {"0", "1"}:
            raise InstanceError(f"bad bit string {s!r}")
        packed.append(sum(1 << i for i, c in enumerate(s) if c == "1"))
    shape, k = _shape_args(length, k)
    return DisjointnessInstance(len(strings), length, tuple(packed), shape, k)


def from_supports(length: int, supports: Sequence[Iterable[int]], k: int | None = None) -> DisjointnessInstance:
    packed = []
    for sup in supports:
        s = 0
        for m in sup:
            if not 1 <= m <= length:
                raise InstanceError(f"position {m} outside 1..{length}")
            s |= 1 << (m - 1)
        packed.append(s)
    shape, k = _shape_args(length, k)
    return DisjointnessInstance(len(packed), length, tuple(packed), shape, k)


def enumerate_promise_instances(t: int, length: int, kind: str, k: int | None = None) -> Iterator[DisjointnessInstance]:
    """Every strict promise instance of the given kind (``"intersect"`` or ``"disjoint"``).

    Each non-common position is owned by at most one player, so there are
    ``(t + 1) ** length`` disjoint and ``length * (t + 1) ** (length - 1)``
    intersecting instances.
    """
    shape, k = _shape_args(length, k)
    if kind == "disjoint":
        commons: list[int | None] = [None]
    elif kind == "intersect":
        commons = list(range(1, length + 1))
    else:
        raise InstanceError(f"unknown promise kind {kind!r}")
    for c in commons:
        free = [m for m in range(1, length + 1) if m != c]
        for owners in product(range(t + 1), repeat=len(free)):
            strings = [0] * t
            for m, o in zip(free, owners):
                if o:
                    strings[o - 1] |= 1 << (m - 1)
            if c is not None:
                strings = [s | (1 << (c - 1)) for s in strings]
            yield DisjointnessInstance(t, length, tuple(strings), shape, k)

