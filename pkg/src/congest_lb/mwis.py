"""Exact maximum-weight independent set by branch and bound on bitsets.

Vertices are ``0..n-1``; a set is an int bitmask.  The upper bound at each
search node is a weighted clique-cover bound: given a partition of the
vertices into cliques, an independent set takes at most one vertex from each,
so the sum over cliques of the heaviest remaining candidate bounds the rest of
the search.  Branching picks the clique with the largest contribution and
tries each of its candidates, then "none of them".

The witness is the lexicographically smallest maximiser (compare sorted id
tuples).  After the optimum is known, vertices are fixed in increasing id
order: a vertex is taken whenever some optimal completion still contains it.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["DEFAULT_GUARD", "GuardExceeded", "SolveResult", "solve_mwis", "greedy_clique_cover", "guard_limit"]

DEFAULT_GUARD = 200
GUARD_ENV = "CONGEST_LB_GUARD"


class GuardExceeded(RuntimeError):
    pass


def guard_limit(guard: int | None = None) -> int:
    if guard is not None:
        return guard
    env = os.environ.get(GUARD_ENV)
    return int(env) if env else DEFAULT_GUARD


@dataclass(frozen=True)
class SolveResult:
    weight: int
    witness: int
    explored: int

    def members(self) -> list[int]:
        return _bits(self.witness)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def greedy_clique_cover(adj_masks: Sequence[int], vertices: int) -> list[int]:
    """Partition ``vertices`` (a mask) into cliques, scanning ids in order."""
    cover = []
    left = vertices
    while left:
        low = left & -left
        v = low.bit_length() - 1
        clique = low
        common = adj_masks[v] & left
        while common:
            u_bit = common & -common
            u = u_bit.bit_length() - 1
            clique |= u_bit
            common &= adj_masks[u]
        cover.append(clique)
        left &= ~clique
    return cover


class _Search:
    def __init__(self, weights: Sequence[int], adj: Sequence[int], cover: Iterable[int]):
        self.w = weights
        self.adj = adj
        # per clique: members sorted by weight descending, then id
        self.groups = []
        for c in cover:
            members = sorted(_bits(c), key=lambda v: (-weights[v], v))
            if members:
                self.groups.append((c, [(weights[v], 1 << v, v) for v in members]))
        self.explored = 0

    def bound(self, cands: int) -> tuple[int, int]:
        total = 0
        pick, pick_val, pick_cnt = -1, -1, 0
        for gi, (mask, members) in enumerate(self.groups):
            inside = mask & cands
            if not inside:
                continue
            for wv, bit, _ in members:
                if inside & bit:
                    total += wv
                    cnt = inside.bit_count()
                    if wv > pick_val or (wv == pick_val and cnt < pick_cnt):
                        pick, pick_val, pick_cnt = gi, wv, cnt
                    break
        return total, pick

    def run(self, cands: int, floor: int, stop_at: int | None) -> tuple[int, int] | None:
        """Best (weight, set) within ``cands`` with weight > ``floor``.

        With ``stop_at`` set, returns the first set reaching that weight.
        """
        self.best_w = floor
        self.best_set = None
        self.stop_at = stop_at
        self.done = False
        self._rec(cands, 0, 0)
        if self.best_set is None:
            return None
        return self.best_w, self.best_set

    def _rec(self, cands: int, cur_w: int, cur_set: int) -> None:
        self.explored += 1
        if not cands:
            if cur_w > self.best_w:
                self.best_w, self.best_set = cur_w, cur_set
                if self.stop_at is not None and cur_w >= self.stop_at:
                    self.done = True
            return
        ub, gi = self.bound(cands)
        if cur_w + ub <= self.best_w:
            return
        mask, members = self.groups[gi]
        inside = mask & cands
        for wv, bit, v in members:
            if inside & bit:
                self._rec(cands & ~self.adj[v] & ~bit, cur_w + wv, cur_set | bit)
                if self.done:
                    return
        self._rec(cands & ~mask, cur_w, cur_set)


def solve_mwis(
    weights: Sequence[int],
    adj_masks: Sequence[int],
    forced: int = 0,
    within: int | None = None,
    cover: Iterable[int] | None = None,
    guard: int | None = None,
) -> SolveResult:
    """Maximum-weight independent set containing ``forced``, restricted to ``within``.

    ``cover`` may be any family of cliques covering the candidates (it is
    intersected with the candidate set); a greedy cover is used otherwise.
    Raises :class:`ValueError` if ``forced`` is not independent and
    :class:`GuardExceeded` if the candidate graph is larger than the guard.
    """
    n = len(weights)
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    full = (1 << n) - 1
    within = full if within is None else within & full
    if forced & ~within:
        raise ValueError("forced vertices lie outside the allowed set")
    blocked = 0
    for v in _bits(forced):
        if adj_masks[v] & forced:
            raise ValueError("forced set is not independent")
        blocked |= adj_masks[v]
    limit = guard_limit(guard)
    size = within.bit_count()
    if size > limit:
        raise GuardExceeded(f"{size} vertices exceeds the solver guard {limit} (set {GUARD_ENV} to raise it)")
    cands = within & ~forced & ~blocked
    base = sum(weights[v] for v in _bits(forced))

    if cover is None:
        cover = greedy_clique_cover(adj_masks, cands)
    else:
        cover = list(cover)
        covered = 0
        for c in cover:
            covered |= c
        if cands & ~covered:
            cover = cover + greedy_clique_cover(adj_masks, cands & ~covered)
    cover = [c & cands for c in cover if c & cands]

    # recursion depth is bounded by the number of cliques
    depth = len(cover) + 50
    if sys.getrecursionlimit() < depth * 2:
        sys.setrecursionlimit(depth * 2)

    search = _Search(weights, adj_masks, cover)
    found = search.run(cands, -1, None)
    opt_rest, some_set = found if found is not None else (0, 0)

    # lexicographically smallest optimal completion
    chosen, rest, need = 0, cands, opt_rest
    witness = some_set
    for v in _bits(cands):
        bit = 1 << v
        if not rest & bit:
            continue
        if witness & bit:
            chosen |= bit
            need -= weights[v]
            rest &= ~adj_masks[v] & ~bit
            continue
        trial = rest & ~adj_masks[v] & ~bit
        target = need - weights[v]
        if target <= 0:
            hit = (0, 0)
        else:
            hit = search.run(trial, target - 1, target)
        if hit is not None:
            chosen |= bit
            need -= weights[v]
            rest = trial
            witness = chosen | hit[1]
        else:
            rest &= ~bit
    return SolveResult(base + opt_rest, forced | chosen, search.explored)
