"""Lower-bound graph families.

Node identities are structured (:class:`NodeId`) and mapped to dense integer
ids in lexicographic order of ``(player, copy, role, a, b, sub)``; the integer
id is what the simulator uses as the CONGEST identifier.

* ``build_base_graph``: the base graph ``H`` (one player, all weights 1).
* ``build_linear_fixed``: ``t`` copies of ``H`` plus, for every pair of players
  and every clique index ``h``, the complete bipartite graph between their
  ``C_h`` cliques minus the identity matching.
* ``build_linear_instance``: the fixed graph with clique node ``v^i_m``
  weighted ``ell`` iff ``x^i_m = 1``.
* ``build_quadratic_instance``: two copies of the fixed graph, every clique
  node weighted ``ell``, plus an edge ``v^(i,1)_m1 -- v^(i,2)_m2`` for every
  zero bit ``x^i_(m1,m2)``.
* ``expand_unweighted``: replaces each heavy node by an independent set of
  unit nodes joined by bicliques.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .codegadget import CodeParams, codebook
from .instances import DisjointnessInstance, unpair_index

__all__ = [
    "CLIQUE",
    "CODE",
    "NodeId",
    "LowerBoundGraph",
    "GraphError",
    "build_base_graph",
    "build_linear_fixed",
    "build_linear_instance",
    "build_quadratic_fixed",
    "build_quadratic_instance",
    "expand_unweighted",
    "cut_edges",
    "cut_size",
    "expected_node_count",
    "expected_cut_size",
    "FamilyConditionReport",
    "validate_family_condition1",
    "to_json",
    "to_dot",
]

CLIQUE = 0
CODE = 1


class GraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class NodeId:
    """``v^(player,copy)_m`` when ``role == CLIQUE`` (``a = m``), or
    ``sigma^(player,copy)_(h,r)`` when ``role == CODE`` (``a = h, b = r``).

    ``sub`` is 0 for original nodes and ``1..w`` for the members of an
    expanded independent set.
    """

    player: int
    copy: int
    role: int
    a: int
    b: int = 0
    sub: int = 0

    @classmethod
    def clique(cls, player: int, m: int, copy: int = 1) -> NodeId:
        return cls(player, copy, CLIQUE, m)

    @classmethod
    def code(cls, player: int, h: int, r: int, copy: int = 1) -> NodeId:
        return cls(player, copy, CODE, h, r)

    @property
    def is_clique(self) -> bool:
        return self.role == CLIQUE

    def base(self) -> NodeId:
        return NodeId(self.player, self.copy, self.role, self.a, self.b)

    def label(self) -> str:
        sup = f"{self.player}" if self.copy == 1 else f"({self.player},{self.copy})"
        s = f"v^{sup}_{self.a}" if self.is_clique else f"s^{sup}_({self.a},{self.b})"
        return f"{s}#{self.sub}" if self.sub else s

    def to_json(self) -> dict:
        out = {"player": self.player, "copy": self.copy, "role": "clique" if self.is_clique else "code"}
        if self.is_clique:
            out["m"] = self.a
        else:
            out["h"], out["r"] = self.a, self.b
        if self.sub:
            out["sub"] = self.sub
        return out


@dataclass(frozen=True, eq=False)
class LowerBoundGraph:
    params: CodeParams
    t: int
    variant: str
    nodes: tuple[NodeId, ...]
    weights: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    cliques: tuple[tuple[int, ...], ...] = ()
    instance: DisjointnessInstance | None = None
    source_variant: str | None = None

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def index(self) -> dict[NodeId, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def partition(self) -> tuple[int, ...]:
        return tuple(v.player for v in self.nodes)

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        masks = []
        for nbrs in self.adjacency:
            m = 0
            for u in nbrs:
                m |= 1 << u
            masks.append(m)
        return tuple(masks)

    @cached_property
    def clique_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in c) for c in self.cliques)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def id_of(self, node: NodeId) -> int:
        try:
            return self.index[node]
        except KeyError:
            raise GraphError(f"unknown node {node}") from None

    def ids(self, nodes: Iterable[NodeId | int]) -> list[int]:
        out = []
        for v in nodes:
            if isinstance(v, NodeId):
                out.append(self.id_of(v))
            elif 0 <= v < self.n:
                out.append(int(v))
            else:
                raise GraphError(f"unknown node id {v}")
        return out

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return bool(self.adj_masks[self.id_of(u)] >> self.id_of(v) & 1)

    def weight(self, node: NodeId) -> int:
        return self.weights[self.id_of(node)]

    def neighbors(self, node: NodeId) -> list[NodeId]:
        return [self.nodes[u] for u in self.adjacency[self.id_of(node)]]

    def player_nodes(self, player: int) -> list[int]:
        return [i for i, p in enumerate(self.partition) if p == player]

    def clique_nodes(self, player: int, copy: int = 1) -> list[NodeId]:
        """The clique ``A^player`` (``A^(player,copy)``)."""
        return [NodeId.clique(player, m, copy) for m in range(1, self.params.k + 1)]

    def code_clique(self, player: int, h: int, copy: int = 1) -> list[NodeId]:
        """The clique ``C^player_h``."""
        return [NodeId.code(player, h, r, copy) for r in range(1, self.params.q + 1)]

    def code_gadget(self, player: int, copy: int = 1) -> list[NodeId]:
        return [v for h in range(1, self.params.q + 1) for v in self.code_clique(player, h, copy)]

    def codeword_nodes(self, player: int, m: int, copy: int = 1) -> list[NodeId]:
        """``Code^player_m``: one node per clique, selected by the codeword of ``m``."""
        w = codebook(self.params)[m - 1]
        return [NodeId.code(player, h, w[h], copy) for h in range(1, self.params.q + 1)]

    def weight_of_set(self, nodes: Iterable[NodeId]) -> int:
        return sum(self.weight(v) for v in nodes)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= self.adj_masks[low.bit_length() - 1]
                f ^= low
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1


class _Assembler:
    def __init__(self):
        self.nodes: list[NodeId] = []
        self.edges: set[tuple[NodeId, NodeId]] = set()
        self.cliques: list[list[NodeId]] = []

    def add_clique(self, members: Sequence[NodeId]) -> None:
        self.nodes.extend(members)
        self.cliques.append(list(members))
        for u, v in combinations(members, 2):
            self.add_edge(u, v)

    def add_edge(self, u: NodeId, v: NodeId) -> None:
        if u == v:
            raise GraphError("self-loops are not allowed")
        self.edges.add((u, v) if u < v else (v, u))

    def finish(self):
        nodes = tuple(sorted(set(self.nodes)))
        if len(nodes) != len(self.nodes):
            raise GraphError("duplicate node")
        index = {v: i for i, v in enumerate(nodes)}
        adj: list[list[int]] = [[] for _ in nodes]
        for u, v in self.edges:
            adj[index[u]].append(index[v])
            adj[index[v]].append(index[u])
        adjacency = tuple(tuple(sorted(a)) for a in adj)
        cliques = tuple(tuple(sorted(index[v] for v in c)) for c in self.cliques)
        return nodes, adjacency, cliques


def _add_base_copy(asm: _Assembler, params: CodeParams, player: int, copy: int) -> None:
    q, k = params.q, params.k
    A = [NodeId.clique(player, m, copy) for m in range(1, k + 1)]
    asm.add_clique(A)
    for h in range(1, q + 1):
        asm.add_clique([NodeId.code(player, h, r, copy) for r in range(1, q + 1)])
    for m, w in enumerate(codebook(params), start=1):
        v = NodeId.clique(player, m, copy)
        for h in range(1, q + 1):
            for r in range(1, q + 1):
                if r != w[h]:
                    asm.add_edge(v, NodeId.code(player, h, r, copy))


def _add_cross_edges(asm: _Assembler, params: CodeParams, t: int, copy: int) -> None:
    q = params.q
    for i, j in combinations(range(1, t + 1), 2):
        for h in range(1, q + 1):
            for r in range(1, q + 1):
                for s in range(1, q + 1):
                    if r != s:
                        asm.add_edge(NodeId.code(i, h, r, copy), NodeId.code(j, h, s, copy))


@lru_cache(maxsize=32)
def _fixed_topology(params: CodeParams, t: int, copies: int):
    if t < 1:
        raise GraphError("need t >= 1")
    asm = _Assembler()
    for b in range(1, copies + 1):
        for i in range(1, t + 1):
            _add_base_copy(asm, params, i, b)
        _add_cross_edges(asm, params, t, b)
    return asm.finish()


def build_base_graph(params: CodeParams) -> LowerBoundGraph:
    """The base graph ``H``: clique ``A``, the code gadget, and ``v_m`` joined to ``Code \\ Code_m``."""
    nodes, adjacency, cliques = _fixed_topology(params, 1, 1)
    return LowerBoundGraph(params, 1, "linear", nodes, (1,) * len(nodes), adjacency, cliques)


def build_linear_fixed(params: CodeParams, t: int) -> LowerBoundGraph:
    nodes, adjacency, cliques = _fixed_topology(params, t, 1)
    return LowerBoundGraph(params, t, "linear", nodes, (1,) * len(nodes), adjacency, cliques)


def _check_instance(instance: DisjointnessInstance, t: int, shape: str, length: int) -> None:
    if instance.t != t:
        raise GraphError(f"instance has {instance.t} players, graph has {t}")
    if instance.shape != shape:
        raise GraphError(f"expected a {shape} instance, got {instance.shape}")
    if instance.length != length:
        raise GraphError(f"instance length {instance.length} != {length}")


def build_linear_instance(params: CodeParams, t: int, instance: DisjointnessInstance) -> LowerBoundGraph:
    """``G_x``: same topology as the fixed graph, heavy clique nodes where ``x^i_m = 1``."""
    _check_instance(instance, t, "linear", params.k)
    fixed = build_linear_fixed(params, t)
    weights = tuple(
        params.ell if v.is_clique and instance.bit(v.player, v.a) else 1 for v in fixed.nodes
    )
    return LowerBoundGraph(params, t, "linear", fixed.nodes, weights, fixed.adjacency, fixed.cliques, instance)


def build_quadratic_fixed(params: CodeParams, t: int) -> LowerBoundGraph:
    """``F``: two copies of the fixed linear graph, clique nodes weighted ``ell``, no input edges."""
    nodes, adjacency, cliques = _fixed_topology(params, t, 2)
    weights = tuple(params.ell if v.is_clique else 1 for v in nodes)
    return LowerBoundGraph(params, t, "quadratic", nodes, weights, adjacency, cliques)


def build_quadratic_instance(params: CodeParams, t: int, instance: DisjointnessInstance) -> LowerBoundGraph:
    """``F_x``: ``F`` plus ``v^(i,1)_m1 -- v^(i,2)_m2`` for every zero bit ``x^i_(m1,m2)``."""
    _check_instance(instance, t, "quadratic", params.k * params.k)
    if instance.k != params.k:
        raise GraphError(f"instance indexes [{instance.k}]^2, graph has k = {params.k}")
    fixed = build_quadratic_fixed(params, t)
    index = fixed.index
    adj = [list(a) for a in fixed.adjacency]
    for i in range(1, t + 1):
        x = instance.strings[i - 1]
        for flat in range(1, instance.length + 1):
            if not (x >> (flat - 1)) & 1:
                m1, m2 = unpair_index(params.k, flat)
                u = index[NodeId.clique(i, m1, 1)]
                v = index[NodeId.clique(i, m2, 2)]
                adj[u].append(v)
                adj[v].append(u)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    return LowerBoundGraph(
        params, t, "quadratic", fixed.nodes, fixed.weights, adjacency, fixed.cliques, instance
    )


def expand_unweighted(g: LowerBoundGraph) -> LowerBoundGraph:
    """Replace every node of weight ``w > 1`` by ``w`` unit nodes with the same neighbourhood.

    Heavy-light edges become stars and heavy-heavy edges become bicliques, so
    the copies of one node are pairwise non-adjacent twins.
    """
    if g.variant == "unweighted_expanded":
        raise GraphError("graph is already expanded")
    if g.variant not in ("linear", "quadratic"):
        raise GraphError(f"cannot expand variant {g.variant!r}")
    copies: list[list[NodeId]] = []
    for v, w in zip(g.nodes, g.weights):
        if w > 1:
            copies.append([NodeId(v.player, v.copy, v.role, v.a, v.b, j) for j in range(1, w + 1)])
        else:
            copies.append([v])
    nodes = tuple(sorted(x for c in copies for x in c))
    index = {v: i for i, v in enumerate(nodes)}
    ids = [[index[x] for x in c] for c in copies]
    adj: list[list[int]] = [[] for _ in nodes]
    for u, v in g.edges:
        for a in ids[u]:
            for b in ids[v]:
                adj[a].append(b)
                adj[b].append(a)
    cliques = []
    for c in g.cliques:
        depth = max(len(ids[u]) for u in c)
        for j in range(depth):
            layer = tuple(sorted(ids[u][j] for u in c if j < len(ids[u])))
            cliques.append(layer)
    return LowerBoundGraph(
        g.params,
        g.t,
        "unweighted_expanded",
        nodes,
        (1,) * len(nodes),
        tuple(tuple(sorted(a)) for a in adj),
        tuple(cliques),
        g.instance,
        source_variant=g.variant,
    )


def cut_edges(g: LowerBoundGraph) -> list[tuple[NodeId, NodeId]]:
    """Edges whose endpoints belong to different players, in lexicographic order."""
    part = g.partition
    return [(g.nodes[u], g.nodes[v]) for u, v in g.edges if part[u] != part[v]]


def cut_size(g: LowerBoundGraph) -> int:
    part = g.partition
    return sum(1 for u, v in g.edges if part[u] != part[v])


def expected_node_count(params: CodeParams, t: int, variant: str) -> int:
    per_player = params.k + params.q**2
    return t * per_player * (2 if variant == "quadratic" else 1)


def expected_cut_size(params: CodeParams, t: int, variant: str) -> int:
    q = params.q
    return math.comb(t, 2) * q * (q * q - q) * (2 if variant == "quadratic" else 1)


# -- family condition ------------------------------------------------------------


@dataclass
class FamilyConditionReport:
    pairs_checked: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _changed_players(a: DisjointnessInstance, b: DisjointnessInstance) -> list[int]:
    if (a.t, a.length, a.shape, a.k) != (b.t, b.length, b.shape, b.k):
        raise GraphError("instance pair has mismatched shapes")
    return [i for i in range(1, a.t + 1) if a.strings[i - 1] != b.strings[i - 1]]


def validate_family_condition1(
    builder: Callable[[CodeParams, int, DisjointnessInstance], LowerBoundGraph],
    t: int,
    params: CodeParams,
    instance_pairs: Iterable[tuple[DisjointnessInstance, DisjointnessInstance]],
) -> FamilyConditionReport:
    """Check that changing player ``i``'s string only changes weights in ``V^i``
    and edges inside ``V^i x V^i``.

    Each pair may differ in at most one player's string.
    """
    report = FamilyConditionReport()
    for x, y in instance_pairs:
        changed = _changed_players(x, y)
        if len(changed) > 1:
            raise GraphError(f"instance pair differs in players {changed}; expected at most one")
        owner = changed[0] if changed else None
        gx, gy = builder(params, t, x), builder(params, t, y)
        report.pairs_checked += 1
        if gx.nodes != gy.nodes:
            report.violations.append({"pair": (x.digest(), y.digest()), "reason": "node sets differ"})
            continue
        for v, wx, wy in zip(gx.nodes, gx.weights, gy.weights):
            if wx != wy and v.player != owner:
                report.violations.append(
                    {"pair": (x.digest(), y.digest()), "reason": "weight", "node": v.label(), "player": owner}
                )
        ex, ey = set(gx.edges), set(gy.edges)
        for u, v in sorted(ex ^ ey):
            pu, pv = gx.nodes[u].player, gx.nodes[v].player
            if not (pu == pv == owner):
                report.violations.append(
                    {
                        "pair": (x.digest(), y.digest()),
                        "reason": "edge",
                        "edge": (gx.nodes[u].label(), gx.nodes[v].label()),
                        "player": owner,
                    }
                )
    return report


# -- exports ---------------------------------------------------------------------


def to_json(g: LowerBoundGraph) -> dict:
    nodes = []
    for i, (v, w) in enumerate(zip(g.nodes, g.weights)):
        rec = {"id": i, **v.to_json(), "weight": w}
        nodes.append(rec)
    part: dict[str, list[int]] = {}
    for i, p in enumerate(g.partition):
        part.setdefault(str(p), []).append(i)
    cut = [[u, v] for u, v in g.edges if g.partition[u] != g.partition[v]]
    out = {
        "params": g.params.describe(),
        "t": g.t,
        "variant": g.variant,
        "nodes": nodes,
        "edges": [list(e) for e in g.edges],
        "partition": part,
        "cut": cut,
    }
    if g.instance is not None:
        out["instance"] = g.instance.to_json()
    return out


_PLAYER_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def to_dot(g: LowerBoundGraph, name: str = "G") -> str:
    """Graphviz source: one cluster per player, nested per copy and per clique.

    Cut edges are dashed, heavy nodes are drawn as double circles.
    """
    lines = [f"graph {name} {{", "  compound=true;", "  node [shape=circle, fontsize=9];"]
    groups: dict[int, dict[int, dict[tuple, list[int]]]] = {}
    for i, v in enumerate(g.nodes):
        key = ("A",) if v.is_clique else ("C", v.a)
        groups.setdefault(v.player, {}).setdefault(v.copy, {}).setdefault(key, []).append(i)
    for p, by_copy in sorted(groups.items()):
        color = _PLAYER_COLORS[(p - 1) % len(_PLAYER_COLORS)]
        lines.append(f"  subgraph cluster_p{p} {{")
        lines.append(f'    label="V^{p}"; color="{color}";')
        for b, by_key in sorted(by_copy.items()):
            lines.append(f"    subgraph cluster_p{p}_b{b} {{")
            lines.append(f'      label="V^({p},{b})"; style=dotted;')
            for key, members in sorted(by_key.items(), key=lambda kv: (kv[0][0], kv[0][1:] or (0,))):
                cname = f"cluster_p{p}_b{b}_{key[0]}{key[1] if len(key) > 1 else ''}"
                label = "A" if key[0] == "A" else f"C_{key[1]}"
                lines.append(f'      subgraph {cname} {{ label="{label}"; style=rounded;')
                for i in members:
                    v = g.nodes[i]
                    shape = "doublecircle" if g.weights[i] > 1 else "circle"
                    lines.append(
                        f'        n{i} [label="{v.label()}\\nw={g.weights[i]}", color="{color}", shape={shape}];'
                    )
                lines.append("      }")
            lines.append("    }")
        lines.append("  }")
    for u, v in g.edges:
        style = ' [style=dashed, color="gray40"]' if g.partition[u] != g.partition[v] else ""
        lines.append(f"  n{u} -- n{v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
