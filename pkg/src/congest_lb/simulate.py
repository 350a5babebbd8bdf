"""Synchronous CONGEST simulation and the shared-blackboard player simulation.

A node program (:class:`NodeProgram`) sees only its id, weight, neighbour
ids, ``n`` and a private seeded random tape.  Each round every node first
produces its outgoing messages from pre-round state, then all messages are
delivered.  A message is a string over ``{"0", "1"}`` of at most ``B`` bits.

:func:`run_congest` runs all nodes in one loop.  :func:`multiparty_simulate`
runs one :class:`_Player` per part of the node partition: messages between a
player's own nodes are delivered locally, every other message is written to a
:class:`Blackboard` and read back by the receiving player.  Only blackboard
writes are charged.
"""

from __future__ import annotations

import json
import math
import random
import zlib
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

from .codegadget import CodeParams
from .construct import LowerBoundGraph, build_linear_instance, build_quadratic_instance, cut_size
from .instances import DisjointnessInstance, verify_promise
from .mwis import solve_mwis
from .oracle import (
    linear_disjoint_threshold,
    linear_intersecting_threshold,
    quadratic_disjoint_threshold,
    quadratic_intersecting_threshold,
)

__all__ = [
    "Network",
    "NodeProgram",
    "AlgorithmSpec",
    "MessageRecord",
    "Transcript",
    "Blackboard",
    "SimulationError",
    "MessageTooLarge",
    "default_bits",
    "network_of",
    "run_congest",
    "multiparty_simulate",
    "flood_max_algorithm",
    "silent_algorithm",
    "chatter_algorithm",
    "gather_and_solve_algorithm",
    "ReductionResult",
    "family_beta",
    "reduction_protocol",
    "lower_bound_report",
    "ACCEPT",
    "REJECT",
]

ACCEPT = "ACCEPT"
REJECT = "REJECT"


class SimulationError(RuntimeError):
    pass


class MessageTooLarge(SimulationError):
    pass


class GraphLike(Protocol):
    n: int
    adjacency: Sequence[Sequence[int]]
    weights: Sequence[int]
    partition: Sequence[int]


@dataclass(frozen=True)
class Network:
    """Bare simulation input: dense ids ``0..n-1``, sorted neighbour lists, a player per node."""

    adjacency: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    partition: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @classmethod
    def from_edges(cls, n: int, edges, weights=None, partition=None) -> Network:
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise SimulationError("self-loop")
            adj[u].add(v)
            adj[v].add(u)
        return cls(
            tuple(tuple(sorted(a)) for a in adj),
            tuple(weights) if weights is not None else (1,) * n,
            tuple(partition) if partition is not None else (1,) * n,
        )


def network_of(g: GraphLike) -> Network:
    return Network(tuple(tuple(a) for a in g.adjacency), tuple(g.weights), tuple(g.partition))


def default_bits(n: int, multiplier: int = 1) -> int:
    """``ceil(log2 n)`` bits per message (at least one), times ``multiplier``."""
    return max(1, math.ceil(math.log2(n))) * multiplier if n > 1 else multiplier


class NodeProgram:
    """Per-node state machine; subclass and override the hooks."""

    def init(self, node_id: int, weight: int, neighbors: tuple[int, ...], n: int, bits: int, rng: random.Random) -> None:
        self.id = node_id
        self.weight = weight
        self.neighbors = neighbors
        self.n = n
        self.bits = bits
        self.rng = rng

    def send(self, rnd: int) -> dict[int, str]:
        return {}

    def receive(self, rnd: int, messages: dict[int, str]) -> None:
        pass

    def output(self):
        return None


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    program: Callable[[], NodeProgram]
    rounds: int | None = None
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MessageRecord:
    round: int
    src: int
    dst: int
    payload: str
    on_cut: bool

    def to_json(self) -> dict:
        return {"round": self.round, "from": self.src, "to": self.dst, "bits": self.payload, "on_cut": self.on_cut}


@dataclass
class Transcript:
    rounds_executed: int
    messages: list[MessageRecord]
    blackboard_bits: int
    node_outputs: dict[int, object]
    completed: bool
    bits_per_message: int
    cut_size: int

    def cut_payload_bits(self) -> int:
        return sum(len(m.payload) for m in self.messages if m.on_cut)

    def messages_in_round(self, rnd: int) -> list[MessageRecord]:
        return [m for m in self.messages if m.round == rnd]

    def summary(self) -> dict:
        return {
            "rounds": self.rounds_executed,
            "blackboard_bits": self.blackboard_bits,
            "messages": len(self.messages),
            "completed": self.completed,
            "bits_per_message": self.bits_per_message,
            "cut_size": self.cut_size,
            "outputs": {str(k): v for k, v in sorted(self.node_outputs.items())},
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(m.to_json()) + "\n" for m in self.messages)


def _node_rng(seed: int, node: int) -> random.Random:
    return random.Random(f"{seed}/{node}")


def _setup(g: GraphLike, alg: AlgorithmSpec, bits: int | None, max_rounds: int | None, seed: int):
    net = network_of(g)
    bits = default_bits(net.n) if bits is None else bits
    if bits < 1:
        raise SimulationError("need at least one bit per message")
    rounds = max_rounds if max_rounds is not None else alg.rounds
    if rounds is None or rounds < 1:
        raise SimulationError("need a positive round budget")
    programs = []
    for v in range(net.n):
        p = alg.program()
        p.init(v, net.weights[v], net.adjacency[v], net.n, bits, _node_rng(seed, v))
        programs.append(p)
    return net, bits, rounds, programs


def _checked_sends(net: Network, v: int, out: dict[int, str], bits: int) -> list[tuple[int, str]]:
    nbrs = net.adjacency[v]
    msgs = []
    for dst in sorted(out):
        payload = out[dst]
        if dst not in nbrs:
            raise SimulationError(f"node {v} sent to non-neighbour {dst}")
        if len(payload) > bits:
            raise MessageTooLarge(f"node {v} -> {dst}: {len(payload)} bits > B = {bits}")
        if payload.strip("01"):
            raise SimulationError(f"message from {v} is not a bit string")
        msgs.append((dst, payload))
    return msgs


def _cut_size(net: Network) -> int:
    return sum(1 for u, nb in enumerate(net.adjacency) for v in nb if u < v and net.partition[u] != net.partition[v])


def run_congest(
    g: GraphLike,
    alg: AlgorithmSpec,
    bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
) -> Transcript:
    """Run ``alg`` on ``g`` in lock-step rounds until every node has an output."""
    net, bits, rounds, programs = _setup(g, alg, bits, max_rounds, seed)
    part = net.partition
    log: list[MessageRecord] = []
    executed = 0
    done = False
    while executed < rounds and not done:
        executed += 1
        outgoing = [_checked_sends(net, v, programs[v].send(executed), bits) for v in range(net.n)]
        inbox: list[dict[int, str]] = [{} for _ in range(net.n)]
        for v, msgs in enumerate(outgoing):
            for dst, payload in msgs:
                inbox[dst][v] = payload
                log.append(MessageRecord(executed, v, dst, payload, part[v] != part[dst]))
        for v in range(net.n):
            programs[v].receive(executed, dict(sorted(inbox[v].items())))
        done = all(p.output() is not None for p in programs)
    outputs = {v: programs[v].output() for v in range(net.n)}
    board = sum(len(m.payload) for m in log if m.on_cut)
    return Transcript(executed, log, board, outputs, done, bits, _cut_size(net))


class Blackboard:
    """Append-only shared medium; every written bit is visible to every player."""

    def __init__(self):
        self.entries: list[tuple[int, int, int, str]] = []
        self.bits = 0

    def write(self, rnd: int, src: int, dst: int, payload: str) -> None:
        self.entries.append((rnd, src, dst, payload))
        self.bits += len(payload)

    def read(self, rnd: int, nodes: set[int]):
        for r, src, dst, payload in reversed(self.entries):
            if r != rnd:
                break
            if dst in nodes:
                yield src, dst, payload


class _Player:
    def __init__(self, pid: int, nodes: list[int], programs: list[NodeProgram]):
        self.pid = pid
        self.nodes = nodes
        self.node_set = set(nodes)
        self.programs = {v: programs[v] for v in nodes}
        self.log: list[MessageRecord] = []

    def play_sends(self, rnd: int, net: Network, bits: int, board: Blackboard) -> dict[int, dict[int, str]]:
        local: dict[int, dict[int, str]] = {v: {} for v in self.nodes}
        for v in self.nodes:
            for dst, payload in _checked_sends(net, v, self.programs[v].send(rnd), bits):
                if dst in self.node_set:
                    local[dst][v] = payload
                    self.log.append(MessageRecord(rnd, v, dst, payload, False))
                else:
                    board.write(rnd, v, dst, payload)
        return local

    def play_receives(self, rnd: int, local: dict[int, dict[int, str]], board: Blackboard) -> None:
        inbox = local
        for src, dst, payload in board.read(rnd, self.node_set):
            inbox[dst][src] = payload
        for v in self.nodes:
            self.programs[v].receive(rnd, dict(sorted(inbox[v].items())))

    def outputs(self) -> dict[int, object]:
        return {v: p.output() for v, p in self.programs.items()}


def multiparty_simulate(
    g: GraphLike,
    alg: AlgorithmSpec,
    bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
) -> Transcript:
    """Players jointly simulate ``alg``: player ``i`` runs the nodes of ``V^i``.

    ``blackboard_bits`` is the number of bits written to the blackboard,
    i.e. the payload of every message crossing the player partition.
    """
    net, bits, rounds, programs = _setup(g, alg, bits, max_rounds, seed)
    by_player: dict[int, list[int]] = {}
    for v, p in enumerate(net.partition):
        by_player.setdefault(p, []).append(v)
    players = [_Player(pid, nodes, programs) for pid, nodes in sorted(by_player.items())]
    board = Blackboard()
    executed = 0
    done = False
    while executed < rounds and not done:
        executed += 1
        locals_ = [pl.play_sends(executed, net, bits, board) for pl in players]
        for pl, local in zip(players, locals_):
            pl.play_receives(executed, local, board)
        done = all(out is not None for pl in players for out in pl.outputs().values())
    outputs: dict[int, object] = {}
    for pl in players:
        outputs.update(pl.outputs())
    log = [m for pl in players for m in pl.log]
    log += [MessageRecord(r, s, d, p, True) for r, s, d, p in board.entries]
    log.sort(key=lambda m: (m.round, m.src, m.dst))
    return Transcript(executed, log, board.bits, dict(sorted(outputs.items())), done, bits, _cut_size(net))


# -- reference algorithms ------------------------------------------------------------


class _Silent(NodeProgram):
    def output(self):
        return "DONE"


def silent_algorithm() -> AlgorithmSpec:
    """Outputs immediately and never sends."""
    return AlgorithmSpec("silent", _Silent, rounds=1)


class _FloodMax(NodeProgram):
    def __init__(self, rounds: int):
        self.budget = rounds

    def init(self, *args):
        super().init(*args)
        self.best = self.id
        self.dirty = True
        self.done_rounds = 0

    def send(self, rnd):
        if not self.dirty:
            return {}
        self.dirty = False
        word = format(self.best, f"0{self.bits}b")
        return {u: word for u in self.neighbors}

    def receive(self, rnd, messages):
        for payload in messages.values():
            val = int(payload, 2)
            if val > self.best:
                self.best = val
                self.dirty = True
        self.done_rounds = rnd

    def output(self):
        return self.best if self.done_rounds >= self.budget else None


def flood_max_algorithm(rounds: int) -> AlgorithmSpec:
    """Every node learns the largest id within distance ``rounds`` and outputs it."""
    return AlgorithmSpec("flood_max", lambda: _FloodMax(rounds), rounds=rounds, params={"rounds": rounds})


class _Chatter(NodeProgram):
    def __init__(self, rounds: int, p_send: float):
        self.budget = rounds
        self.p_send = p_send
        self.digest = 0
        self.last = 0

    def send(self, rnd):
        out = {}
        for u in self.neighbors:
            if self.rng.random() < self.p_send:
                length = self.rng.randint(0, self.bits)
                bits = "".join("1" if self.rng.random() < 0.5 else "0" for _ in range(length))
                # the reply depends on what was heard, so delivery errors propagate
                if bits and self.digest & 1:
                    bits = bits[::-1]
                out[u] = bits
        return out

    def receive(self, rnd, messages):
        for src, payload in messages.items():
            self.digest = zlib.crc32(f"{rnd}:{src}:{payload}".encode(), self.digest)
        self.last = rnd

    def output(self):
        return self.digest if self.last >= self.budget else None


def chatter_algorithm(rounds: int, p_send: float = 0.5) -> AlgorithmSpec:
    """Random traffic from each node's tape; the output digests everything received."""
    return AlgorithmSpec(
        "chatter", lambda: _Chatter(rounds, p_send), rounds=rounds, params={"rounds": rounds, "p_send": p_send}
    )


# -- gather and solve -------------------------------------------------------------

# Framing: every directed edge carries a bit stream cut into <= B-bit messages.
# A record is a 3-bit tag and a payload; ids are W = ceil(log2 n) bits,
# weights are Elias-gamma coded.
_JOIN, _CHILD, _NOTCHILD, _NODE, _EDGE, _END, _VERDICT = range(7)
_TAG_BITS = 3


def _gamma(w: int) -> str:
    b = format(w, "b")
    return "0" * (len(b) - 1) + b


def _parse_gamma(buf: str, pos: int):
    zeros = 0
    while pos + zeros < len(buf) and buf[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(buf):
        return None
    return int(buf[pos + zeros : end], 2), end


def encode_record(tag: int, id_bits: int, *fields: int) -> str:
    head = format(tag, f"0{_TAG_BITS}b")
    if tag == _NODE:
        node, weight = fields
        return head + format(node, f"0{id_bits}b") + _gamma(weight)
    if tag == _EDGE:
        u, v = fields
        return head + format(u, f"0{id_bits}b") + format(v, f"0{id_bits}b")
    if tag == _VERDICT:
        return head + str(fields[0])
    return head


def parse_record(buf: str, id_bits: int):
    """One complete record from the front of ``buf`` as ``(tag, fields, used)``, or ``None``."""
    if len(buf) < _TAG_BITS:
        return None
    tag = int(buf[:_TAG_BITS], 2)
    pos = _TAG_BITS
    if tag == _NODE:
        if len(buf) < pos + id_bits:
            return None
        node = int(buf[pos : pos + id_bits], 2)
        got = _parse_gamma(buf, pos + id_bits)
        if got is None:
            return None
        weight, end = got
        return tag, (node, weight), end
    if tag == _EDGE:
        end = pos + 2 * id_bits
        if len(buf) < end:
            return None
        return tag, (int(buf[pos : pos + id_bits], 2), int(buf[pos + id_bits : end], 2)), end
    if tag == _VERDICT:
        if len(buf) < pos + 1:
            return None
        return tag, (int(buf[pos]),), pos + 1
    if tag in (_JOIN, _CHILD, _NOTCHILD, _END):
        return tag, (), pos
    raise SimulationError(f"corrupt stream: tag {tag}")


class _GatherSolve(NodeProgram):
    """BFS tree from the leader (largest id), convergecast of node and edge
    records, exact solve at the leader, verdict broadcast down the tree."""

    def __init__(self, beta: int):
        self.beta = beta

    def init(self, *args):
        super().init(*args)
        self.id_bits = max(1, math.ceil(math.log2(self.n))) if self.n > 1 else 1
        self.out: dict[int, str] = {u: "" for u in self.neighbors}
        self.inbuf: dict[int, str] = {u: "" for u in self.neighbors}
        self.leader = self.n - 1
        self.joined = False
        self.parent: int | None = None
        self.pending: set[int] = set()
        self.children: set[int] = set()
        self.ended: set[int] = set()
        self.finished = False
        self.verdict = None
        self.mwis_weight: int | None = None
        self.nodes: dict[int, int] = {}
        self.edges: set[tuple[int, int]] = set()
        if self.id == self.leader:
            self._join(None)

    def _push(self, dst: int, tag: int, *fields: int) -> None:
        self.out[dst] += encode_record(tag, self.id_bits, *fields)

    def _up(self, tag: int, *fields: int) -> None:
        if self.id == self.leader:
            if tag == _NODE:
                self.nodes[fields[0]] = fields[1]
            elif tag == _EDGE:
                self.edges.add(tuple(fields))
        else:
            self._push(self.parent, tag, *fields)

    def _join(self, parent: int | None) -> None:
        self.joined = True
        self.parent = parent
        if parent is not None:
            self._push(parent, _CHILD)
        self.pending = {u for u in self.neighbors if u != parent}
        for u in sorted(self.pending):
            self._push(u, _JOIN)
        self._up(_NODE, self.id, self.weight)
        for u in self.neighbors:
            if u > self.id:
                self._up(_EDGE, self.id, u)

    def send(self, rnd):
        msgs = {}
        for u in self.neighbors:
            if self.out[u]:
                msgs[u], self.out[u] = self.out[u][: self.bits], self.out[u][self.bits :]
        return msgs

    def receive(self, rnd, messages):
        for src, payload in messages.items():
            self.inbuf[src] += payload
            while True:
                got = parse_record(self.inbuf[src], self.id_bits)
                if got is None:
                    break
                tag, fields, used = got
                self.inbuf[src] = self.inbuf[src][used:]
                self._handle(src, tag, fields)
        self._maybe_finish()

    def _handle(self, src: int, tag: int, fields: tuple) -> None:
        if tag == _JOIN:
            if self.joined:
                self._push(src, _NOTCHILD)
            else:
                self._join(src)
        elif tag == _CHILD:
            self.children.add(src)
            self.pending.discard(src)
        elif tag == _NOTCHILD:
            self.pending.discard(src)
        elif tag in (_NODE, _EDGE):
            self._up(tag, *fields)
        elif tag == _END:
            self.ended.add(src)
        elif tag == _VERDICT:
            self._decide(fields[0])

    def _maybe_finish(self) -> None:
        if not self.joined or self.finished or self.pending or self.ended != self.children:
            return
        self.finished = True
        if self.id != self.leader:
            self._push(self.parent, _END)
            return
        if len(self.nodes) != self.n:
            # disconnected network: the leader cannot see every node
            self.verdict = "INCOMPLETE"
            return
        ids = sorted(self.nodes)
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        res = solve_mwis([self.nodes[v] for v in ids], adj, guard=max(self.n, 1))
        self.mwis_weight = res.weight
        self._decide(1 if res.weight >= self.beta else 0)

    def _decide(self, bit: int) -> None:
        self.verdict = ACCEPT if bit else REJECT
        for c in sorted(self.children):
            self._push(c, _VERDICT, bit)

    def output(self):
        return self.verdict


def gather_and_solve_algorithm(beta: int, gamma: float | None = None, rounds: int = 100_000) -> AlgorithmSpec:
    """Exact decider for the gap predicate ``MWIS >= beta`` vs ``MWIS <= gamma * beta``.

    Every node outputs ``ACCEPT`` iff the maximum-weight independent set has
    weight at least ``beta``.  ``gamma`` is recorded for reports only.
    """
    return AlgorithmSpec(
        "gather_and_solve", lambda: _GatherSolve(beta), rounds=rounds, params={"beta": beta, "gamma": gamma}
    )


# -- reduction ----------------------------------------------------------------------


@dataclass
class ReductionResult:
    verdict: str
    ground_truth: str
    blackboard_bits: int
    rounds: int
    cut_size: int
    bits_per_message: int
    beta: int
    gamma: float | None
    transcript: Transcript

    @property
    def correct(self) -> bool:
        return self.verdict == self.ground_truth

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "ground_truth": self.ground_truth,
            "correct": self.correct,
            "blackboard_bits": self.blackboard_bits,
            "rounds": self.rounds,
            "cut_size": self.cut_size,
            "bits_per_message": self.bits_per_message,
            "beta": self.beta,
            "gamma": self.gamma,
        }


def family_beta(params: CodeParams, t: int, family: str) -> int:
    if family == "linear":
        return linear_intersecting_threshold(params, t)
    if family == "quadratic":
        return quadratic_intersecting_threshold(params, t)
    raise SimulationError(f"unknown family {family!r}")


def reduction_protocol(
    params: CodeParams,
    t: int,
    instance: DisjointnessInstance,
    family: str = "linear",
    alg: AlgorithmSpec | None = None,
    bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
    reject_threshold: int | None = None,
) -> ReductionResult:
    """Decide promise pairwise disjointness by simulating a CONGEST decider on ``G_x``/``F_x``.

    The players build the graph (each from its own string), simulate ``alg``
    (default: gather-and-solve at the family's intersecting threshold), and
    answer ``"intersecting"`` on ACCEPT, ``"disjoint"`` on REJECT.
    ``reject_threshold`` is the disjoint-side weight bound used to report the
    gap ratio; it defaults to the family's disjoint bound when that lies
    below ``beta``.
    """
    truth = verify_promise(instance)
    if not (truth.intersecting or truth.disjoint):
        raise SimulationError("instance violates the promise")
    if family == "linear":
        g = build_linear_instance(params, t, instance)
    elif family == "quadratic":
        g = build_quadratic_instance(params, t, instance)
    else:
        raise SimulationError(f"unknown family {family!r}")
    if not g.is_connected():
        raise SimulationError("the constructed graph is disconnected; a CONGEST decider cannot see all of it")
    beta = family_beta(params, t, family)
    if reject_threshold is None:
        bound = (linear_disjoint_threshold if family == "linear" else quadratic_disjoint_threshold)(params, t)
        reject_threshold = bound if bound < beta else None
    gamma = reject_threshold / beta if reject_threshold is not None else None
    if alg is None:
        alg = gather_and_solve_algorithm(beta, gamma)
    tr = multiparty_simulate(g, alg, bits, max_rounds, seed)
    if not tr.completed:
        raise SimulationError(f"algorithm did not terminate within {tr.rounds_executed} rounds")
    verdicts = set(tr.node_outputs.values())
    if len(verdicts) != 1 or not verdicts <= {ACCEPT, REJECT}:
        raise SimulationError(f"nodes disagree or are undecided: {sorted(map(str, verdicts))}")
    verdict = "intersecting" if verdicts == {ACCEPT} else "disjoint"
    return ReductionResult(
        verdict,
        "intersecting" if truth.intersecting else "disjoint",
        tr.blackboard_bits,
        tr.rounds_executed,
        tr.cut_size,
        tr.bits_per_message,
        beta,
        gamma,
        tr,
    )


def lower_bound_report(params: CodeParams, t: int, g: LowerBoundGraph, bits: int | None = None) -> dict:
    """Constant-free quantities of the round lower bound for graph ``g``.

    ``ratio = len / (t log2 t * |cut| * log2 |V|)`` with the measured cut, next
    to the same ratio using the cut size ``t^2 log2^2 k`` stated for the
    construction.
    """
    family = g.source_variant or g.variant
    length = params.k * params.k if family == "quadratic" else params.k
    t_log_t = t * math.log2(t) if t > 1 else 0.0
    measured = cut_size(g)
    log_v = math.log2(g.n)
    stated = t * t * math.log2(params.k) ** 2
    denom = t_log_t * measured * log_v
    denom_stated = t_log_t * stated * log_v
    return {
        "family": family,
        "params": params.describe(),
        "t": t,
        "n": g.n,
        "len": length,
        "t_log_t": t_log_t,
        "cut_measured": measured,
        "cut_stated": stated,
        "cut_discrepancy": measured - stated,
        "log_V": log_v,
        "bits_per_message": bits if bits is not None else default_bits(g.n),
        "ratio": length / denom if denom else math.inf,
        "ratio_stated_cut": length / denom_stated if denom_stated else math.inf,
    }
