"""Synchronous message-passing simulation of the fusion-center protocol.

Each :class:`FusionNode` holds only its own vertex sets, its slice of the
objective and the current values on its boundary ``D_{c,R,2m} \\ D_{c,R}``.
A round is: every node solves its local problem, sends its core values to
each out-neighbor, then consumes exactly one message from each in-neighbor
(ascending sender order) and refreshes its boundary. Phases are separated
by a barrier, so the result does not depend on the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dac import InnerConfig, LocalProblem, local_slice
from .partition import Partition


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class Message:
    sender: int
    receiver: int
    round: int
    vertices: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.vertices)


class FusionNode:
    def __init__(self, sl, out_neighbors, in_neighbors, x0_halo, inner: InnerConfig):
        self.id = sl.center
        self.problem = LocalProblem(sl, inner)
        self.governing = sl.governing
        self.extended = sl.extended
        self.terms = sl.terms
        self.halo = sl.halo
        self.boundary = sl.boundary
        self.out_neighbors = tuple(int(c) for c in out_neighbors)
        self.in_neighbors = tuple(int(c) for c in in_neighbors)
        x0_halo = np.asarray(x0_halo, dtype=float)
        self.boundary_values = x0_halo[np.searchsorted(self.halo, self.boundary)]
        self.w = x0_halo[np.searchsorted(self.halo, self.extended)]
        self.inbox: list[Message] = []
        self.round = 0

    def core_values(self) -> np.ndarray:
        return self.w[self.problem.core_pos]

    def solve(self):
        self.w, _ = self.problem.solve(self.boundary_values, self.w)

    def outgoing(self, n: int) -> list[Message]:
        vals = self.core_values()
        return [Message(self.id, dst, n, self.governing, vals) for dst in self.out_neighbors]

    def consume(self, n: int):
        got = sorted(self.inbox, key=lambda msg: msg.sender)
        senders = [msg.sender for msg in got]
        if tuple(senders) != self.in_neighbors or any(msg.round != n for msg in got):
            missing = sorted(set(self.in_neighbors) - set(senders))
            extra = sorted(set(senders) - set(self.in_neighbors))
            raise ProtocolError(f"round {n}, node {self.id}: missing messages from {missing}, "
                                f"unexpected from {extra}")
        fresh = self.boundary_values.copy()
        for msg in got:
            pos = np.searchsorted(self.boundary, msg.vertices)
            pos = np.minimum(pos, max(len(self.boundary) - 1, 0))
            hit = self.boundary[pos] == msg.vertices if len(self.boundary) else np.zeros(0, bool)
            fresh[pos[hit]] = msg.values[hit]
        self.boundary_values = fresh
        self.inbox = []
        self.round = n + 1


@dataclass
class RoundLog:
    round: int
    counts: list = field(default_factory=list)  # (sender, receiver, n_entries)

    @property
    def n_messages(self):
        return len(self.counts)

    @property
    def max_payload(self):
        return max((k for _, _, k in self.counts), default=0)


class Network:
    def __init__(self, nodes: dict, workers: int = 1):
        self.nodes = nodes
        self.order = sorted(nodes)
        self.workers = workers
        self.logs: list[RoundLog] = []
        self.n = sum(len(nd.governing) for nd in nodes.values())

    def _map(self, fn):
        if self.workers <= 1:
            for c in self.order:
                fn(self.nodes[c])
        else:
            with ThreadPoolExecutor(self.workers) as pool:
                list(pool.map(lambda c: fn(self.nodes[c]), self.order))

    def run_round(self, n: int):
        rounds = {nd.round for nd in self.nodes.values()}
        if rounds != {n}:
            raise ProtocolError(f"nodes are not synchronized at round {n}: {sorted(rounds)}")
        self._map(FusionNode.solve)
        log = RoundLog(n)
        for c in self.order:
            for msg in self.nodes[c].outgoing(n):
                if msg.receiver not in self.nodes:
                    raise ProtocolError(f"round {n}: no node {msg.receiver} for edge "
                                        f"{msg.sender}->{msg.receiver}")
                self.nodes[msg.receiver].inbox.append(msg)
                log.counts.append((msg.sender, msg.receiver, len(msg)))
        self._map(lambda nd: nd.consume(n))
        self.logs.append(log)

    def assemble(self) -> np.ndarray:
        """Concatenate every node's core values into a global vector."""
        x = np.empty(self.n)
        for c in self.order:
            nd = self.nodes[c]
            x[nd.governing] = nd.core_values()
        return x

    def run(self, T: int, history: bool = False):
        """Rounds ``0..T``; returns ``x^{T+1}`` (and every ``x^{n+1}`` if asked)."""
        start = self.nodes[self.order[0]].round
        seen = []
        for n in range(start, start + T + 1):
            self.run_round(n)
            if history:
                seen.append(self.assemble())
        x = self.assemble()
        return (x, seen) if history else x

    def message_log(self) -> str:
        lines = [f"{log.round} {s} {r} {k}" for log in self.logs for s, r, k in log.counts]
        return "\n".join(lines) + ("\n" if lines else "")

    @property
    def max_payload(self) -> int:
        return max((log.max_payload for log in self.logs), default=0)


def setup_network(obj, part: Partition, x0=None, *, inner: InnerConfig = InnerConfig(),
                  workers: int = 1) -> Network:
    """Ship each center its local slice and the initial values on its halo."""
    if obj.m != part.m:
        raise ProtocolError(f"partition built with m={part.m}, objective has m={obj.m}")
    x0 = np.zeros(obj.n) if x0 is None else np.asarray(x0, dtype=float)
    centers = {int(c) for c in part.centers}
    for c in centers:
        for d in part.out_neighbors[c]:
            if int(d) not in centers or c not in part.in_neighbors[int(d)]:
                raise ProtocolError(f"inconsistent partition at edge {c}->{int(d)}")
    counts = np.zeros(obj.n, dtype=np.int64)
    for c in centers:
        counts[part.governing[c]] += 1
    if np.any(counts != 1):
        raise ProtocolError("inconsistent partition: governing sets do not partition V")
    nodes = {}
    for c in sorted(centers):
        sl = local_slice(obj, part, c)
        nodes[c] = FusionNode(sl, part.out_neighbors[c], part.in_neighbors[c],
                              x0[sl.halo], inner)
    return Network(nodes, workers)
