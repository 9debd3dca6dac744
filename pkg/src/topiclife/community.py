"""Modularity communities on the follower subgraph (BGLL / Louvain).

Louvain runs the classic two phases -- greedy local moving, then graph
aggregation -- until modularity stops improving.  Node visit order is
shuffled by a seeded generator and ties break to the lowest community id,
so results are deterministic given (graph, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from topiclife.corpus import SocialGraph
from topiclife.errors import ContractViolation


@dataclass
class Partition:
    """Node-to-community assignment with ids contiguous from 0."""

    assignment: dict[str, int]
    modularity_trace: list[float] = field(default_factory=list)

    @property
    def community_count(self) -> int:
        return len(set(self.assignment.values())) if self.assignment else 0

    def communities(self) -> dict[int, set[str]]:
        out: dict[int, set[str]] = {}
        for node, cid in self.assignment.items():
            out.setdefault(cid, set()).add(node)
        return out

    def sizes(self) -> dict[int, int]:
        return {cid: len(members) for cid, members in self.communities().items()}


def modularity(graph: SocialGraph, partition: Mapping[str, int], resolution: float = 1.0) -> float:
    """Newman modularity Q of a node partition on an unweighted undirected graph.

    Q = sum over communities of [e_c/m - resolution*(d_c/2m)^2] where e_c is
    the number of intra-community edges and d_c the total degree.
    """
    m = graph.edge_count
    if m == 0:
        raise ContractViolation("modularity undefined on an edgeless graph")
    missing = graph.nodes - partition.keys()
    if missing:
        raise ContractViolation(f"partition does not cover nodes {sorted(missing)[:5]}")
    intra: dict[int, int] = {}
    degree: dict[int, int] = {}
    for node in graph.adjacency:
        cid = partition[node]
        degree[cid] = degree.get(cid, 0) + graph.degree(node)
    for a, b in graph.edges():
        if partition[a] == partition[b]:
            cid = partition[a]
            intra[cid] = intra.get(cid, 0) + 1
    q = 0.0
    for cid, deg in degree.items():
        q += intra.get(cid, 0) / m - resolution * (deg / (2.0 * m)) ** 2
    return q


def _local_moving(
    adj: list[dict[int, float]],
    self_loops: list[float],
    node2com: list[int],
    two_m: float,
    resolution: float,
    rng: np.random.Generator,
) -> bool:
    """One complete local-moving phase; returns True if any node moved."""
    n = len(adj)
    degree = [sum(adj[i].values()) + 2.0 * self_loops[i] for i in range(n)]
    com_tot = [0.0] * n
    for i in range(n):
        com_tot[node2com[i]] += degree[i]

    moved_any = False
    improving = True
    while improving:
        improving = False
        order = rng.permutation(n)
        for i in order:
            com_i = node2com[i]
            # weight from i to each neighboring community, excluding self
            w_to_com: dict[int, float] = {}
            for j, w in adj[i].items():
                if j != i:
                    w_to_com[node2com[j]] = w_to_com.get(node2com[j], 0.0) + w
            com_tot[com_i] -= degree[i]

            def score(c: int) -> float:
                return w_to_com.get(c, 0.0) - resolution * degree[i] * com_tot[c] / two_m

            best_com = com_i
            best_score = score(com_i)
            for c in sorted(w_to_com):
                s = score(c)
                if s > best_score + 1e-12 or (abs(s - best_score) <= 1e-12 and c < best_com):
                    best_com, best_score = c, s
            com_tot[best_com] += degree[i]
            if best_com != com_i:
                node2com[i] = best_com
                improving = True
                moved_any = True
    return moved_any


def _kl_refine_pass(
    adj: list[dict[int, float]],
    node2com: list[int],
    two_m: float,
    resolution: float,
    rng: np.random.Generator,
) -> float:
    """One Kernighan-Lin style pass over the flat partition.

    Every node is moved once to its best neighboring community even when the
    move lowers Q; the pass then keeps only the prefix of moves with the
    highest cumulative gain.  This crosses the two-move barriers that pure
    greedy local moving cannot (e.g. a pair community whose members belong
    in two different neighboring communities).  Returns the kept gain in
    score units (proportional to delta-Q); 0.0 means the pass was reverted.
    """
    n = len(adj)
    degree = [sum(adj[i].values()) for i in range(n)]
    com_tot: dict[int, float] = {}
    for i in range(n):
        com_tot[node2com[i]] = com_tot.get(node2com[i], 0.0) + degree[i]

    moves: list[tuple[int, int, int]] = []  # (node, old community, new community)
    cumulative = 0.0
    best_cumulative = 0.0
    best_prefix = 0
    for i in rng.permutation(n):
        com_i = node2com[i]
        w_to_com: dict[int, float] = {}
        for j, w in adj[i].items():
            if j != i:
                w_to_com[node2com[j]] = w_to_com.get(node2com[j], 0.0) + w
        com_tot[com_i] -= degree[i]

        def score(c: int) -> float:
            return w_to_com.get(c, 0.0) - resolution * degree[i] * com_tot.get(c, 0.0) / two_m

        candidates = sorted(c for c in w_to_com if c != com_i)
        if not candidates:
            com_tot[com_i] += degree[i]
            continue
        best_com = candidates[0]
        best_score = score(best_com)
        for c in candidates[1:]:
            s = score(c)
            if s > best_score + 1e-12:
                best_com, best_score = c, s
        cumulative += best_score - score(com_i)
        com_tot[best_com] = com_tot.get(best_com, 0.0) + degree[i]
        node2com[i] = best_com
        moves.append((int(i), com_i, best_com))
        if cumulative > best_cumulative + 1e-12:
            best_cumulative = cumulative
            best_prefix = len(moves)

    for node, old, new in reversed(moves[best_prefix:]):
        node2com[node] = old
        com_tot[new] -= degree[node]
        com_tot[old] += degree[node]
    return best_cumulative


def _kl_refine_exact(
    adj: list[dict[int, float]],
    node2com: list[int],
    two_m: float,
    resolution: float,
) -> float:
    """Kernighan-Lin pass choosing the globally best move at every step.

    Each node moves exactly once, always via the single best (node, target
    community) move among the nodes not yet moved -- negative moves included
    -- and the best prefix of the sequence is kept.  O(n * E), so it is only
    applied to reasonably small flat graphs; the permutation-order variant
    above is the cheap fallback for large ones.
    """
    n = len(adj)
    degree = [sum(adj[i].values()) for i in range(n)]
    com_tot: dict[int, float] = {}
    for i in range(n):
        com_tot[node2com[i]] = com_tot.get(node2com[i], 0.0) + degree[i]

    def best_move(i: int) -> tuple[float, int] | None:
        com_i = node2com[i]
        w_to_com: dict[int, float] = {}
        for j, w in adj[i].items():
            if j != i:
                w_to_com[node2com[j]] = w_to_com.get(node2com[j], 0.0) + w
        candidates = sorted(c for c in w_to_com if c != com_i)
        if not candidates:
            return None
        tot_i = com_tot[com_i] - degree[i]
        stay = w_to_com.get(com_i, 0.0) - resolution * degree[i] * tot_i / two_m
        best: tuple[float, int] | None = None
        for c in candidates:
            s = w_to_com[c] - resolution * degree[i] * com_tot.get(c, 0.0) / two_m
            if best is None or s - stay > best[0] + 1e-12:
                best = (s - stay, c)
        return best

    unmoved = set(range(n))
    moves: list[tuple[int, int, int]] = []
    cumulative = 0.0
    best_cumulative = 0.0
    best_prefix = 0
    while unmoved:
        step: tuple[float, int, int] | None = None  # (gain, node, target)
        for i in sorted(unmoved):
            cand = best_move(i)
            if cand is not None and (step is None or cand[0] > step[0] + 1e-12):
                step = (cand[0], i, cand[1])
        if step is None:
            break
        gain, i, target = step
        old = node2com[i]
        com_tot[old] -= degree[i]
        com_tot[target] = com_tot.get(target, 0.0) + degree[i]
        node2com[i] = target
        unmoved.discard(i)
        moves.append((i, old, target))
        cumulative += gain
        if cumulative > best_cumulative + 1e-12:
            best_cumulative = cumulative
            best_prefix = len(moves)

    for node, old, new in reversed(moves[best_prefix:]):
        node2com[node] = old
        com_tot[new] -= degree[node]
        com_tot[old] += degree[node]
    return best_cumulative


def _aggregate(
    adj: list[dict[int, float]],
    self_loops: list[float],
    node2com: list[int],
) -> tuple[list[dict[int, float]], list[float], dict[int, int]]:
    """Collapse communities into super-nodes, summing edge weights."""
    coms = sorted(set(node2com))
    remap = {c: i for i, c in enumerate(coms)}
    k = len(coms)
    new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
    new_loops = [0.0] * k
    for i, neighbors in enumerate(adj):
        ci = remap[node2com[i]]
        new_loops[ci] += self_loops[i]
        for j, w in neighbors.items():
            cj = remap[node2com[j]]
            if ci == cj:
                if i < j:
                    new_loops[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
    return new_adj, new_loops, remap


def _working_modularity(
    adj: list[dict[int, float]],
    self_loops: list[float],
    node2com: list[int],
    two_m: float,
    resolution: float,
) -> float:
    n = len(adj)
    degree = [sum(adj[i].values()) + 2.0 * self_loops[i] for i in range(n)]
    intra: dict[int, float] = {}
    tot: dict[int, float] = {}
    for i in range(n):
        c = node2com[i]
        tot[c] = tot.get(c, 0.0) + degree[i]
        intra[c] = intra.get(c, 0.0) + 2.0 * self_loops[i]
        for j, w in adj[i].items():
            if node2com[j] == c:
                intra[c] = intra.get(c, 0.0) + w
    q = 0.0
    for c in tot:
        q += intra.get(c, 0.0) / two_m - resolution * (tot[c] / two_m) ** 2
    return q


def _louvain_once(
    base_adj: list[dict[int, float]],
    n_nodes: int,
    two_m: float,
    resolution: float,
    rng: np.random.Generator,
) -> tuple[list[int], list[float]]:
    """One full Louvain hierarchy; returns (membership, per-phase Q trace)."""
    adj = [dict(neigh) for neigh in base_adj]
    self_loops = [0.0] * n_nodes
    node2com = list(range(n_nodes))
    membership = list(range(n_nodes))  # original node -> current community label
    trace: list[float] = []

    while True:
        moved = _local_moving(adj, self_loops, node2com, two_m, resolution, rng)
        trace.append(_working_modularity(adj, self_loops, node2com, two_m, resolution))
        if not moved and len(trace) > 1:
            break
        adj, self_loops, remap = _aggregate(adj, self_loops, node2com)
        membership = [remap[node2com[membership[i]]] for i in range(n_nodes)]
        node2com = list(range(len(adj)))
        if not moved:
            break
    return membership, trace


def detect_communities(
    graph: SocialGraph, seed: int = 0, resolution: float = 1.0, restarts: int = 5
) -> Partition:
    """Louvain community detection; deterministic given (graph, seed).

    The greedy hierarchy is restarted `restarts` times with different seeded
    visit orders and the highest-modularity result wins (first on ties),
    which substantially reduces the chance of a poor local optimum on small
    graphs.  On an edgeless graph every node is its own community and the
    modularity trace stays empty (Q undefined).
    """
    if graph.node_count == 0:
        raise ContractViolation("cannot detect communities on an empty graph")
    nodes = sorted(graph.nodes)
    if graph.edge_count == 0:
        return Partition({node: i for i, node in enumerate(nodes)}, [])

    index = {node: i for i, node in enumerate(nodes)}
    adj: list[dict[int, float]] = [dict() for _ in nodes]
    for a, b in graph.edges():
        ia, ib = index[a], index[b]
        adj[ia][ib] = adj[ia].get(ib, 0.0) + 1.0
        adj[ib][ia] = adj[ib].get(ia, 0.0) + 1.0
    two_m = 2.0 * graph.edge_count

    rng = np.random.default_rng(seed)
    membership: list[int] = []
    trace: list[float] = []
    best_q = -np.inf
    for _ in range(max(1, restarts)):
        cand_membership, cand_trace = _louvain_once(adj, len(nodes), two_m, resolution, rng)
        if cand_trace[-1] > best_q + 1e-12:
            best_q = cand_trace[-1]
            membership, trace = cand_membership, cand_trace

    # Kernighan-Lin refinement on the flat partition, alternating with plain
    # local moving, until neither finds an improvement
    labels = list(membership)
    no_loops = [0.0] * len(nodes)
    exact_kl = len(nodes) <= 2048
    for _ in range(20):
        if exact_kl:
            gained = _kl_refine_exact(adj, labels, two_m, resolution)
        else:
            gained = _kl_refine_pass(adj, labels, two_m, resolution, rng)
        if gained <= 1e-12:
            break
        _local_moving(adj, no_loops, labels, two_m, resolution, rng)
    refined_q = _working_modularity(adj, no_loops, labels, two_m, resolution)
    if refined_q > trace[-1] + 1e-12:
        membership = labels
        trace.append(refined_q)

    # contiguous ids in order of first appearance over sorted node order
    relabel: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for i, node in enumerate(nodes):
        c = membership[i]
        if c not in relabel:
            relabel[c] = len(relabel)
        assignment[node] = relabel[c]
    return Partition(assignment, trace)


def community_of(partition: Partition, user: str) -> int | None:
    """Community id for a user, or None when the user is not in the graph."""
    return partition.assignment.get(user)
