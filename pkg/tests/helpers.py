"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's word-parallel and
matrix-composition code paths: the scalar evaluator walks one pattern
at a time through plain Python dicts, and the CNF oracle enumerates
assignments with numpy.
"""

from __future__ import annotations

import random

import numpy as np

from stpsweep import Network


# ---------------------------------------------------------------------------
# Scalar reference evaluation (independent of stpsweep.simulate).


def eval_assignment(net: Network, assignment: dict[int, bool]) -> dict[int, bool]:
    """Evaluate every live node under one PI assignment, scalar walk."""
    values: dict[int, bool] = {}
    for nid in net.topo_order():
        node = net.nodes[nid]
        if node.is_pi:
            values[nid] = bool(assignment[nid])
        else:
            idx = 0
            for f in node.fanins:
                idx = (idx << 1) | values[f]
            values[nid] = bool((node.tt >> idx) & 1)
    return values


def scalar_signatures(net: Network, patterns) -> dict[int, list[bool]]:
    """Per-node signature computed one pattern at a time."""
    out: dict[int, list[bool]] = {nid: [] for nid in net.topo_order()}
    for j in range(patterns.n_patterns):
        assignment = {
            pid: bool((patterns.rows[i] >> j) & 1) for i, pid in enumerate(net.pis)
        }
        values = eval_assignment(net, assignment)
        for nid, v in values.items():
            out[nid].append(v)
    return out


def bits_of(seq: list[bool]) -> int:
    acc = 0
    for j, b in enumerate(seq):
        if b:
            acc |= 1 << j
    return acc


def exhaustive_tables(net: Network) -> dict[int, int]:
    """Truth row of every node over all PIs (PI order, first = MSB).

    Row bit ``v`` is the node value when the PIs spell ``v``; this is
    the package row convention restricted to full-PI support.
    """
    n = len(net.pis)
    rows: dict[int, int] = {nid: 0 for nid in net.topo_order()}
    for v in range(1 << n):
        assignment = {pid: bool((v >> (n - 1 - i)) & 1) for i, pid in enumerate(net.pis)}
        values = eval_assignment(net, assignment)
        for nid, val in values.items():
            if val:
                rows[nid] |= 1 << v
    return rows


def po_tables(net: Network) -> list[int]:
    n = len(net.pis)
    full = (1 << (1 << n)) - 1
    tables = exhaustive_tables(net)
    return [tables[d] ^ (full if phase else 0) for d, phase in net.pos]


# ---------------------------------------------------------------------------
# Random network generation.


def random_network(
    rng: random.Random,
    n_pi: int,
    n_gates: int,
    max_k: int = 4,
    po_count: int | None = None,
    fresh_bias: float = 0.0,
) -> Network:
    """Random k-LUT DAG.

    ``fresh_bias`` steers fanin picks toward not-yet-consumed nodes,
    which keeps fanouts near one (tree-like networks with sharing).
    """
    net = Network(f"rand{rng.randrange(1 << 30)}")
    for _ in range(n_pi):
        net.add_pi()
    pool = list(net.pis)
    consumed: set[int] = set()
    for _ in range(n_gates):
        k = rng.randint(1, max_k)
        avail = list(range(len(net.nodes)))
        fanins = []
        for _ in range(k):
            if fresh_bias and pool and rng.random() < fresh_bias:
                pick = pool[rng.randrange(len(pool))]
            else:
                pick = avail[rng.randrange(len(avail))]
            fanins.append(pick)
        k = len(fanins)
        tt = rng.getrandbits(1 << k)
        nid = net.add_lut(fanins, tt)
        pool.append(nid)
        for f in fanins:
            consumed.add(f)
            if f in pool and rng.random() < 0.8:
                pool.remove(f)
    unread = [n.id for n in net.nodes if not n.fanouts and not n.is_pi]
    if po_count is None:
        drivers = unread or [net.nodes[-1].id]
    else:
        candidates = unread or [n.id for n in net.nodes if not n.is_pi] or list(net.pis)
        drivers = [candidates[rng.randrange(len(candidates))] for _ in range(po_count)]
    for d in drivers:
        net.add_po(d, inverted=bool(rng.getrandbits(1)))
    return net


def blif_roundtrip(net: Network) -> Network:
    from stpsweep import parse_blif, write_blif

    return parse_blif(write_blif(net))


# ---------------------------------------------------------------------------
# Sweep fixtures: redundancy-seeded networks.


def _copy_cone(net: Network, root: int, depth_left: int, mapping: dict[int, int]) -> int:
    """Duplicate the cone under ``root`` down to ``depth_left`` levels."""
    if root in mapping:
        return mapping[root]
    node = net.nodes[root]
    if node.is_pi or depth_left == 0:
        mapping[root] = root
        return root
    fanins = [_copy_cone(net, f, depth_left - 1, mapping) for f in node.fanins]
    nid = net.add_lut(fanins, node.tt)
    mapping[root] = nid
    return nid


def sweep_fixture(seed: int) -> Network:
    """Random net seeded with duplicate, complemented and near-duplicate
    cones plus an injected constant pair; every redundancy drives a PO."""
    rng = random.Random(seed)
    n_pi = rng.randint(10, 14)
    net = random_network(rng, n_pi, rng.randint(16, 26), max_k=4, po_count=3)

    gates = [n.id for n in net.nodes if not n.is_pi and not n.dead]
    # Duplicate cone.
    root = gates[rng.randrange(len(gates))]
    dup = _copy_cone(net, root, rng.randint(1, 3), {})
    if dup == root:
        dup = net.add_lut(list(net.nodes[root].fanins), net.nodes[root].tt)
    net.add_po(dup)
    # Complemented duplicate of another cone.
    root2 = gates[rng.randrange(len(gates))]
    dup2 = _copy_cone(net, root2, rng.randint(1, 2), {})
    inv = net.add_lut([dup2], 0b01)
    net.add_po(inv)
    # Constant pair: x & ~x feeding an OR, keeps a cone alive around it.
    x = net.pis[rng.randrange(len(net.pis))]
    nx = net.add_lut([x], 0b01)
    zero = net.add_lut([x, nx], 0b1000)
    keeper = net.add_lut([zero, gates[rng.randrange(len(gates))]], 0b1110)
    net.add_po(keeper)
    # Near-duplicate pair: two LUTs over the same skewed signals whose
    # rows differ in the one row their inputs almost never reach, so no
    # single node computes the difference and random patterns miss it.
    pis = list(net.pis)
    rng.shuffle(pis)
    u = net.add_lut(pis[0:3], 0b10000000)  # 3-input AND, ones density 1/8
    v = net.add_lut(pis[3:6], 0b10000000)
    w = net.add_lut(pis[6:9], 0b10000000)
    xor3 = 0b10010110
    g = net.add_lut([u, v, w], xor3)
    g_near = net.add_lut([u, v, w], xor3 ^ 0b10000000)  # differs at u=v=w=1
    net.add_po(g)
    net.add_po(g_near)
    return net
