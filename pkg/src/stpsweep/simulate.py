"""Bit-parallel simulation of k-LUT networks.

Patterns and signatures are packed bit sequences: bit ``j`` of a row is
pattern ``j``.  Signature strings print pattern 0 first, which for an
exhaustive pattern set (pattern ``j`` = input assignment ``j``, counting
up from all-zeros) is the truth row read in increasing assignment order,
i.e. the reverse of the :mod:`stpsweep.stp` row string.

Two simulation modes are provided: :func:`simulate_all` walks every
node, while :func:`simulate_specified` partitions the relevant part of
the network into tree cuts, composes one logic matrix per cut with the
canonical-form machinery, and only evaluates the cut roots.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .bexpr import Lut, Var, canonical_form
from .netlist import Network
from .stp import MAX_ARITY, LogicMatrix


@dataclass
class PatternSet:
    """One packed bit row per primary input."""

    rows: list[int]
    n_patterns: int

    def __post_init__(self):
        if self.n_patterns < 1:
            raise ValueError("need at least one pattern")
        mask = self.mask
        self.rows = [r & mask for r in self.rows]

    @property
    def n_pis(self) -> int:
        return len(self.rows)

    @property
    def mask(self) -> int:
        return (1 << self.n_patterns) - 1

    def pattern(self, j: int) -> str:
        """Pattern ``j`` as a 0/1 string, one character per PI, top down."""
        return "".join(str((r >> j) & 1) for r in self.rows)

    def to_text(self) -> str:
        return "\n".join(_bits_to_string(r, self.n_patterns) for r in self.rows) + "\n"


def _bits_to_string(bits: int, n: int) -> str:
    """Packed bits -> string with bit 0 (pattern 0) leftmost."""
    return format(bits, f"0{n}b")[::-1]


def gen_random_patterns(n_pi: int, n_patterns: int, seed: int) -> PatternSet:
    """Uniform random patterns, reproducible for a fixed seed."""
    rng = random.Random(seed)
    return PatternSet([rng.getrandbits(n_patterns) for _ in range(n_pi)], n_patterns)


def parse_patterns(text: str, n_pi: int) -> PatternSet:
    """Parse one 0/1 line per PI; pattern ``j`` is column ``j`` top down."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != n_pi:
        raise ValueError(f"expected {n_pi} pattern lines, got {len(lines)}")
    width = len(lines[0])
    rows = []
    for ln in lines:
        if len(ln) != width or any(c not in "01" for c in ln):
            raise ValueError(f"ragged or non-binary pattern line: {ln!r}")
        rows.append(int(ln[::-1], 2))
    return PatternSet(rows, width)


@dataclass
class Signature:
    """Per-node output bits, one bit per pattern."""

    node: int
    bits: int
    n_patterns: int

    def to_string(self) -> str:
        return _bits_to_string(self.bits, self.n_patterns)


# ---------------------------------------------------------------------------
# Word-parallel LUT evaluation on packed rows.

_MINTERM_CACHE: dict[tuple[int, int], tuple[tuple[int, ...], bool]] = {}


def _minterm_plan(tt: int, arity: int) -> tuple[tuple[int, ...], bool]:
    """Assignments to OR together, choosing the cheaper output polarity."""
    key = (tt, arity)
    plan = _MINTERM_CACHE.get(key)
    if plan is None:
        size = 1 << arity
        ones = [v for v in range(size) if (tt >> v) & 1]
        if len(ones) * 2 <= size:
            plan = (tuple(ones), False)
        else:
            plan = (tuple(v for v in range(size) if not (tt >> v) & 1), True)
        if len(_MINTERM_CACHE) < 65536:
            _MINTERM_CACHE[key] = plan
    return plan


def eval_tt_words(tt: int, words: list[int], mask: int) -> int:
    """Apply a LUT bitwise to packed fanin rows (first fanin = MSB)."""
    arity = len(words)
    if arity == 0:
        return mask if tt & 1 else 0
    if arity == 1:
        w = words[0]
        hi = (tt >> 1) & 1
        lo = tt & 1
        if hi and lo:
            return mask
        if hi:
            return w & mask
        if lo:
            return ~w & mask
        return 0
    if arity > 6:
        return _eval_tt_gather(tt, words, mask)
    terms, invert = _minterm_plan(tt, arity)
    acc = 0
    for v in terms:
        term = mask
        for i, w in enumerate(words):
            term &= w if (v >> (arity - 1 - i)) & 1 else ~w
        acc |= term
    return (acc ^ mask) if invert else acc & mask


def _int_to_bitarray(x: int, n: int) -> np.ndarray:
    nbytes = (n + 7) >> 3
    buf = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(buf, bitorder="little")[:n]


def _bitarray_to_int(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


def _eval_tt_gather(tt: int, words: list[int], mask: int) -> int:
    """Wide-arity LUT evaluation via a vectorized table lookup."""
    n = mask.bit_length()
    arity = len(words)
    idx = None
    for w in words:
        bits = _int_to_bitarray(w & mask, n).astype(np.int32)
        idx = bits if idx is None else (idx << 1) | bits
    table = _int_to_bitarray(tt, 1 << arity)
    return _bitarray_to_int(table[idx])


def simulate_all(net: Network, patterns: PatternSet) -> dict[int, Signature]:
    """Signatures of every live node, PIs included."""
    if patterns.n_pis != len(net.pis):
        raise ValueError(
            f"pattern set has {patterns.n_pis} rows, network has {len(net.pis)} PIs")
    mask = patterns.mask
    n = patterns.n_patterns
    pi_row = {pid: patterns.rows[i] for i, pid in enumerate(net.pis)}
    bits: dict[int, int] = {}
    for nid in net.topo_order():
        node = net.nodes[nid]
        if node.is_pi:
            bits[nid] = pi_row[nid]
        else:
            bits[nid] = eval_tt_words(node.tt, [bits[f] for f in node.fanins], mask)
    return {nid: Signature(nid, b, n) for nid, b in bits.items()}


# ---------------------------------------------------------------------------
# Cut construction.


def cut_limit(n_patterns: int) -> int:
    """Cut leaf budget for a pattern count: floor(log2 n), clamped to [1, 16]."""
    if n_patterns < 2:
        raise ValueError("need at least 2 patterns for a cut limit")
    return max(1, min(16, int(math.log2(n_patterns))))


@dataclass
class Cut:
    root: int
    members: list[int]
    leaves: list[int] = field(default_factory=list)


@dataclass
class CutSet:
    """Partition of the simulated region into single-root tree cuts."""

    cuts: dict[int, Cut]
    roots: list[int]  # topological order
    limit: int
    targets: list[int]


def circuit_cut(net: Network, limit: int, targets: list[int], scope: str = "cone") -> CutSet:
    """Partition the targets' input cones (or the whole net) into tree cuts.

    Scope ``"cone"`` covers exactly the union of the targets' input
    cones; ``"network"`` partitions every live non-PI node, with PO
    drivers acting as additional boundaries.  A node roots a new cut if
    it is a target, drives a PO, or fans out more than once inside the
    scope; otherwise it merges into its unique reader's cut as long as
    that cut keeps at most ``limit`` leaves.  A fresh single-node cut may
    still exceed ``limit`` when the node's own fanin count does.
    """
    if limit < 1:
        raise ValueError("cut limit must be >= 1")
    tset = set(targets)
    for t in targets:
        if net.nodes[t].dead:
            raise ValueError(f"target {t} is dead")
    order = net.topo_order()
    rank = {nid: i for i, nid in enumerate(order)}

    if scope == "cone":
        scope_nodes: set[int] = set()
        stack = [t for t in tset if not net.nodes[t].is_pi]
        while stack:
            nid = stack.pop()
            if nid in scope_nodes:
                continue
            scope_nodes.add(nid)
            for f in net.nodes[nid].fanins:
                if not net.nodes[f].is_pi and f not in scope_nodes:
                    stack.append(f)
    elif scope == "network":
        scope_nodes = {nid for nid in order if not net.nodes[nid].is_pi}
    else:
        raise ValueError(f"unknown scope {scope!r}")

    po_drivers = {d for d, _ in net.pos}
    scope_fanout: dict[int, int] = {nid: 0 for nid in scope_nodes}
    for nid in scope_nodes:
        for f in net.nodes[nid].fanins:
            if f in scope_nodes:
                scope_fanout[f] += 1

    cut_of: dict[int, int] = {}
    cuts: dict[int, Cut] = {}
    leaf_sets: dict[int, set[int]] = {}

    def new_root(nid: int) -> None:
        cut_of[nid] = nid
        cuts[nid] = Cut(nid, [nid])
        leaf_sets[nid] = set(net.nodes[nid].fanins)

    for nid in sorted(scope_nodes, key=rank.__getitem__, reverse=True):
        node = net.nodes[nid]
        readers = [o for o in node.fanouts if o in scope_nodes]
        if nid in tset or nid in po_drivers or len(readers) != 1:
            new_root(nid)
            continue
        root = cut_of[readers[0]]
        merged = (leaf_sets[root] - {nid}) | set(node.fanins)
        if len(merged) <= limit:
            cut_of[nid] = root
            cuts[root].members.append(nid)
            leaf_sets[root] = merged
        else:
            new_root(nid)

    for root, cut in cuts.items():
        cut.leaves = sorted(leaf_sets[root])
        cut.members.sort(key=rank.__getitem__)
    roots = sorted(cuts, key=rank.__getitem__)
    return CutSet(cuts, roots, limit, sorted(tset))


def cut_truth_tables(net: Network, cutset: CutSet) -> dict[int, LogicMatrix]:
    """Logic matrix of each cut over its ordered leaves.

    Composed symbolically from the member LUTs' structural matrices via
    :func:`stpsweep.bexpr.canonical_form`; leaf 0 (smallest id) is the
    most significant input.
    """
    out: dict[int, LogicMatrix] = {}
    for root in cutset.roots:
        cut = cutset.cuts[root]
        if len(cut.leaves) > MAX_ARITY:
            raise ValueError(
                f"cut at {root} has {len(cut.leaves)} leaves, arity cap is {MAX_ARITY}")
        members = set(cut.members)
        leaf_var = {leaf: j + 1 for j, leaf in enumerate(cut.leaves)}
        cache: dict[int, object] = {}

        def expr_of(nid: int):
            if nid in cache:
                return cache[nid]
            if nid in leaf_var and nid not in members:
                e = Var(leaf_var[nid])
            else:
                node = net.nodes[nid]
                e = Lut(node.tt, tuple(expr_of(f) for f in node.fanins))
            cache[nid] = e
            return e

        out[root] = canonical_form(expr_of(root), len(cut.leaves))
    return out


def _simulate_over_cuts(
    net: Network,
    patterns: PatternSet,
    targets: list[int],
    limit: int,
    scope: str = "cone",
) -> dict[int, Signature]:
    """Shared cut-evaluate pipeline behind the specified-node modes."""
    if patterns.n_pis != len(net.pis):
        raise ValueError(
            f"pattern set has {patterns.n_pis} rows, network has {len(net.pis)} PIs")
    mask = patterns.mask
    n = patterns.n_patterns
    pi_row = {pid: patterns.rows[i] for i, pid in enumerate(net.pis)}
    tset = list(dict.fromkeys(targets))
    gate_targets = [t for t in tset if not net.nodes[t].is_pi]
    bits: dict[int, int] = dict(pi_row)
    arrs: dict[int, np.ndarray] = {}

    def arr_of(nid: int) -> np.ndarray:
        a = arrs.get(nid)
        if a is None:
            a = _int_to_bitarray(bits[nid], n)
            arrs[nid] = a
        return a

    if gate_targets:
        cutset = circuit_cut(net, limit, gate_targets, scope=scope)
        tts = cut_truth_tables(net, cutset)
        for root in cutset.roots:
            cut = cutset.cuts[root]
            mat = tts[root]
            m = len(cut.leaves)
            if m <= 6:
                words = [bits[leaf] for leaf in cut.leaves]
                bits[root] = eval_tt_words(mat.row, words, mask)
                continue
            # Wide cut: vectorized table lookup over cached leaf bits.
            idx = arr_of(cut.leaves[0]).astype(np.int32)
            for leaf in cut.leaves[1:]:
                np.left_shift(idx, 1, out=idx)
                np.bitwise_or(idx, arr_of(leaf), out=idx)
            out = _int_to_bitarray(mat.row, 1 << m)[idx]
            arrs[root] = out
            bits[root] = _bitarray_to_int(out)
    return {t: Signature(t, bits[t], n) for t in tset}


def simulate_specified(net: Network, patterns: PatternSet, targets: list[int]) -> dict[int, Signature]:
    """Signatures of the target nodes only, via the cut pipeline.

    Bit-identical to ``simulate_all`` restricted to the targets.
    """
    limit = cut_limit(patterns.n_patterns) if patterns.n_patterns >= 2 else 1
    return _simulate_over_cuts(net, patterns, targets, limit)


# ---------------------------------------------------------------------------
# Exhaustive window simulation.


class WindowTooLarge(Exception):
    """The targets' combined structural support exceeds the window cap."""


def _var_row(position: int, m: int) -> int:
    """Packed exhaustive row of input ``position`` (0 = MSB) over 2**m patterns."""
    t = m - 1 - position
    step = 1 << t
    block = (1 << step) - 1
    row = 0
    for off in range(step, 1 << m, step << 1):
        row |= block << off
    return row


@dataclass
class WindowTruths:
    """Exhaustive signatures of a target set over its structural support."""

    leaves: list[int]  # shared window leaves (PIs), ascending id = MSB first
    supports: dict[int, list[int]]  # per-target own support
    rows: dict[int, int]  # truth row over the target's own support
    window_rows: dict[int, int]  # truth row over the shared leaves

    def signature_string(self, target: int) -> str:
        """Exhaustive signature, first pattern (all leaves 0) leftmost."""
        return _bits_to_string(self.rows[target], 1 << len(self.supports[target]))

    def truth_row_string(self, target: int) -> str:
        """Row in the logic-matrix convention (all-true column leftmost)."""
        width = 1 << len(self.supports[target])
        return format(self.rows[target], f"0{width}b")


def _pi_support(net: Network, targets: list[int]) -> tuple[set[int], dict[int, set[int]]]:
    union: set[int] = set()
    per: dict[int, set[int]] = {}
    for t in targets:
        sup: set[int] = set()
        stack = [t]
        seen = set()
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = net.nodes[nid]
            if node.is_pi:
                sup.add(nid)
            else:
                stack.extend(node.fanins)
        per[t] = sup
        union |= sup
    return union, per


def exhaustive_window_sim(net: Network, targets: list[int], window_cap: int = 16) -> WindowTruths:
    """Exhaustive truth rows of the targets over their structural support.

    The shared window is the union of the targets' PI supports; if it
    holds more than ``window_cap`` leaves a :class:`WindowTooLarge` is
    raised and the caller falls back to pattern simulation.  Each
    target additionally gets its row projected onto its own support.
    """
    targets = list(dict.fromkeys(targets))
    if not targets:
        raise ValueError("no targets")
    union, per = _pi_support(net, targets)
    if len(union) > window_cap:
        raise WindowTooLarge(f"window has {len(union)} leaves, cap is {window_cap}")
    leaves = sorted(union)
    m = len(leaves)
    n_pat = 1 << m
    position = {leaf: j for j, leaf in enumerate(leaves)}
    rows = []
    for pid in net.pis:
        rows.append(_var_row(position[pid], m) if pid in position else 0)
    pats = PatternSet(rows, n_pat)
    limit = max(1, min(window_cap, MAX_ARITY))
    sigs = _simulate_over_cuts(net, pats, targets, limit)

    own_rows: dict[int, int] = {}
    supports: dict[int, list[int]] = {}
    window_rows: dict[int, int] = {}
    for t in targets:
        sup = sorted(per[t])
        supports[t] = sup
        window_rows[t] = sigs[t].bits
        mt = len(sup)
        own = 0
        sup_positions = [position[p] for p in sup]
        for u in range(1 << mt):
            v = 0
            for j, pos in enumerate(sup_positions):
                if (u >> (mt - 1 - j)) & 1:
                    v |= 1 << (m - 1 - pos)
            if (sigs[t].bits >> v) & 1:
                own |= 1 << u
        own_rows[t] = own
    return WindowTruths(leaves, supports, own_rows, window_rows)
