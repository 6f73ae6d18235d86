"""k-LUT network data model with BLIF / ASCII-AIGER ingestion.

A :class:`Network` is a DAG of LUT nodes.  Primary inputs are nodes with
no fanins; every other node carries a truth row over its ordered fanins
in the package convention (``stpsweep.stp``): bit ``v`` of the row is
the output when the fanin values, first fanin most significant, spell
the unsigned integer ``v``.

Node ids are dense indices into the node array and are never reused;
structural edits mark nodes dead instead of renumbering, so external
tables indexed by id stay valid.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field


class NetlistError(Exception):
    """Malformed input file or illegal structural edit."""


class CycleError(NetlistError):
    """The fanin relation is not acyclic."""


def flip_tt_input(tt: int, arity: int, pos: int) -> int:
    """Truth row of the same LUT with input ``pos`` complemented.

    ``pos`` is the fanin position, 0 = first = most significant.
    """
    b = arity - 1 - pos
    step = 1 << b
    period = step << 1
    # Mask of row bits whose assignment has input bit b equal to zero.
    block = (1 << step) - 1
    low = 0
    for off in range(0, 1 << arity, period):
        low |= block << off
    return ((tt & low) << step) | ((tt >> step) & low)


@dataclass
class LutNode:
    id: int
    fanins: list[int] = field(default_factory=list)
    tt: int = 0
    is_pi: bool = False
    dont_touch: bool = False
    dead: bool = False
    fanouts: list[int] = field(default_factory=list)

    @property
    def arity(self) -> int:
        return len(self.fanins)

    @property
    def fanout_count(self) -> int:
        return len(self.fanouts)


class Network:
    """Combinational k-LUT network."""

    def __init__(self, name: str = "net"):
        self.name = name
        self.nodes: list[LutNode] = []
        self.pis: list[int] = []
        self.pos: list[tuple[int, bool]] = []
        self.pi_names: list[str] = []
        self.po_names: list[str] = []
        # Signal-name lookup populated by the parsers; ids also resolve.
        self.names: dict[str, int] = {}

    # -- construction -------------------------------------------------

    def add_pi(self, name: str | None = None) -> int:
        nid = len(self.nodes)
        self.nodes.append(LutNode(nid, is_pi=True))
        self.pis.append(nid)
        if name is None:
            name = f"pi{len(self.pis) - 1}"
        self.pi_names.append(name)
        self.names[name] = nid
        return nid

    def add_lut(self, fanins: list[int], tt: int, name: str | None = None) -> int:
        arity = len(fanins)
        if not 0 <= tt < (1 << (1 << arity)):
            raise NetlistError(f"truth row does not fit {arity} inputs")
        nid = len(self.nodes)
        for f in fanins:
            if not 0 <= f < nid:
                raise NetlistError(f"fanin {f} of node {nid} does not exist yet")
        node = LutNode(nid, list(fanins), tt)
        self.nodes.append(node)
        for f in fanins:
            self.nodes[f].fanouts.append(nid)
        if name is not None:
            self.names[name] = nid
        return nid

    def add_po(self, driver: int, inverted: bool = False, name: str | None = None) -> None:
        if not 0 <= driver < len(self.nodes):
            raise NetlistError(f"PO driver {driver} does not exist")
        self.pos.append((driver, inverted))
        self.po_names.append(name if name is not None else f"po{len(self.pos) - 1}")

    # -- queries ------------------------------------------------------

    def node(self, nid: int) -> LutNode:
        return self.nodes[nid]

    def live_ids(self) -> list[int]:
        return [n.id for n in self.nodes if not n.dead]

    def n_luts(self) -> int:
        """Live non-PI node count."""
        return sum(1 for n in self.nodes if not n.dead and not n.is_pi)

    def resolve(self, token: str) -> int:
        """Map a signal name or a decimal id string to a node id."""
        if token in self.names:
            return self.names[token]
        try:
            nid = int(token)
        except ValueError:
            raise NetlistError(f"unknown signal {token!r}") from None
        if not 0 <= nid < len(self.nodes) or self.nodes[nid].dead:
            raise NetlistError(f"no live node with id {nid}")
        return nid

    def topo_order(self) -> list[int]:
        """Live node ids, every fanin before its fanouts; ties by id."""
        indeg = {}
        for nid in self.live_ids():
            indeg[nid] = sum(1 for f in self.nodes[nid].fanins if not self.nodes[f].dead)
        ready = [nid for nid, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            nid = heapq.heappop(ready)
            order.append(nid)
            for out in self.nodes[nid].fanouts:
                if self.nodes[out].dead:
                    continue
                indeg[out] -= 1
                if indeg[out] == 0:
                    heapq.heappush(ready, out)
        if len(order) != len(indeg):
            raise CycleError("network contains a combinational cycle")
        return order

    def reverse_topo_order(self) -> list[int]:
        """Live node ids, every fanout before its fanins; ties by id."""
        outdeg = {}
        for nid in self.live_ids():
            outdeg[nid] = sum(1 for o in self.nodes[nid].fanouts if not self.nodes[o].dead)
        ready = [nid for nid, d in outdeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        seen_edges = {nid: 0 for nid in outdeg}
        while ready:
            nid = heapq.heappop(ready)
            order.append(nid)
            for f in self.nodes[nid].fanins:
                if self.nodes[f].dead:
                    continue
                seen_edges[f] += 1
                if seen_edges[f] == outdeg[f]:
                    heapq.heappush(ready, f)
        if len(order) != len(outdeg):
            raise CycleError("network contains a combinational cycle")
        return order

    def transitive_fanin(self, nid: int, bound: int) -> list[int]:
        """Non-PI nodes in the input cone of ``nid``, at most ``bound`` of them.

        The cone includes ``nid`` itself (unless it is a PI) and never
        includes PIs.  Breadth-first from the node, fanins in order, so
        the truncation at ``bound`` visited nodes is deterministic.
        """
        node = self.nodes[nid]
        if node.dead:
            raise NetlistError(f"node {nid} is dead")
        if bound <= 0 or node.is_pi:
            return []
        out = [nid]
        seen = {nid}
        queue = [nid]
        qi = 0
        while qi < len(queue) and len(out) < bound:
            cur = queue[qi]
            qi += 1
            for f in self.nodes[cur].fanins:
                fn = self.nodes[f]
                if f in seen or fn.is_pi or fn.dead:
                    continue
                seen.add(f)
                out.append(f)
                queue.append(f)
                if len(out) >= bound:
                    break
        return out

    def is_in_tfo(self, a: int, b: int) -> bool:
        """True iff ``b`` is reachable from ``a`` along fanout edges (reflexively)."""
        if a == b:
            return True
        seen = {a}
        stack = [a]
        while stack:
            cur = stack.pop()
            for out in self.nodes[cur].fanouts:
                if out == b:
                    return True
                if out not in seen and not self.nodes[out].dead:
                    seen.add(out)
                    stack.append(out)
        return False

    def level(self) -> int:
        depth = {}
        worst = 0
        for nid in self.topo_order():
            node = self.nodes[nid]
            d = 0 if node.is_pi else max((depth[f] + 1 for f in node.fanins), default=0)
            depth[nid] = d
            worst = max(worst, d)
        return worst

    # -- edits --------------------------------------------------------

    def substitute_node(self, old: int, new: int, inverted: bool = False) -> None:
        """Re-point every reader of ``old`` to ``new`` and kill ``old``.

        With ``inverted`` set, consuming LUTs get the corresponding
        truth-row input complemented and PO phases are flipped, so the
        network function is preserved exactly when ``new`` equals the
        complement of ``old``.
        """
        if old == new:
            raise NetlistError("cannot substitute a node by itself")
        if self.nodes[old].dead or self.nodes[new].dead:
            raise NetlistError("substitution involving a dead node")
        if self.is_in_tfo(old, new):
            raise NetlistError(f"substituting {old} by {new} would create a cycle")
        old_node = self.nodes[old]
        for reader in list(dict.fromkeys(old_node.fanouts)):
            rnode = self.nodes[reader]
            for pos, f in enumerate(rnode.fanins):
                if f != old:
                    continue
                rnode.fanins[pos] = new
                if inverted:
                    rnode.tt = flip_tt_input(rnode.tt, rnode.arity, pos)
                self.nodes[new].fanouts.append(reader)
        old_node.fanouts.clear()
        for j, (driver, phase) in enumerate(self.pos):
            if driver == old:
                self.pos[j] = (new, phase ^ inverted)
        if old_node.fanout_count == 0:
            old_node.dead = True

    def remove_dead(self) -> int:
        """Mark nodes unreachable from the POs dead; PIs always survive."""
        live = set(self.pis)
        stack = [d for d, _ in self.pos]
        while stack:
            nid = stack.pop()
            if nid in live:
                continue
            live.add(nid)
            stack.extend(self.nodes[nid].fanins)
        removed = 0
        for node in self.nodes:
            if node.dead or node.is_pi:
                continue
            if node.id not in live:
                node.dead = True
                removed += 1
        for node in self.nodes:
            node.fanouts.clear()
        for node in self.nodes:
            if node.dead:
                continue
            for f in node.fanins:
                self.nodes[f].fanouts.append(node.id)
        return removed

    def clone(self) -> "Network":
        out = Network(self.name)
        out.pis = list(self.pis)
        out.pos = list(self.pos)
        out.pi_names = list(self.pi_names)
        out.po_names = list(self.po_names)
        out.names = dict(self.names)
        for n in self.nodes:
            m = LutNode(n.id, list(n.fanins), n.tt, n.is_pi, n.dont_touch, n.dead,
                        list(n.fanouts))
            out.nodes.append(m)
        return out


# ---------------------------------------------------------------------------
# BLIF subset: .model .inputs .outputs .names .end, cover rows [01-]+ [01].


def _blif_logical_lines(text: str):
    """Yield (line_number, tokens) with comments and continuations handled."""
    pending: list[str] = []
    pending_no = 0
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        cont = line.endswith("\\")
        if cont:
            line = line[:-1]
        if not pending:
            pending_no = no
        pending.append(line)
        if cont:
            continue
        joined = " ".join(pending).strip()
        pending = []
        if joined:
            yield pending_no, joined.split()
    if pending and any(s.strip() for s in pending):
        yield pending_no, " ".join(pending).split()


def _cover_to_tt(covers: list[tuple[int, str, str]], arity: int) -> int:
    """Convert BLIF single-output cover rows to a truth-row integer."""
    if not covers:
        return 0
    out_vals = {val for _, _, val in covers}
    if len(out_vals) != 1:
        line = covers[0][0]
        raise NetlistError(f"line {line}: mixed cover output values")
    acc = 0
    full = (1 << (1 << arity)) - 1
    for line, ins, _ in covers:
        minterms = [0]
        for j, c in enumerate(ins):
            bitpos = arity - 1 - j
            if c == "1":
                minterms = [v | (1 << bitpos) for v in minterms]
            elif c == "0":
                pass
            elif c == "-":
                minterms = minterms + [v | (1 << bitpos) for v in minterms]
            else:
                raise NetlistError(f"line {line}: bad cover character {c!r}")
        for v in minterms:
            acc |= 1 << v
    return acc if out_vals == {"1"} else acc ^ full


def parse_blif(text: str, max_arity: int = 16) -> Network:
    """Parse the supported BLIF subset into a network."""
    model = "net"
    inputs: list[str] = []
    outputs: list[str] = []
    defs: dict[str, tuple[int, list[str], list[tuple[int, str, str]]]] = {}
    current: tuple[int, list[str], list[tuple[int, str, str]]] | None = None

    for no, tokens in _blif_logical_lines(text):
        cmd = tokens[0]
        if cmd.startswith("."):
            current = None
        if cmd == ".model":
            model = tokens[1] if len(tokens) > 1 else model
        elif cmd == ".inputs":
            inputs.extend(tokens[1:])
        elif cmd == ".outputs":
            outputs.extend(tokens[1:])
        elif cmd == ".names":
            if len(tokens) < 2:
                raise NetlistError(f"line {no}: .names needs an output")
            fanin_names, out_name = tokens[1:-1], tokens[-1]
            if len(fanin_names) > max_arity:
                raise NetlistError(
                    f"line {no}: node {out_name!r} has {len(fanin_names)} fanins, "
                    f"limit is {max_arity}")
            if out_name in defs:
                raise NetlistError(f"line {no}: {out_name!r} defined twice")
            defs[out_name] = (no, fanin_names, [])
            current = defs[out_name]
        elif cmd == ".end":
            current = None
            break
        elif cmd.startswith("."):
            raise NetlistError(f"line {no}: unsupported construct {cmd!r}")
        else:
            if current is None:
                raise NetlistError(f"line {no}: cover row outside .names")
            arity = len(current[1])
            if arity == 0:
                if len(tokens) != 1 or tokens[0] not in ("0", "1"):
                    raise NetlistError(f"line {no}: bad constant cover row")
                current[2].append((no, "", tokens[0]))
            else:
                if len(tokens) != 2 or len(tokens[0]) != arity or tokens[1] not in ("0", "1"):
                    raise NetlistError(f"line {no}: malformed cover row")
                current[2].append((no, tokens[0], tokens[1]))

    net = Network(model)
    for name in inputs:
        if name in net.names:
            raise NetlistError(f"duplicate input {name!r}")
        if name in defs:
            raise NetlistError(f"input {name!r} also defined by .names")
        net.add_pi(name)

    # Instantiate definitions in dependency order (iterative DFS).
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def build(root: str) -> None:
        stack = [root]
        while stack:
            name = stack[-1]
            if name in net.names:
                state[name] = 2
                stack.pop()
                continue
            if name not in defs:
                raise NetlistError(f"signal {name!r} is never defined")
            no, fanin_names, covers = defs[name]
            if state.get(name) == 1:
                fanins = [net.names[f] for f in fanin_names]
                tt = _cover_to_tt(covers, len(fanins))
                net.add_lut(fanins, tt, name=name)
                state[name] = 2
                stack.pop()
                continue
            state[name] = 1
            for f in fanin_names:
                if f not in net.names:
                    if state.get(f) == 1:
                        raise NetlistError(f"line {no}: cyclic definition through {f!r}")
                    stack.append(f)

    for name in defs:
        build(name)
    for name in outputs:
        if name not in net.names:
            raise NetlistError(f"output {name!r} is never defined")
        net.add_po(net.names[name], name=name)
    return net


def write_blif(net: Network) -> str:
    """Emit the network in the same BLIF subset, one cover row per minterm.

    Inverted POs are materialized as explicit inverter nodes since BLIF
    has no output-phase notion; everything else round-trips structurally.
    """
    taken = set(net.pi_names)
    sig: dict[int, str] = {}
    for i, pid in enumerate(net.pis):
        sig[pid] = net.pi_names[i]
    stored = {nid: name for name, nid in reversed(net.names.items())}
    for node in net.nodes:
        if node.dead or node.is_pi:
            continue
        name = stored.get(node.id, f"n{node.id}")
        while name in taken:
            name += "_"
        taken.add(name)
        sig[node.id] = name

    lines = [f".model {net.name}"]
    if net.pis:
        lines.append(".inputs " + " ".join(net.pi_names))
    out_tokens: list[str] = []
    inverter_lines: list[str] = []
    for j, (driver, phase) in enumerate(net.pos):
        if not phase:
            out_tokens.append(sig[driver])
            continue
        name = f"po{j}"
        while name in taken:
            name += "_"
        taken.add(name)
        inverter_lines.append(f".names {sig[driver]} {name}")
        inverter_lines.append("0 1")
        out_tokens.append(name)
    if out_tokens:
        lines.append(".outputs " + " ".join(out_tokens))
    for nid in net.topo_order():
        node = net.nodes[nid]
        if node.is_pi or node.dead:
            continue
        lines.append(".names " + " ".join(sig[f] for f in node.fanins) + f" {sig[nid]}")
        k = node.arity
        if k == 0:
            if node.tt & 1:
                lines.append("1")
            continue
        for v in range(1 << k):
            if (node.tt >> v) & 1:
                bits = format(v, f"0{k}b")
                lines.append(f"{bits} 1")
    lines.extend(inverter_lines)
    lines.append(".end")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ASCII AIGER (combinational aag).

_AND_TT = 0b1000


def parse_aiger_ascii(text: str) -> Network:
    """Parse a combinational ASCII AIGER file into a 2-LUT network.

    Edge inversions are absorbed into the consuming LUT's truth row (or
    into the PO phase flag); no inverter nodes are created, so the node
    count equals the AND-gate count.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise NetlistError("empty AIGER input")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "aag":
        raise NetlistError(f"malformed AIGER header: {lines[0]!r}")
    try:
        maxvar, n_in, n_latch, n_out, n_and = (int(x) for x in head[1:])
    except ValueError:
        raise NetlistError(f"malformed AIGER header: {lines[0]!r}") from None
    if n_latch != 0:
        raise NetlistError("sequential AIGER (latch count != 0) is unsupported")
    if len(lines) < 1 + n_in + n_out + n_and:
        raise NetlistError("truncated AIGER body")

    net = Network("aig")
    lit_node: dict[int, int] = {}
    const0: int | None = None

    def const_node() -> int:
        nonlocal const0
        if const0 is None:
            const0 = net.add_lut([], 0)
        return const0

    pos = 1
    for i in range(n_in):
        lit = int(lines[pos])
        pos += 1
        if lit < 2 or lit & 1:
            raise NetlistError(f"bad input literal {lit}")
        lit_node[lit] = net.add_pi(f"i{i}")
    out_lits = []
    for _ in range(n_out):
        out_lits.append(int(lines[pos]))
        pos += 1
    and_rows = []
    for _ in range(n_and):
        parts = lines[pos].split()
        pos += 1
        if len(parts) != 3:
            raise NetlistError(f"malformed AND line: {lines[pos - 1]!r}")
        lhs, rhs0, rhs1 = (int(x) for x in parts)
        if lhs < 2 or lhs & 1 or lhs > 2 * maxvar:
            raise NetlistError(f"bad AND output literal {lhs}")
        and_rows.append((lhs, rhs0, rhs1))

    # The aag body may list gates in any order; resolve by literal.
    and_def = {lhs: (rhs0, rhs1) for lhs, rhs0, rhs1 in and_rows}
    if len(and_def) != len(and_rows):
        raise NetlistError("AND output literal defined twice")

    def node_of(lit: int) -> int | None:
        base = lit & ~1
        if base == 0:
            return const_node()
        return lit_node.get(base)

    def build(root: int) -> None:
        """Instantiate the AND cone below literal ``root`` (iterative DFS)."""
        state: dict[int, int] = {}
        stack = [root & ~1]
        while stack:
            base = stack[-1]
            if base in lit_node or base == 0:
                stack.pop()
                continue
            if base not in and_def:
                raise NetlistError(f"literal {base} is never defined")
            rhs0, rhs1 = and_def[base]
            if state.get(base) == 1:
                f0 = node_of(rhs0)
                f1 = node_of(rhs1)
                tt = _AND_TT
                if rhs0 & 1:
                    tt = flip_tt_input(tt, 2, 0)
                if rhs1 & 1:
                    tt = flip_tt_input(tt, 2, 1)
                lit_node[base] = net.add_lut([f0, f1], tt)
                stack.pop()
                continue
            state[base] = 1
            for rhs in (rhs0, rhs1):
                b = rhs & ~1
                if b != 0 and b not in lit_node:
                    if state.get(b) == 1:
                        raise NetlistError(f"cyclic AIGER definition through literal {b}")
                    stack.append(b)

    for lhs, _, _ in and_rows:
        build(lhs)
    for j, lit in enumerate(out_lits):
        if (lit & ~1) != 0 and (lit & ~1) not in lit_node:
            build(lit)
        driver = node_of(lit)
        net.add_po(driver, inverted=bool(lit & 1), name=f"o{j}")
    return net
