"""Combinational equivalence checking between two networks.

Small interfaces (at most 14 PIs) are compared by exhaustive
simulation; larger ones by one SAT miter per output pair.  PI and PO
correspondence is by name when both sides carry the same name sets,
otherwise positional.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import Network
from .sat import Cnf, SatStatus, lut_clauses, solve
from .simulate import PatternSet, _var_row, simulate_all

EXHAUSTIVE_PI_LIMIT = 14


class InterfaceMismatch(ValueError):
    pass


@dataclass
class CecResult:
    equivalent: bool
    #: PI assignment (by net-a PI name) witnessing the difference, if any.
    counterexample: dict[str, bool] | None = None
    #: Name of the first differing output, if any.
    output: str | None = None


def _pi_correspondence(a: Network, b: Network) -> list[int]:
    """For each PI position of ``a``, the matching PI position of ``b``."""
    if len(a.pis) != len(b.pis):
        raise InterfaceMismatch(
            f"PI count differs: {len(a.pis)} vs {len(b.pis)}")
    if set(a.pi_names) == set(b.pi_names) and len(set(a.pi_names)) == len(a.pi_names):
        pos_b = {name: i for i, name in enumerate(b.pi_names)}
        return [pos_b[name] for name in a.pi_names]
    return list(range(len(a.pis)))


def _po_correspondence(a: Network, b: Network) -> list[int]:
    if len(a.pos) != len(b.pos):
        raise InterfaceMismatch(
            f"PO count differs: {len(a.pos)} vs {len(b.pos)}")
    if set(a.po_names) == set(b.po_names) and len(set(a.po_names)) == len(a.po_names):
        pos_b = {name: i for i, name in enumerate(b.po_names)}
        return [pos_b[name] for name in a.po_names]
    return list(range(len(a.pos)))


def _exhaustive_cec(a: Network, b: Network, pi_map: list[int], po_map: list[int]) -> CecResult:
    n = len(a.pis)
    n_pat = 1 << n
    rows_a = [_var_row(i, n) for i in range(n)]
    rows_b: list[int] = [0] * n
    for i in range(n):
        rows_b[pi_map[i]] = rows_a[i]
    sa = simulate_all(a, PatternSet(rows_a, n_pat))
    sb = simulate_all(b, PatternSet(rows_b, n_pat))
    mask = (1 << n_pat) - 1
    for j, (da, pa) in enumerate(a.pos):
        db, pb = b.pos[po_map[j]]
        ra = sa[da].bits ^ (mask if pa else 0)
        rb = sb[db].bits ^ (mask if pb else 0)
        if ra != rb:
            diff = ra ^ rb
            v = (diff & -diff).bit_length() - 1
            ce = {a.pi_names[i]: bool((v >> (n - 1 - i)) & 1) for i in range(n)}
            return CecResult(False, ce, a.po_names[j])
    return CecResult(True)


def _encode_into(cnf: Cnf, net: Network, pi_vars: list[int], needed: set[int]) -> dict[int, int]:
    """Add one network's cone clauses over shared PI variables."""
    node_var: dict[int, int] = {}
    for i, pid in enumerate(net.pis):
        node_var[pid] = pi_vars[i]
    cone: set[int] = set()
    stack = list(needed)
    while stack:
        nid = stack.pop()
        if nid in cone or net.nodes[nid].is_pi:
            continue
        cone.add(nid)
        stack.extend(net.nodes[nid].fanins)
    for nid in net.topo_order():
        if nid not in cone:
            continue
        node = net.nodes[nid]
        node_var[nid] = cnf.new_var()
        for clause in lut_clauses(node_var[nid], [node_var[f] for f in node.fanins], node.tt):
            cnf.add_clause(clause)
    return node_var


def _miter_cec(a: Network, b: Network, pi_map: list[int], po_map: list[int]) -> CecResult:
    for j, (da, pa) in enumerate(a.pos):
        db, pb = b.pos[po_map[j]]
        cnf = Cnf()
        pi_vars_a = [cnf.new_var() for _ in a.pis]
        pi_vars_b: list[int] = [0] * len(b.pis)
        for i in range(len(a.pis)):
            pi_vars_b[pi_map[i]] = pi_vars_a[i]
        var_a = _encode_into(cnf, a, pi_vars_a, {da})
        var_b = _encode_into(cnf, b, pi_vars_b, {db})
        la = var_a[da]
        lb = var_b[db]
        t = cnf.new_var()
        cnf.add_clause([-t, la, lb])
        cnf.add_clause([-t, -la, -lb])
        cnf.add_clause([t, -la, lb])
        cnf.add_clause([t, la, -lb])
        # Outputs must differ after accounting for the two PO phases.
        want_xor = not (pa ^ pb)
        outcome = solve(cnf, assumptions=[t if want_xor else -t])
        if outcome.status is SatStatus.SAT:
            ce = {
                a.pi_names[i]: outcome.model[pi_vars_a[i]]
                for i in range(len(a.pis))
            }
            return CecResult(False, ce, a.po_names[j])
    return CecResult(True)


def check_equivalence(a: Network, b: Network) -> CecResult:
    """Decide whether two networks compute the same PO functions."""
    pi_map = _pi_correspondence(a, b)
    po_map = _po_correspondence(a, b)
    if len(a.pis) <= EXHAUSTIVE_PI_LIMIT:
        return _exhaustive_cec(a, b, pi_map, po_map)
    return _miter_cec(a, b, pi_map, po_map)
