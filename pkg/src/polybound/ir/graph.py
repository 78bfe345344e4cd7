"""Control-flow analysis over the location graph: SCCs, cycles, entries."""

from __future__ import annotations

from dataclasses import dataclass

from .program import Program, Transition


@dataclass
class SccDecomposition:
    """Nontrivial SCCs in topological order plus cycle membership.

    ``components`` lists, per nontrivial SCC of the location graph, the
    transitions with both endpoints inside it (declaration order).  A
    transition is cyclic iff its endpoints share a (location) SCC.
    """

    components: list[list[Transition]]
    loc_component: dict[str, int]
    component_order: list[int]
    _program: Program

    def is_cyclic(self, t: Transition) -> bool:
        return self.loc_component[t.src] == self.loc_component[t.tgt]

    def cyclic_transitions(self) -> list[Transition]:
        return [t for t in self._program.transitions if self.is_cyclic(t)]

    def units(self) -> list[tuple[list[Transition], list[Transition]]]:
        """Per condensation component in topological order: the transitions
        feeding into it from earlier components, then its internal ones."""
        out = []
        for comp in self.component_order:
            feeding = [
                t
                for t in self._program.transitions
                if self.loc_component[t.tgt] == comp
                and self.loc_component[t.src] != comp
            ]
            internal = [
                t
                for t in self._program.transitions
                if self.loc_component[t.src] == comp
                and self.loc_component[t.tgt] == comp
            ]
            out.append((feeding, internal))
        return out


def sccs(p: Program) -> SccDecomposition:
    """Tarjan over locations; components come out in topological order."""
    order = _location_order(p)
    succ: dict[str, list[str]] = {loc: [] for loc in order}
    for t in p.transitions:
        succ[t.src].append(t.tgt)

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    finished: list[list[str]] = []  # reverse topological

    for root in order:
        if root in index:
            continue
        # iterative Tarjan: (node, iterator position)
        work = [(root, 0)]
        while work:
            node, pos = work[-1]
            if pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            children = succ[node]
            while pos < len(children):
                child = children[pos]
                pos += 1
                if child not in index:
                    work[-1] = (node, pos)
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                finished.append(comp)
            if work:
                parent, ppos = work[-1]
                low[parent] = min(low[parent], low[node])
                work[-1] = (parent, ppos)

    loc_component: dict[str, int] = {}
    for cid, comp in enumerate(reversed(finished)):  # topological ids
        for loc in comp:
            loc_component[loc] = cid
    component_order = list(range(len(finished)))

    has_self_loop = {t.src for t in p.transitions if t.is_self_loop}
    comp_locs: dict[int, list[str]] = {}
    for loc, cid in loc_component.items():
        comp_locs.setdefault(cid, []).append(loc)

    components: list[list[Transition]] = []
    for cid in component_order:
        locs = comp_locs[cid]
        nontrivial = len(locs) > 1 or locs[0] in has_self_loop
        if not nontrivial:
            continue
        members = [
            t
            for t in p.transitions
            if loc_component[t.src] == cid and loc_component[t.tgt] == cid
        ]
        components.append(members)

    return SccDecomposition(components, loc_component, component_order, p)


def _location_order(p: Program) -> list[str]:
    order = [p.init]
    seen = {p.init}
    for t in p.transitions:
        for loc in (t.src, t.tgt):
            if loc not in seen:
                seen.add(loc)
                order.append(loc)
    for loc in sorted(p.locs):
        if loc not in seen:
            seen.add(loc)
            order.append(loc)
    return order


def entry_transitions(p: Program, members) -> list[Transition]:
    """Transitions outside ``members`` whose target starts one inside."""
    member_set = {t.tid for t in members}
    sources = {t.src for t in members}
    return [t for t in p.transitions if t.tid not in member_set and t.tgt in sources]
