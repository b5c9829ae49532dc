"""Structural observability from the hypergraph alone.

The test certifies observability for almost all weights when every state is
reached by backward observational closure from the outputs and no nontrivial
node permutation preserves the hyperedges. Both conditions are read off the
support of the tensors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .system import HypergraphSystem

Edge = Tuple[FrozenSet[int], int]  # (heads, tail)


@dataclass(frozen=True)
class StructuralHypergraph:
    n: int
    edges: FrozenSet[Edge]  # dynamics: heads drive the tail
    output_edges: Tuple[FrozenSet[FrozenSet[int]], ...]  # per output, node sets of its terms

    @property
    def output_nodes(self) -> Set[int]:
        return {v for es in self.output_edges for e in es for v in e}


def structural_hypergraph(sys: HypergraphSystem, include_inputs: bool = True) -> StructuralHypergraph:
    edges = set()
    tensors = list(sys.dynamics)
    if include_inputs:
        tensors += [t for ts in sys.inputs for t in ts]
    for A in tensors:
        for idx, _ in A.items():
            edges.add((frozenset(idx[:-1]), idx[-1]))
    outs = []
    for i, ts in enumerate(sys.outputs, start=1):
        es = {frozenset(idx) for C in ts for idx, _ in C.items()}
        if include_inputs:
            es |= {frozenset(idx) for d in sys.direct if d.output == i for idx, _ in d.tensor.items()}
        outs.append(frozenset(es))
    return StructuralHypergraph(sys.n, frozenset(edges), tuple(outs))


@dataclass
class Closure:
    layers: List[List[int]]
    T: Optional[int]  # None when some state is never reached
    distance: Dict[int, int]
    unreached: List[int]


def observational_closure(H: StructuralHypergraph) -> Closure:
    """Layers L_0 = output nodes, L_{t+1} = new heads of edges whose tail is already seen."""
    seen: Set[int] = set()
    layer = sorted(H.output_nodes)
    layers: List[List[int]] = []
    distance: Dict[int, int] = {}
    t = 0
    while layer:
        layers.append(layer)
        for v in layer:
            distance[v] = t
        seen.update(layer)
        nxt = set()
        for heads, tail in H.edges:
            if tail in seen:
                nxt.update(h for h in heads if h not in seen)
        layer = sorted(nxt)
        t += 1
    unreached = [v for v in range(1, H.n + 1) if v not in seen]
    T = None if unreached else len(layers) - 1
    return Closure(layers, T, distance, unreached)


def observational_diameter(H: StructuralHypergraph) -> Optional[int]:
    return observational_closure(H).T


def backward_distances(H: StructuralHypergraph) -> Dict[int, int]:
    """Fewest backward hyperedge steps from each state to an output node."""
    return observational_closure(H).distance


class AutomorphismLimit(RuntimeError):
    pass


def _signature(H: StructuralHypergraph, v: int, fix_outputs: bool):
    tail_of = sorted(len(h) for h, t in H.edges if t == v)
    head_in = sorted((len(h), h == frozenset([v])) for h, t in H.edges if v in h)
    outs = []
    for i, es in enumerate(H.output_edges):
        sizes = tuple(sorted(len(e) for e in es if v in e))
        outs.append((i, sizes) if fix_outputs else sizes)
    if not fix_outputs:
        outs.sort()
    return (tuple(tail_of), tuple(head_in), tuple(outs))


def _maps_edges(H: StructuralHypergraph, perm: Dict[int, int], fix_outputs: bool) -> bool:
    for heads, tail in H.edges:
        if (frozenset(perm[h] for h in heads), perm[tail]) not in H.edges:
            return False
    images = [frozenset(frozenset(perm[v] for v in e) for e in es) for es in H.output_edges]
    if fix_outputs:
        return all(a == b for a, b in zip(images, H.output_edges))
    return sorted(map(sorted_key, images)) == sorted(map(sorted_key, H.output_edges))


def sorted_key(es: FrozenSet[FrozenSet[int]]):
    return tuple(sorted(tuple(sorted(e)) for e in es))


def hypergraph_automorphisms(
    H: StructuralHypergraph, fix_outputs: bool = True, max_n: int = 10, limit: int = 10_000
) -> List[Tuple[int, ...]]:
    """Node permutations preserving dynamics edges and output edges.

    With ``fix_outputs`` each output's edge set must map to itself;
    otherwise outputs may be permuted among themselves. Permutations are
    returned as tuples p with p[v-1] the image of v; the identity comes first.
    """
    n = H.n
    if n > max_n:
        raise AutomorphismLimit(f"automorphism search limited to n <= {max_n}, got n = {n}")
    sig = {v: _signature(H, v, fix_outputs) for v in range(1, n + 1)}
    nodes = list(range(1, n + 1))
    found: List[Tuple[int, ...]] = []
    edges_by_node: Dict[int, List[Edge]] = {v: [] for v in nodes}
    for e in H.edges:
        for v in set(e[0]) | {e[1]}:
            edges_by_node[v].append(e)

    def partial_ok(perm: Dict[int, int], v: int) -> bool:
        for heads, tail in edges_by_node[v]:
            members = set(heads) | {tail}
            if all(u in perm for u in members):
                if (frozenset(perm[h] for h in heads), perm[tail]) not in H.edges:
                    return False
        return True

    def search(k: int, perm: Dict[int, int], used: Set[int]):
        if len(found) >= limit:
            return
        if k == n:
            if _maps_edges(H, perm, fix_outputs):
                found.append(tuple(perm[v] for v in nodes))
            return
        v = nodes[k]
        # try the identity image first so it is listed first
        cands = [v] + [w for w in nodes if w != v]
        for w in cands:
            if w in used or sig[w] != sig[v]:
                continue
            perm[v] = w
            used.add(w)
            if partial_ok(perm, v):
                search(k + 1, perm, used)
            used.discard(w)
            del perm[v]

    search(0, {}, set())
    return found


@dataclass
class StructuralResult:
    certified: bool
    reason: str
    T: Optional[int]
    layers: List[List[int]]
    distances: Dict[int, int]
    automorphisms: List[Tuple[int, ...]] = field(default_factory=list)
    unreached: List[int] = field(default_factory=list)


def structural_observability_test(
    sys: HypergraphSystem, fix_outputs: bool = True, max_n: int = 10, include_inputs: bool = True
) -> StructuralResult:
    """Certified when the closure reaches every state and the automorphism group is trivial."""
    H = structural_hypergraph(sys, include_inputs)
    cl = observational_closure(H)
    autos: List[Tuple[int, ...]] = []
    if cl.T is None:
        return StructuralResult(False, f"states {cl.unreached} are not reached from any output", None, cl.layers, cl.distance, autos, cl.unreached)
    try:
        autos = hypergraph_automorphisms(H, fix_outputs, max_n)
    except AutomorphismLimit as exc:
        return StructuralResult(False, str(exc), cl.T, cl.layers, cl.distance)
    nontrivial = [p for p in autos if p != tuple(range(1, H.n + 1))]
    if nontrivial:
        return StructuralResult(False, f"nontrivial automorphism {nontrivial[0]}", cl.T, cl.layers, cl.distance, autos)
    return StructuralResult(True, "every state reached and the automorphism group is trivial", cl.T, cl.layers, cl.distance, autos)


def permutation_cycles(p: Sequence[int]) -> List[Tuple[int, ...]]:
    seen = set()
    cycles = []
    for start in range(1, len(p) + 1):
        if start in seen:
            continue
        cyc = []
        v = start
        while v not in seen:
            seen.add(v)
            cyc.append(v)
            v = p[v - 1]
        if len(cyc) > 1:
            cycles.append(tuple(cyc))
    return cycles
