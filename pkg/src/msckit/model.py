"""Kripke models with identifiers: the distributed-system substrate.

A model is a finite directed labeled graph (self-loops allowed).  Each node
carries a bit per proposition symbol; the distinguished symbols spell out
the node's identifier.  Messages travel opposite to the edge direction, so
``succ(w)`` lists the nodes w can hear from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property


class ModelError(Exception):
    pass


class DuplicateId(ModelError):
    def __init__(self, w: int, v: int, id_string: str):
        super().__init__(f"nodes {w} and {v} share the identifier {id_string!r}")
        self.nodes = (w, v)
        self.id_string = id_string


class DegreeExceeded(ModelError):
    def __init__(self, w: int, outdeg: int, delta: int):
        super().__init__(f"node {w} has out-degree {outdeg} > delta {delta}")
        self.node = w
        self.outdeg = outdeg
        self.delta = delta


class NotSimpleGraph(ModelError):
    pass


def bit_length(k: int) -> int:
    """Number of bits of k in binary: floor(log2 k) + 1, and 1 for k=0."""
    return max(1, k.bit_length())


@dataclass(frozen=True)
class PropositionSet:
    """Ordered proposition symbols, partitioned into ordinary and distinguished.

    The global order puts all ordinary symbols (declaration order) before all
    distinguished symbols (index order); bit positions everywhere in the
    toolkit refer to this order, 1-based.
    """

    ordinary: tuple[str, ...] = ()
    distinguished: tuple[str, ...] = ()

    def __post_init__(self):
        overlap = set(self.ordinary) & set(self.distinguished)
        if overlap:
            raise ModelError(f"ordinary/distinguished symbols overlap: {sorted(overlap)}")
        names = self.ordinary + self.distinguished
        if len(set(names)) != len(names):
            raise ModelError("duplicate proposition symbol")

    @property
    def all(self) -> tuple[str, ...]:
        return self.ordinary + self.distinguished

    def __contains__(self, name: str) -> bool:
        return name in self.ordinary or name in self.distinguished

    def index(self, name: str) -> int:
        """1-based position of name in the global order."""
        return self.all.index(name) + 1


@dataclass(frozen=True)
class KripkeModel:
    """Finite Kripke model (W, R, V) over a PropositionSet.

    Nodes are opaque integers 0..n-1.  ``valuation`` maps each symbol to the
    set of nodes where it holds; symbols absent from the mapping are false
    everywhere.  Immutable after construction.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    valuation: dict[str, frozenset[int]]
    props: PropositionSet
    _succ: dict[int, tuple[int, ...]] = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("model needs at least one node")
        for (u, v) in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ModelError(f"edge ({u}, {v}) out of range")
        for sym, nodes in self.valuation.items():
            if sym not in self.props:
                raise ModelError(f"valuation mentions unknown symbol {sym!r}")
            if any(not 0 <= w < self.n for w in nodes):
                raise ModelError(f"valuation of {sym!r} out of range")
        succ: dict[int, list[int]] = {w: [] for w in range(self.n)}
        for (u, v) in self.edges:
            succ[u].append(v)
        object.__setattr__(self, "_succ", {w: tuple(vs) for w, vs in succ.items()})

    # -- basic queries ----------------------------------------------------

    def nodes(self):
        return range(self.n)

    def succ(self, w: int) -> tuple[int, ...]:
        return self._succ[w]

    def out_degree(self, w: int) -> int:
        return len(self._succ[w])

    def max_out_degree(self) -> int:
        return max(len(vs) for vs in self._succ.values())

    def holds(self, sym: str, w: int) -> bool:
        nodes = self.valuation.get(sym)
        return nodes is not None and w in nodes

    # -- identifiers and inputs -------------------------------------------

    def identifier_bits(self, w: int) -> tuple[bool, ...]:
        """Truth of the distinguished symbols at w, in index order (bit 1 first)."""
        return tuple(self.holds(p, w) for p in self.props.distinguished)

    def identifier(self, w: int) -> str:
        """ID(w) as a string, most significant bit leftmost (bit 1 rightmost)."""
        bits = self.identifier_bits(w)
        return "".join("1" if b else "0" for b in reversed(bits))

    def local_input_bits(self, w: int) -> tuple[bool, ...]:
        """Truth of every symbol at w in the global order (bit 1 first)."""
        return tuple(self.holds(p, w) for p in self.props.all)

    def local_input(self, w: int) -> str:
        """Local input as a string, bit 1 rightmost (same rendering as IDs)."""
        bits = self.local_input_bits(w)
        return "".join("1" if b else "0" for b in reversed(bits))

    @cached_property
    def _neighbor_orders(self) -> dict[int, tuple[int, ...]]:
        return {
            w: tuple(sorted(self._succ[w], key=self.identifier))
            for w in range(self.n)
        }

    def neighbor_order(self, w: int) -> tuple[int, ...]:
        """succ(w) sorted lexicographically by identifier; position i is the ith neighbour."""
        return self._neighbor_orders[w]

    def neighbor(self, w: int, i: int) -> int | None:
        """The ith neighbour (1-based), or None if out-degree < i."""
        order = self._neighbor_orders[w]
        return order[i - 1] if 1 <= i <= len(order) else None


def validate_model(model: KripkeModel, delta: int) -> None:
    """Check membership in K(Pi, delta): distinct IDs and out-degree <= delta."""
    seen: dict[str, int] = {}
    for w in model.nodes():
        ident = model.identifier(w)
        if ident in seen:
            raise DuplicateId(seen[ident], w, ident)
        seen[ident] = w
    for w in model.nodes():
        outdeg = model.out_degree(w)
        if outdeg > delta:
            raise DegreeExceeded(w, outdeg, delta)


def id_prop_names(count: int) -> tuple[str, ...]:
    return tuple(f"p{i}" for i in range(1, count + 1))


def graph_to_kripke(n: int, edges) -> KripkeModel:
    """Kripke model of a simple undirected graph with node ids 1..n.

    Pi = Pi1 = {p1..p_log(n)}; node v satisfies p_i iff the ith least
    significant bit of its id (= v+1 for node handle v) is 1.
    """
    if n < 1:
        raise NotSimpleGraph("graph needs at least one node")
    directed: set[tuple[int, int]] = set()
    for (u, v) in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            raise NotSimpleGraph(f"edge ({u}, {v}) out of range 1..{n}")
        if u == v:
            raise NotSimpleGraph(f"self-loop at {u}")
        directed.add((u - 1, v - 1))
        directed.add((v - 1, u - 1))
    ell = bit_length(n)
    names = id_prop_names(ell)
    valuation = {
        names[i]: frozenset(v for v in range(n) if ((v + 1) >> i) & 1)
        for i in range(ell)
    }
    props = PropositionSet(ordinary=(), distinguished=names)
    return KripkeModel(n=n, edges=frozenset(directed), valuation=valuation, props=props)


# -- interchange format ----------------------------------------------------

def model_to_json(model: KripkeModel) -> dict:
    return {
        "n": model.n,
        "edges": sorted(list(e) for e in model.edges),
        "ordinary": list(model.props.ordinary),
        "distinguished": list(model.props.distinguished),
        "true_props": {
            str(w): [p for p in model.props.all if model.holds(p, w)]
            for w in model.nodes()
        },
    }


def model_from_json(data: dict) -> KripkeModel:
    props = PropositionSet(
        ordinary=tuple(data.get("ordinary", ())),
        distinguished=tuple(data.get("distinguished", ())),
    )
    true_props = data.get("true_props", {})
    valuation = {
        p: frozenset(
            int(w) for w, syms in true_props.items() if p in syms
        )
        for p in props.all
    }
    return KripkeModel(
        n=int(data["n"]),
        edges=frozenset((int(u), int(v)) for u, v in data.get("edges", ())),
        valuation=valuation,
        props=props,
    )


def save_model(model: KripkeModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> KripkeModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
