"""Lattice definitions.

A lattice is a finite collection of Ising spins (values -1/+1) on named nodes,
pair couplings on edges, optional per-node fields, optional three-spin terms,
and an inverse temperature. Four nodes may carry distinguished roles for
Bell-type analysis: two outcome spins (sigma_1, sigma_2) and two analyzer
spins (sigma_a, sigma_b); everything else is hidden.

The energy convention is

    H(s) = -sum_edges J_ij s_i s_j - sum_nodes h_i s_i
           + sum_triples c_ijk s_i s_j s_k + offset

so positive J favors alignment and positive h favors +1.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidConfigurationError, LatticeDefinitionError

__all__ = [
    "NodeRole",
    "Node",
    "Edge",
    "CubicTerm",
    "Lattice",
    "Spin",
    "energy",
]

Spin = int  # -1 or +1


class NodeRole(str, Enum):
    """Role of a node in Bell-type analysis."""

    OUTCOME_1 = "outcome1"
    OUTCOME_2 = "outcome2"
    ANALYZER_A = "analyzer_a"
    ANALYZER_B = "analyzer_b"
    HIDDEN = "hidden"

    @classmethod
    def from_label(cls, label: str) -> "NodeRole":
        try:
            return cls(label)
        except ValueError:
            valid = ", ".join(r.value for r in cls)
            raise LatticeDefinitionError(
                f"unknown node role {label!r}; expected one of: {valid}"
            ) from None


#: Roles that at most one node may carry.
UNIQUE_ROLES = (
    NodeRole.OUTCOME_1,
    NodeRole.OUTCOME_2,
    NodeRole.ANALYZER_A,
    NodeRole.ANALYZER_B,
)


@dataclass(frozen=True, slots=True)
class Node:
    id: str
    role: NodeRole = NodeRole.HIDDEN
    h: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.role, NodeRole):
            raise LatticeDefinitionError(
                f"node {self.id!r} role must be a NodeRole or its label, got {self.role!r}"
            )


@dataclass(frozen=True, slots=True)
class Edge:
    a: str
    b: str
    j: float

    def key(self) -> frozenset[str]:
        return frozenset((self.a, self.b))


@dataclass(frozen=True, slots=True)
class CubicTerm:
    nodes: tuple[str, str, str]
    c: float


@dataclass(frozen=True)
class Lattice:
    """Immutable lattice definition.

    Node declaration order is significant: it fixes the configuration
    encoding (node i lives at bit i) and the axis order of joint tables.
    """

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    beta: float = 1.0
    cubic: tuple[CubicTerm, ...] = ()
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "cubic", tuple(self.cubic))
        self._validate()

    def _validate(self) -> None:
        if not self.nodes:
            raise LatticeDefinitionError("lattice has no nodes")
        if not (self.beta > 0.0):
            raise LatticeDefinitionError(f"beta must be positive, got {self.beta}")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise LatticeDefinitionError(f"duplicate node ids: {dupes}")
        known = set(ids)
        seen_edges: set[frozenset[str]] = set()
        for e in self.edges:
            if e.a == e.b:
                raise LatticeDefinitionError(f"edge {e.a}-{e.b} is a self loop")
            for end in (e.a, e.b):
                if end not in known:
                    raise LatticeDefinitionError(
                        f"edge {e.a}-{e.b} references unknown node {end!r}"
                    )
            if e.key() in seen_edges:
                raise LatticeDefinitionError(f"duplicate edge {e.a}-{e.b}")
            seen_edges.add(e.key())
        for t in self.cubic:
            if len(set(t.nodes)) != 3:
                raise LatticeDefinitionError(f"cubic term {t.nodes} repeats a node")
            for end in t.nodes:
                if end not in known:
                    raise LatticeDefinitionError(
                        f"cubic term {t.nodes} references unknown node {end!r}"
                    )
        for role in UNIQUE_ROLES:
            holders = [n.id for n in self.nodes if n.role is role]
            if len(holders) > 1:
                raise LatticeDefinitionError(
                    f"role {role.value} assigned to multiple nodes: {holders}"
                )

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_parts(
        cls,
        nodes: Iterable[tuple],
        edges: Iterable[tuple[str, str, float]],
        beta: float = 1.0,
        cubic: Iterable[tuple[tuple[str, str, str], float]] = (),
        offset: float = 0.0,
    ) -> "Lattice":
        """Build a lattice from plain tuples.

        Node tuples are (id,), (id, role) or (id, role, h); the role may be a
        NodeRole or its label string.
        """
        built = []
        defaults = (NodeRole.HIDDEN, 0.0)
        for item in nodes:
            item = tuple(item)
            nid, role, h = item + defaults[len(item) - 1 :]
            if isinstance(role, str) and not isinstance(role, NodeRole):
                role = NodeRole.from_label(role)
            built.append(Node(str(nid), role, float(h)))
        return cls(
            nodes=tuple(built),
            edges=tuple(Edge(str(a), str(b), float(j)) for a, b, j in edges),
            beta=float(beta),
            cubic=tuple(CubicTerm(tuple(str(n) for n in ns), float(c)) for ns, c in cubic),
            offset=float(offset),
        )

    # -- lookups ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @property
    def index(self) -> dict[str, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    @property
    def hidden_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.role is NodeRole.HIDDEN)

    def role_id(self, role: NodeRole) -> str | None:
        for n in self.nodes:
            if n.role is role:
                return n.id
        return None

    def bell_ids(self) -> tuple[str, str, str, str]:
        """Ids of (outcome1, outcome2, analyzer_a, analyzer_b)."""
        out = []
        for role in UNIQUE_ROLES:
            nid = self.role_id(role)
            if nid is None:
                raise LatticeDefinitionError(f"lattice has no {role.value} node")
            out.append(nid)
        return tuple(out)

    def node(self, nid: str) -> Node:
        for n in self.nodes:
            if n.id == nid:
                return n
        raise InvalidConfigurationError(f"unknown node {nid!r}")

    def edges_at(self, nid: str) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if nid in (e.a, e.b))

    # -- derived lattices --------------------------------------------------------

    def with_fields(self, fields: Mapping[str, float]) -> "Lattice":
        """New lattice with the given nodes' fields replaced."""
        unknown = set(fields) - set(self.node_ids)
        if unknown:
            raise InvalidConfigurationError(f"unknown nodes in field update: {sorted(unknown)}")
        nodes = tuple(
            dataclasses.replace(n, h=float(fields[n.id])) if n.id in fields else n
            for n in self.nodes
        )
        return dataclasses.replace(self, nodes=nodes)

    def with_couplings(self, couplings: Mapping[frozenset[str], float]) -> "Lattice":
        """New lattice with the given edges' couplings replaced (keys are
        frozensets of the two endpoint ids)."""
        present = {e.key() for e in self.edges}
        unknown = set(couplings) - present
        if unknown:
            raise InvalidConfigurationError(
                f"unknown edges in coupling update: {sorted(tuple(sorted(k)) for k in unknown)}"
            )
        edges = tuple(
            dataclasses.replace(e, j=float(couplings[e.key()])) if e.key() in couplings else e
            for e in self.edges
        )
        return dataclasses.replace(self, edges=edges)

    def with_scaled_edges(self, keys: Iterable[frozenset[str]], factor: float) -> "Lattice":
        """New lattice with the selected edges' couplings multiplied by factor."""
        keyset = set(keys)
        return self.with_couplings({e.key(): e.j * factor for e in self.edges if e.key() in keyset})


def _check_config(lattice: Lattice, config: Mapping[str, Spin], require_full: bool) -> None:
    known = set(lattice.node_ids)
    for nid, s in config.items():
        if nid not in known:
            raise InvalidConfigurationError(f"unknown node {nid!r} in configuration")
        if s not in (-1, 1):
            raise InvalidConfigurationError(f"node {nid!r} has spin {s!r}; expected -1 or +1")
    if require_full and len(config) != lattice.n:
        missing = sorted(known - set(config))
        raise InvalidConfigurationError(f"configuration misses nodes: {missing}")


def energy(lattice: Lattice, config: Mapping[str, Spin]) -> float:
    """H(s) for one full configuration (plain float arithmetic)."""
    _check_config(lattice, config, require_full=True)
    e = lattice.offset
    for node in lattice.nodes:
        e -= node.h * config[node.id]
    for edge in lattice.edges:
        e -= edge.j * config[edge.a] * config[edge.b]
    for term in lattice.cubic:
        i, j, k = term.nodes
        e += term.c * config[i] * config[j] * config[k]
    return e
