"""Community modeling: stakeholders, their polymorph states, and the
communication circuits between them.

Participants are information sources *and* sinks. A circuit between two
participants exists when one's information needs intersect the other's
outputs, and it multiplexes every matched flow. A fully connected community
of n participants has n(n-1)/2 possible circuits; real deployments keep the
circuits worth their cost and usually aggregate the rest through a hub
(star) rather than wiring the full mesh.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

from ..errors import ValidationError
from .utility import net_utility

BASE_STATES = ("online", "offline", "mobile", "stationary")


class Topology(str, Enum):
    MESH = "mesh"
    STAR = "star"
    RING = "ring"


@dataclass(frozen=True)
class Stakeholder:
    """A community participant (possibly one state of a polymorphic one)."""

    name: str
    base_states: frozenset[str] = frozenset()
    needs: frozenset[str] = frozenset()
    outputs: frozenset[str] = frozenset()

    def __post_init__(self):
        unknown = set(self.base_states) - set(BASE_STATES)
        if unknown:
            raise ValidationError(f"unknown base states {sorted(unknown)}")

    @classmethod
    def of(cls, name: str, *, states: Iterable[str] = (), needs: Iterable[str] = (),
           outputs: Iterable[str] = ()) -> "Stakeholder":
        return cls(name, frozenset(states), frozenset(needs), frozenset(outputs))


def expand_polymorphs(stakeholder: Stakeholder) -> list[Stakeholder]:
    """Split a multi-state stakeholder into one participant per base state;
    each state is a distinct participant for circuit purposes."""
    if len(stakeholder.base_states) <= 1:
        return [stakeholder]
    return [replace(stakeholder, name=f"{stakeholder.name}[{state}]",
                    base_states=frozenset({state}))
            for state in sorted(stakeholder.base_states)]


@dataclass(frozen=True)
class Circuit:
    a: str
    b: str
    flows: frozenset[str]
    utility: Optional[float] = None
    cost: Optional[float] = None

    def endpoints(self) -> frozenset[str]:
        return frozenset({self.a, self.b})

    def net(self) -> Optional[float]:
        if self.utility is None or self.cost is None:
            return None
        return net_utility(self.utility, self.cost)


@dataclass
class CommunityGraph:
    participants: list[Stakeholder]
    circuits: list[Circuit] = field(default_factory=list)
    topology: Topology = Topology.MESH

    def __post_init__(self):
        names = {p.name for p in self.participants}
        if len(names) != len(self.participants):
            raise ValidationError("participant names must be unique")
        by_name = {p.name: p for p in self.participants}
        for circuit in self.circuits:
            if circuit.a not in names or circuit.b not in names:
                raise ValidationError(f"circuit {circuit.a}--{circuit.b} references "
                                      "unknown participants")
            a, b = by_name[circuit.a], by_name[circuit.b]
            allowed = (a.needs & b.outputs) | (b.needs & a.outputs)
            if not circuit.flows <= allowed:
                raise ValidationError(
                    f"circuit {circuit.a}--{circuit.b} carries flows neither "
                    f"side produces for the other: {sorted(circuit.flows - allowed)}")

    def flow_pairs(self) -> set[tuple[str, str, str]]:
        """(producer, consumer, flow) triples reachable over direct circuits."""
        by_name = {p.name: p for p in self.participants}
        out = set()
        for circuit in self.circuits:
            a, b = by_name[circuit.a], by_name[circuit.b]
            for flow in circuit.flows:
                if flow in a.outputs and flow in b.needs:
                    out.add((a.name, b.name, flow))
                if flow in b.outputs and flow in a.needs:
                    out.add((b.name, a.name, flow))
        return out

    def to_record(self) -> dict:
        return {
            "topology": self.topology.value,
            "participants": [{"name": p.name,
                              "base_states": sorted(p.base_states),
                              "needs": sorted(p.needs),
                              "outputs": sorted(p.outputs)}
                             for p in self.participants],
            "circuits": [{"a": c.a, "b": c.b, "flows": sorted(c.flows),
                          "utility": c.utility, "cost": c.cost}
                         for c in self.circuits],
        }


def circuit_count(n: int) -> int:
    """Possible circuits in a fully connected community of n participants."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValidationError("participant count must be a non-negative integer")
    return n * (n - 1) // 2


def derive_circuits(stakeholders: Sequence[Stakeholder], *,
                    expand_states: bool = False) -> CommunityGraph:
    """Build the community graph by matching needs against outputs.

    A circuit (a, b) exists when a needs something b outputs or vice versa,
    labeled with the matched flows (one circuit carries them all). The result
    never exceeds the n(n-1)/2 bound by construction.
    """
    participants: list[Stakeholder] = []
    for s in stakeholders:
        participants.extend(expand_polymorphs(s) if expand_states else [s])
    circuits = []
    for i, a in enumerate(participants):
        for b in participants[i + 1:]:
            flows = (a.needs & b.outputs) | (b.needs & a.outputs)
            if flows:
                circuits.append(Circuit(a.name, b.name, frozenset(flows)))
    return CommunityGraph(participants, circuits, Topology.MESH)


def select_circuits(graph: CommunityGraph, threshold: float) -> dict:
    """Keep circuits whose net utility clears the threshold; defer the rest
    with the reason, so the build list and the waiting list are explicit."""
    kept, deferred = [], []
    for circuit in graph.circuits:
        net = circuit.net()
        if net is None:
            deferred.append({"circuit": (circuit.a, circuit.b),
                             "reason": "utility or cost unknown"})
        elif net > threshold:
            kept.append(circuit)
        else:
            deferred.append({"circuit": (circuit.a, circuit.b),
                             "reason": f"net utility {net:g} is not above "
                                       f"threshold {threshold:g}"})
    subgraph = CommunityGraph(list(graph.participants), kept, graph.topology)
    return {"selected": subgraph, "deferred": deferred}


def aggregate_topology(graph: CommunityGraph, hub: str) -> CommunityGraph:
    """Fold direct circuits into a star through ``hub``.

    Every (a, b) becomes (a, hub) and (hub, b); the hub relays, so each spoke
    carries the union of flows its endpoint needed or produced, every flow
    stays reachable within two hops, and a graph already shaped this way is
    returned unchanged (the fold is idempotent).
    """
    participants = list(graph.participants)
    names = {p.name for p in participants}
    if hub not in names:
        participants.append(Stakeholder.of(hub))
        names.add(hub)
    hub_needs: set[str] = set()
    hub_outputs: set[str] = set()
    spoke_flows: dict[str, set[str]] = {}
    for circuit in graph.circuits:
        for end in (circuit.a, circuit.b):
            if end == hub:
                continue
            spoke_flows.setdefault(end, set()).update(circuit.flows)
        hub_needs.update(circuit.flows)
        hub_outputs.update(circuit.flows)
    upgraded = []
    for p in participants:
        if p.name == hub:
            upgraded.append(replace(p, needs=frozenset(set(p.needs) | hub_needs),
                                    outputs=frozenset(set(p.outputs) | hub_outputs)))
        else:
            upgraded.append(p)
    circuits = [Circuit(name, hub, frozenset(flows))
                for name, flows in sorted(spoke_flows.items())]
    return CommunityGraph(upgraded, circuits, Topology.STAR)
