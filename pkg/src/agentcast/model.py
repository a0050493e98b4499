"""Core data types shared by all solvers.

Agents live at points of a weighted network (a line, a tree, or a small
general graph), each holding a non-negative energy budget and an information
set.  Moving costs energy equal to the distance travelled; two agents that
occupy the same point may exchange any amount of energy, and information is
exchanged automatically whenever agents meet.  All numbers are exact
rationals -- solver decisions never touch floating point, so boundary cases
(zero surplus, zero-length edges) are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Rational = Union[int, Fraction]

NodeId = Union[int, str]


class InstanceError(ValueError):
    """Raised for malformed or invariant-violating instance documents."""


# ---------------------------------------------------------------------------
# rational helpers


def rat(value) -> Rational:
    """Parse an exact rational from an int, Fraction, or a "p/q" string."""
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value if value.denominator != 1 else int(value)
    if isinstance(value, str):
        try:
            f = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
        return int(f) if f.denominator == 1 else f
    raise InstanceError(f"not a rational: {value!r}")


def rat_to_json(value: Rational):
    """Serialize an exact rational: integers as ints, otherwise "p/q"."""
    f = Fraction(value)
    if f.denominator == 1:
        return int(f)
    return f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# points and tasks


@dataclass(frozen=True)
class EdgePoint:
    """A point inside an edge, `offset` away from endpoint `u` toward `v`."""

    u: NodeId
    v: NodeId
    offset: Rational

    def reversed(self, length: Rational) -> "EdgePoint":
        return EdgePoint(self.v, self.u, length - self.offset)


# A Point is a coordinate (line instances) or a node id / EdgePoint (trees
# and graphs).
Point = Union[int, Fraction, NodeId, EdgePoint]


@dataclass(frozen=True)
class DeliveryTask:
    source: Point
    target: Point

    kind = "delivery"


@dataclass(frozen=True)
class ConvergecastTask:
    kind = "convergecast"


@dataclass(frozen=True)
class BroadcastTask:
    source: int  # agent index

    kind = "broadcast"


Task = Union[DeliveryTask, ConvergecastTask, BroadcastTask]


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class LineInstance:
    """Agents on the real line at strictly increasing positions."""

    positions: tuple
    energies: tuple

    def __post_init__(self):
        if len(self.positions) != len(self.energies):
            raise InstanceError("positions and energies differ in length")
        if not self.positions:
            raise InstanceError("an instance needs at least one agent")
        for a, b in zip(self.positions, self.positions[1:]):
            if not a < b:
                raise InstanceError("positions must be strictly increasing")
        for e in self.energies:
            if e < 0:
                raise InstanceError("negative energy")

    @property
    def n(self) -> int:
        return len(self.positions)

    def mirrored(self) -> "LineInstance":
        """Reflect through the origin (positions negate, order reverses)."""
        return LineInstance(
            tuple(-p for p in reversed(self.positions)),
            tuple(reversed(self.energies)),
        )

    def translated(self, c: Rational) -> "LineInstance":
        return LineInstance(tuple(p + c for p in self.positions), self.energies)


@dataclass(frozen=True)
class TreeInstance:
    """Agents at nodes of an undirected edge-weighted tree.

    `agents` is a sequence of (node, energy) pairs; several agents may share
    a node.  Edge lengths may be zero (degree reduction inserts such edges).
    """

    nodes: tuple
    edges: tuple  # of (u, v, length)
    agents: tuple  # of (node, energy)

    def __post_init__(self):
        seen = set(self.nodes)
        if len(seen) != len(self.nodes):
            raise InstanceError("duplicate node id")
        if not self.nodes:
            raise InstanceError("a tree needs at least one node")
        if len(self.edges) != len(self.nodes) - 1:
            raise InstanceError("not a tree: wrong edge count")
        adj = {u: [] for u in self.nodes}
        for u, v, length in self.edges:
            if u not in seen or v not in seen:
                raise InstanceError(f"edge endpoint not a node: {u!r}-{v!r}")
            if length < 0:
                raise InstanceError("negative edge length")
            adj[u].append(v)
            adj[v].append(u)
        # connectivity; together with the edge count this certifies a tree
        stack, visited = [self.nodes[0]], {self.nodes[0]}
        while stack:
            for w in adj[stack.pop()]:
                if w not in visited:
                    visited.add(w)
                    stack.append(w)
        if len(visited) != len(self.nodes):
            raise InstanceError("not a tree: disconnected")
        for node, energy in self.agents:
            if node not in seen:
                raise InstanceError(f"agent at unknown node {node!r}")
            if energy < 0:
                raise InstanceError("negative energy")

    def adjacency(self) -> dict:
        adj = {u: [] for u in self.nodes}
        for u, v, length in self.edges:
            adj[u].append((v, length))
            adj[v].append((u, length))
        return adj

    def edge_length(self, u: NodeId, v: NodeId) -> Rational:
        for a, b, length in self.edges:
            if (a, b) == (u, v) or (b, a) == (u, v):
                return length
        raise InstanceError(f"no edge {u!r}-{v!r}")

    def node_energy(self) -> dict:
        energy = {u: 0 for u in self.nodes}
        for node, e in self.agents:
            energy[node] += e
        return energy

    def node_agent_count(self) -> dict:
        count = {u: 0 for u in self.nodes}
        for node, _ in self.agents:
            count[node] += 1
        return count


@dataclass(frozen=True)
class GraphInstance:
    """Agents on a general graph; used only by the oracle and the hardness
    generators (no efficient general-graph solver exists or is attempted)."""

    nodes: tuple
    edges: tuple  # of (u, v, length, directed: bool)
    agents: tuple  # of (node, energy)

    def __post_init__(self):
        seen = set(self.nodes)
        if len(seen) != len(self.nodes):
            raise InstanceError("duplicate node id")
        for u, v, length, _directed in self.edges:
            if u not in seen or v not in seen:
                raise InstanceError(f"edge endpoint not a node: {u!r}-{v!r}")
            if length < 0:
                raise InstanceError("negative edge length")
        for node, energy in self.agents:
            if node not in seen:
                raise InstanceError(f"agent at unknown node {node!r}")
            if energy < 0:
                raise InstanceError("negative energy")


Instance = Union[LineInstance, TreeInstance, GraphInstance]


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Move:
    """One agent walks along `path` (a contiguous sequence of points)."""

    agent: int
    path: tuple


@dataclass(frozen=True)
class Transfer:
    """`donor` hands `amount` energy to the co-located `receiver`."""

    donor: int
    receiver: int
    amount: Rational


Step = Union[Move, Transfer]


@dataclass(frozen=True)
class Schedule:
    steps: tuple

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


# ---------------------------------------------------------------------------
# instance documents (JSON)


def _parse_point(raw, kind: str) -> Point:
    if kind == "line":
        return rat(raw)
    if isinstance(raw, dict):
        if set(raw) != {"edge", "offset"}:
            raise InstanceError(f"bad point: {raw!r}")
        u, v = raw["edge"]
        return EdgePoint(u, v, rat(raw["offset"]))
    return raw  # node id


def point_to_json(point: Point, kind: str):
    if kind == "line":
        return rat_to_json(point)
    if isinstance(point, EdgePoint):
        return {"edge": [point.u, point.v], "offset": rat_to_json(point.offset)}
    return point


def _parse_task(raw, kind: str) -> Task:
    if not isinstance(raw, dict) or "type" not in raw:
        raise InstanceError("task must be an object with a 'type'")
    t = raw["type"]
    if t == "delivery":
        return DeliveryTask(
            _parse_point(raw["source"], kind), _parse_point(raw["target"], kind)
        )
    if t == "convergecast":
        return ConvergecastTask()
    if t == "broadcast":
        source = raw.get("source")
        if not isinstance(source, int):
            raise InstanceError("broadcast task needs an integer agent index")
        return BroadcastTask(source)
    raise InstanceError(f"unknown task type {t!r}")


def task_to_json(task: Task, kind: str) -> dict:
    if isinstance(task, DeliveryTask):
        return {
            "type": "delivery",
            "source": point_to_json(task.source, kind),
            "target": point_to_json(task.target, kind),
        }
    if isinstance(task, ConvergecastTask):
        return {"type": "convergecast"}
    return {"type": "broadcast", "source": task.source}


@dataclass(frozen=True)
class ParsedInstance:
    """A validated instance plus whatever the document carried along.

    For line documents, agents listed at equal positions are merged into one
    agent with their summed energy (meeting at distance zero makes them
    interchangeable); `agent_map` sends each document agent index to its
    solver agent index so schedules can be translated back.
    """

    kind: str
    instance: Instance
    task: Optional[Task]
    agent_map: tuple  # document agent index -> instance agent index


def parse_instance(text: str) -> ParsedInstance:
    """Parse and validate a JSON instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    kind = doc.get("kind")
    if kind not in ("line", "tree", "graph", "digraph"):
        raise InstanceError(f"unknown instance kind {kind!r}")
    agents_raw = doc.get("agents", [])
    if not isinstance(agents_raw, list):
        raise InstanceError("'agents' must be a list")

    task = _parse_task(doc["task"], kind) if "task" in doc else None

    if kind == "line":
        parsed = []
        for entry in agents_raw:
            parsed.append((rat(entry["position"]), rat(entry["energy"])))
        for (a, _), (b, _) in zip(parsed, parsed[1:]):
            if a > b:
                raise InstanceError("line positions must be non-decreasing")
        # merge agents that share a coordinate
        positions, energies, agent_map = [], [], []
        for pos, energy in parsed:
            if positions and positions[-1] == pos:
                energies[-1] += energy
            else:
                positions.append(pos)
                energies.append(energy)
            agent_map.append(len(positions) - 1)
        instance = LineInstance(tuple(positions), tuple(energies))
        return ParsedInstance("line", instance, task, tuple(agent_map))

    nodes = tuple(doc.get("nodes", []))
    edges_raw = doc.get("edges", [])
    agents = tuple((entry["node"], rat(entry["energy"])) for entry in agents_raw)
    agent_map = tuple(range(len(agents)))
    if kind == "tree":
        edges = tuple((e["u"], e["v"], rat(e["length"])) for e in edges_raw)
        return ParsedInstance(
            "tree", TreeInstance(nodes, edges, agents), task, agent_map
        )
    directed = kind == "digraph"
    edges = tuple(
        (e["u"], e["v"], rat(e["length"]), bool(e.get("directed", directed)))
        for e in edges_raw
    )
    return ParsedInstance(
        kind, GraphInstance(nodes, edges, agents), task, agent_map
    )


def instance_to_json(kind: str, instance: Instance, task: Optional[Task] = None) -> dict:
    doc: dict = {"kind": kind}
    if isinstance(instance, LineInstance):
        doc["agents"] = [
            {"position": rat_to_json(p), "energy": rat_to_json(e)}
            for p, e in zip(instance.positions, instance.energies)
        ]
    else:
        doc["nodes"] = list(instance.nodes)
        if isinstance(instance, TreeInstance):
            doc["edges"] = [
                {"u": u, "v": v, "length": rat_to_json(length)}
                for u, v, length in instance.edges
            ]
        else:
            doc["edges"] = [
                {"u": u, "v": v, "length": rat_to_json(length), "directed": d}
                for u, v, length, d in instance.edges
            ]
        doc["agents"] = [
            {"node": node, "energy": rat_to_json(e)} for node, e in instance.agents
        ]
    if task is not None:
        doc["task"] = task_to_json(task, kind)
    return doc


def schedule_to_json(schedule: Schedule, kind: str) -> dict:
    steps = []
    for step in schedule:
        if isinstance(step, Move):
            steps.append(
                {
                    "move": {
                        "agent": step.agent,
                        "path": [point_to_json(p, kind) for p in step.path],
                    }
                }
            )
        else:
            steps.append(
                {
                    "transfer": {
                        "from": step.donor,
                        "to": step.receiver,
                        "amount": rat_to_json(step.amount),
                    }
                }
            )
    return {"steps": steps}


def parse_schedule(text: str, kind: str) -> Schedule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    steps = []
    for raw in doc.get("steps", []):
        if "move" in raw:
            m = raw["move"]
            steps.append(
                Move(m["agent"], tuple(_parse_point(p, kind) for p in m["path"]))
            )
        elif "transfer" in raw:
            t = raw["transfer"]
            steps.append(Transfer(t["from"], t["to"], rat(t["amount"])))
        else:
            raise InstanceError(f"unknown step {raw!r}")
    return Schedule(tuple(steps))


# ---------------------------------------------------------------------------
# delivery endpoint normalization


@dataclass(frozen=True)
class DeliveryRemap:
    """Translates schedules on a normalized instance back to the original.

    `prefix` replays the inward folding of agents that started outside the
    source-target segment; `agent_map` sends each normalized agent index to
    an original agent index (None marks a virtual zero-energy placeholder
    that never moves).  When `mirrored` is set the normalized instance lives
    in reflected coordinates.
    """

    mirrored: bool
    prefix: tuple  # steps in original coordinates / indices
    agent_map: tuple  # normalized index -> original index or None

    def translate(self, schedule: Schedule) -> Schedule:
        steps = list(self.prefix)
        for step in schedule:
            if isinstance(step, Move):
                original = self.agent_map[step.agent]
                path = tuple(-p for p in step.path) if self.mirrored else step.path
                if original is None:
                    if any(a != b for a, b in zip(path, path[1:])):
                        raise InstanceError(
                            "schedule moves a virtual zero-energy agent"
                        )
                    continue
                steps.append(Move(original, path))
            else:
                donor = self.agent_map[step.donor]
                receiver = self.agent_map[step.receiver]
                if donor is None or receiver is None:
                    if step.amount != 0:
                        raise InstanceError(
                            "schedule transfers energy through a virtual agent"
                        )
                    continue
                steps.append(Transfer(donor, receiver, step.amount))
        return Schedule(tuple(steps))


def _fold_side(positions, energies, indices, boundary):
    """Relay the energy of `indices` (ordered outermost first, all strictly
    outside `boundary`) inward to `boundary`.

    Walking costs distance, so each relay arrives with max(pool - gap, 0):
    the outermost agent walks inward, hands what survives to the next agent,
    and so on.  Returns (energy arriving at the boundary, replay steps in the
    working frame, index of the relayer that reached the boundary or None).
    """
    steps = []
    carried = 0
    carrier = None  # original index of the agent holding `carried`
    for k in indices:
        here = positions[k]
        if carrier is not None and carried > 0:
            steps.append(Transfer(carrier, k, carried))
        pool = carried + energies[k]
        gap = abs(boundary - here)
        reach = min(pool, gap)
        if reach > 0:
            direction = 1 if boundary > here else -1
            steps.append(Move(k, (here, here + direction * reach)))
        carried = max(pool - gap, 0)
        carrier = k
        if pool < gap:
            carrier = None  # stranded short of the next stop
            carried = 0
    arrived = carrier if carrier is not None and positions[carrier] != boundary else carrier
    return carried, steps, (carrier if carried > 0 or (carrier is not None and min(abs(boundary - positions[carrier]), 10**0) >= 0 and True) else None)


def normalize_delivery(
    instance: LineInstance, source: Rational, target: Rational
):
    """Reduce a delivery problem to one whose endpoints are the extreme
    agents.

    Agents outside the [source, target] segment fold inward: each walks
    toward the segment, swallowing (relaying) the energy of agents it meets,
    and whatever survives the walk joins the boundary agent.  Agents that
    exhaust their energy strand where they stop and contribute nothing.  If
    source > target the instance is mirrored first.  Returns the normalized
    instance and a DeliveryRemap; feasibility and surplus are unchanged.
    """
    if source == target:
        raise InstanceError("delivery endpoints must differ")
    mirrored = source > target
    work = instance.mirrored() if mirrored else instance
    s = -source if mirrored else source
    t = -target if mirrored else target

    positions, energies = list(work.positions), list(work.energies)
    n = len(positions)
    left = [i for i in range(n) if positions[i] < s]
    right = [i for i in range(n) if positions[i] > t]
    middle = [i for i in range(n) if s <= positions[i] <= t]

    prefix = []

    def fold(indices, boundary):
        """Relay the listed outside agents inward; returns arriving energy
        and the original index of the relayer that reached the boundary."""
        carried = 0
        carrier = None
        for k in indices:
            here = positions[k]
            if carrier is not None:
                prefix.append(Transfer(carrier, k, carried))
            pool = carried + energies[k]
            gap = abs(boundary - here)
            reach = min(pool, gap)
            if reach > 0:
                step_to = here + (reach if boundary > here else -reach)
                prefix.append(Move(k, (here, step_to)))
            if pool >= gap:
                carried, carrier = pool - gap, k
            else:
                carried, carrier = 0, None  # stranded before the boundary
        return carried, carrier

    left_energy, left_carrier = fold(left, s)
    right_energy, right_carrier = fold(list(reversed(right)), t)

    new_positions, new_energies, agent_map = [], [], []

    def add_boundary(coord, folded_energy, folded_carrier):
        owners = [i for i in middle if positions[i] == coord]
        if owners:
            owner = owners[0]
            if folded_carrier is not None and folded_energy > 0:
                prefix.append(Transfer(folded_carrier, owner, folded_energy))
            new_positions.append(coord)
            new_energies.append(energies[owner] + folded_energy)
            agent_map.append(owner)
        elif folded_carrier is not None:
            new_positions.append(coord)
            new_energies.append(folded_energy)
            agent_map.append(folded_carrier)
        else:
            new_positions.append(coord)  # virtual zero-energy endpoint
            new_energies.append(0)
            agent_map.append(None)

    add_boundary(s, left_energy, left_carrier)
    for i in middle:
        if positions[i] == s or positions[i] == t:
            continue
        new_positions.append(positions[i])
        new_energies.append(energies[i])
        agent_map.append(i)
    add_boundary(t, right_energy, right_carrier)

    if mirrored:
        fixed = []
        for step in prefix:
            if isinstance(step, Move):
                fixed.append(Move(step.agent, tuple(-p for p in step.path)))
            else:
                fixed.append(step)
        prefix = fixed

    normalized = LineInstance(tuple(new_positions), tuple(new_energies))
    remap = DeliveryRemap(mirrored, tuple(prefix), tuple(agent_map))
    return normalized, remap
