"""Parametric bridge generators: the five correct bridge types, the museum
replica configurations of the plank bridge, and corrected counterfactual
variants.

All generators are deterministic. Coordinates are quantized to 9 significant
digits so that model files round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidSpec, NotAReplica
from .model import (
    MATERIAL_PRESETS,
    BeamElement,
    CableElement,
    Load,
    NodalForce,
    Node,
    PointMass,
    Section,
    SelfWeight,
    StructureModel,
    Support,
    UniformLoad,
    build_model,
)
from .textio import quantize

DECK_SECTION = Section("timber-deck", area=0.06, second_moment=4.5e-4, depth=0.30)
PILLAR_SECTION = Section("timber-pillar", area=0.0225, second_moment=4.21875e-5, depth=0.15)
ROPE_AREA = 5e-4  # m^2
DEFAULT_G = 9.81


class BridgeKind(str, Enum):
    BEAM = "BeamBridge"
    CANTILEVER = "CantileverBridge"
    SUSPENSION = "SuspensionBridge"
    TRUSS = "TrussBridge"
    CABLE_STAYED = "CableStayedBridge"
    LEONARDO_REPLICA = "LeonardoReplica"
    LEONARDO_GROUNDED = "LeonardoGrounded"


class Wheels(str, Enum):
    NONE = "none"
    RIGHT_ONLY = "right"
    BOTH_SIDES = "both"


_REPLICA_KINDS = (BridgeKind.LEONARDO_REPLICA, BridgeKind.LEONARDO_GROUNDED)


@dataclass(frozen=True)
class BridgeSpec:
    """Parameters of one bridge to generate.

    ``deck_segments`` defaults per kind (for replicas: one bay per pillar
    plus one). A negative ``pillar_height`` puts the posts under the deck,
    which is how the corrected underslung variant is expressed.
    """

    kind: BridgeKind
    span: float = 12.0
    deck_segments: int | None = None
    pillar_count: int = 0
    pillar_height: float = 1.5
    wheels: Wheels = Wheels.NONE
    wheel_mass: float = 300.0
    mid_support: bool = False
    crosswise_top_ropes: bool = False
    deck_material: str = "timber"
    rope_material: str = "hemp-rope"
    rope_area: float = ROPE_AREA

    def resolved_deck_segments(self) -> int:
        if self.deck_segments is not None:
            return self.deck_segments
        if self.kind in _REPLICA_KINDS:
            return self.pillar_count + 1
        if self.kind is BridgeKind.SUSPENSION:
            return 8
        if self.kind in (BridgeKind.CANTILEVER, BridgeKind.TRUSS, BridgeKind.CABLE_STAYED):
            return 6
        return 8


class PresetId(str, Enum):
    LEONARDO_DRAWING = "LEONARDO_DRAWING"
    FLORENCE = "FLORENCE"
    GRANDE = "GRANDE"
    AMBOISE_SCALE = "AMBOISE_SCALE"
    AMBOISE_PARK = "AMBOISE_PARK"
    BARE_DECK = "BARE_DECK"
    GROUNDED_STAYED = "GROUNDED_STAYED"
    UNDERSLUNG = "UNDERSLUNG"


@dataclass(frozen=True)
class Preset:
    id: PresetId
    spec: BridgeSpec
    note: str


def presets() -> tuple[Preset, ...]:
    """The documented preset catalog, in stable order.

    Spans are chosen so node spacings are exact short decimals and model
    files round-trip bit-for-bit; nothing downstream depends on the
    absolute dimensions, only on orderings and oracle equalities.
    """
    return (
        Preset(
            PresetId.LEONARDO_DRAWING,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=12.0,
                pillar_count=11,
                wheels=Wheels.RIGHT_ONLY,
            ),
            "Codex Atlanticus folio 855r configuration: eleven pillars, wheels on the right shore only",
        ),
        Preset(
            PresetId.FLORENCE,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=10.5,
                pillar_count=6,
                wheels=Wheels.BOTH_SIDES,
            ),
            "Le Macchine di Leonardo (Florence) and Museum of Science and Industry (Chicago): six pillars, wheels on both sides",
        ),
        Preset(
            PresetId.GRANDE,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=12.0,
                pillar_count=5,
                wheels=Wheels.NONE,
            ),
            "Grande Exhibitions travelling show (and OMSI Portland): five pillars, no wheels at all",
        ),
        Preset(
            PresetId.AMBOISE_SCALE,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=12.0,
                pillar_count=9,
                wheels=Wheels.NONE,
                mid_support=True,
            ),
            "Chateau du Clos Luce (Amboise) scale model: nine columns and a small extra support under the middle",
        ),
        Preset(
            PresetId.AMBOISE_PARK,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=12.0,
                pillar_count=4,
                wheels=Wheels.NONE,
                crosswise_top_ropes=True,
            ),
            "Amboise park full-size model: two columns per side, tops roped crosswise; decorative wheels omitted",
        ),
        Preset(
            PresetId.BARE_DECK,
            BridgeSpec(BridgeKind.BEAM, span=12.0, deck_segments=8),
            "corrected comparator: the deck alone on its shore supports",
        ),
        Preset(
            PresetId.GROUNDED_STAYED,
            BridgeSpec(
                BridgeKind.LEONARDO_GROUNDED,
                span=12.0,
                pillar_count=5,
                wheels=Wheels.NONE,
            ),
            "corrected variant: the five-pillar replica with pillars continued into the riverbed",
        ),
        Preset(
            PresetId.UNDERSLUNG,
            BridgeSpec(
                BridgeKind.LEONARDO_REPLICA,
                span=12.0,
                deck_segments=2,
                pillar_count=1,
                pillar_height=-1.5,
            ),
            "corrected variant: post under the deck, ropes taut under gravity (inverted king post)",
        ),
    )


def preset(preset_id: PresetId | str) -> Preset:
    key = PresetId(preset_id)
    for p in presets():
        if p.id is key:
            return p
    raise InvalidSpec(f"unknown preset {preset_id!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Generation


class _Ids:
    """Monotonic id allocators for nodes and elements."""

    def __init__(self):
        self.next_node = 1
        self.next_element = 1

    def node(self) -> int:
        nid = self.next_node
        self.next_node += 1
        return nid

    def element(self) -> int:
        eid = self.next_element
        self.next_element += 1
        return eid


def _check_spec(spec: BridgeSpec) -> int:
    if not (spec.span > 0 and math.isfinite(spec.span)):
        raise InvalidSpec(f"span must be > 0, got {spec.span}")
    if spec.pillar_count < 0:
        raise InvalidSpec(f"pillar_count must be >= 0, got {spec.pillar_count}")
    if spec.wheel_mass < 0:
        raise InvalidSpec(f"wheel_mass must be >= 0, got {spec.wheel_mass}")
    nseg = spec.resolved_deck_segments()
    if nseg < spec.pillar_count + 1:
        raise InvalidSpec(f"deck_segments ({nseg}) must be >= pillar_count + 1 ({spec.pillar_count + 1})")
    if spec.kind in _REPLICA_KINDS:
        if spec.pillar_count and nseg % (spec.pillar_count + 1) != 0:
            raise InvalidSpec(
                f"deck_segments ({nseg}) must be a multiple of pillar_count + 1 "
                f"({spec.pillar_count + 1}) so pillars land on deck nodes"
            )
        if spec.pillar_count and spec.pillar_height == 0:
            raise InvalidSpec("pillar_height must be non-zero for replica kinds")
    if spec.mid_support and nseg % 2 != 0:
        raise InvalidSpec("mid_support needs an even number of deck segments")
    return nseg


def _deck(spec: BridgeSpec, ids: _Ids, nseg: int):
    """Deck chain on pin + roller shore supports."""
    nodes = [Node(ids.node(), quantize(spec.span * k / nseg), 0.0) for k in range(nseg + 1)]
    beams = [
        BeamElement(ids.element(), nodes[k].id, nodes[k + 1].id, spec.deck_material, DECK_SECTION.name)
        for k in range(nseg)
    ]
    supports = [
        Support(nodes[0].id, restrain_x=True, restrain_y=True),
        Support(nodes[-1].id, restrain_y=True),
    ]
    return nodes, beams, supports


def _wheel_loads(spec: BridgeSpec, deck_nodes) -> list[Load]:
    loads: list[Load] = []
    if spec.wheels is Wheels.RIGHT_ONLY:
        loads.append(PointMass(deck_nodes[-1].id, spec.wheel_mass))
    elif spec.wheels is Wheels.BOTH_SIDES:
        loads.append(PointMass(deck_nodes[-1].id, spec.wheel_mass))
        loads.append(PointMass(deck_nodes[0].id, spec.wheel_mass))
    return loads


def _replica(spec: BridgeSpec, ids: _Ids, nseg: int, grounded: bool):
    nodes, beams, supports = _deck(spec, ids, nseg)
    cables: list[CableElement] = []
    loads: list[Load] = list(_wheel_loads(spec, nodes))

    stations = []
    if spec.pillar_count:
        step = nseg // (spec.pillar_count + 1)
        stations = [s * step for s in range(1, spec.pillar_count + 1)]

    tops: list[Node] = []
    for k in stations:
        base = nodes[k]
        top = Node(ids.node(), base.x, quantize(spec.pillar_height))
        tops.append(top)
        # Pillar pin-connected at its base: moment release toward the deck.
        beams.append(
            BeamElement(ids.element(), base.id, top.id, spec.deck_material, PILLAR_SECTION.name, pin_i=True)
        )
    nodes.extend(tops)

    if grounded:
        for k, top in zip(stations, tops):
            base = nodes[k]
            bed = Node(ids.node(), base.x, quantize(-abs(spec.pillar_height)))
            nodes.append(bed)
            # The below-deck strut is a two-force link: pinned at the bed
            # and at the deck joint.
            beams.append(
                BeamElement(
                    ids.element(), bed.id, base.id, spec.deck_material, PILLAR_SECTION.name,
                    pin_i=True, pin_j=True,
                )
            )
            supports.append(Support(bed.id, restrain_x=True, restrain_y=True))

    for k, top in zip(stations, tops):
        for anchor_idx in (k - 1, k + 1):
            cables.append(
                CableElement(ids.element(), top.id, nodes[anchor_idx].id, spec.rope_material, spec.rope_area)
            )
    if spec.crosswise_top_ropes:
        for (ka, ta), (kb, tb) in zip(zip(stations, tops), zip(stations[1:], tops[1:])):
            cables.append(CableElement(ids.element(), ta.id, tb.id, spec.rope_material, spec.rope_area))
            cables.append(CableElement(ids.element(), ta.id, nodes[kb].id, spec.rope_material, spec.rope_area))
            cables.append(CableElement(ids.element(), tb.id, nodes[ka].id, spec.rope_material, spec.rope_area))

    return nodes, beams, cables, supports, loads


def _cantilever(spec: BridgeSpec, ids: _Ids, nseg: int):
    if nseg % 3 != 0:
        raise InvalidSpec("CantileverBridge needs deck_segments divisible by 3")
    nodes, beams, supports = _deck(spec, ids, nseg)
    # River piers at the third points; counterweights on both shores.
    supports.append(Support(nodes[nseg // 3].id, restrain_y=True))
    supports.append(Support(nodes[2 * nseg // 3].id, restrain_y=True))
    loads: list[Load] = [
        PointMass(nodes[0].id, spec.wheel_mass),
        PointMass(nodes[-1].id, spec.wheel_mass),
    ]
    return nodes, beams, [], supports, loads


def _truss(spec: BridgeSpec, ids: _Ids, nseg: int):
    nodes, beams, supports = _deck(spec, ids, nseg)
    height = quantize(spec.span / 6.0)
    tops = [Node(ids.node(), nodes[k].x, height) for k in range(1, nseg)]
    nodes.extend(tops)

    def top(k: int) -> Node:  # k in 1..nseg-1
        return tops[k - 1]

    for k in range(1, nseg - 1):
        beams.append(BeamElement(ids.element(), top(k).id, top(k + 1).id, spec.deck_material, PILLAR_SECTION.name))
    for k in range(1, nseg):
        beams.append(BeamElement(ids.element(), nodes[k].id, top(k).id, spec.deck_material, PILLAR_SECTION.name))
    beams.append(BeamElement(ids.element(), nodes[0].id, top(1).id, spec.deck_material, PILLAR_SECTION.name))
    beams.append(BeamElement(ids.element(), nodes[nseg].id, top(nseg - 1).id, spec.deck_material, PILLAR_SECTION.name))
    for k in range(1, nseg - 1):
        if top(k).x < spec.span / 2.0:
            beams.append(BeamElement(ids.element(), top(k).id, nodes[k + 1].id, spec.deck_material, PILLAR_SECTION.name))
        else:
            beams.append(BeamElement(ids.element(), nodes[k].id, top(k + 1).id, spec.deck_material, PILLAR_SECTION.name))
    return nodes, beams, [], supports, []


def _cable_stayed(spec: BridgeSpec, ids: _Ids, nseg: int):
    nodes, beams, supports = _deck(spec, ids, nseg)
    cables: list[CableElement] = []
    height = quantize(spec.span / 4.0)
    for shore, fan in ((0, range(1, nseg // 2 + 1)), (nseg, range(nseg - 1, nseg // 2 - 1, -1))):
        base = Node(ids.node(), nodes[shore].x, 0.0)
        topn = Node(ids.node(), nodes[shore].x, height)
        nodes.extend([base, topn])
        beams.append(BeamElement(ids.element(), base.id, topn.id, spec.deck_material, PILLAR_SECTION.name))
        supports.append(Support(base.id, restrain_x=True, restrain_y=True, restrain_rz=True))
        for k in fan:
            cables.append(CableElement(ids.element(), topn.id, nodes[k].id, spec.rope_material, spec.rope_area))
    return nodes, beams, cables, supports, []


def _suspension(spec: BridgeSpec, ids: _Ids, nseg: int):
    nodes, beams, supports = _deck(spec, ids, nseg)
    cables: list[CableElement] = []
    height = quantize(spec.span / 4.0)
    sag = quantize(spec.span / 10.0)
    back = quantize(spec.span / 8.0)

    towers = []
    for shore in (0, nseg):
        base = Node(ids.node(), nodes[shore].x, 0.0)
        topn = Node(ids.node(), nodes[shore].x, height)
        nodes.extend([base, topn])
        beams.append(BeamElement(ids.element(), base.id, topn.id, spec.deck_material, PILLAR_SECTION.name))
        supports.append(Support(base.id, restrain_x=True, restrain_y=True, restrain_rz=True))
        towers.append(topn)

    # Main chain sampled over each interior deck node, sagging between towers.
    chain = [towers[0]]
    for k in range(1, nseg):
        t = k / nseg
        y = quantize(height - 4.0 * sag * t * (1.0 - t))
        pt = Node(ids.node(), nodes[k].x, y)
        nodes.append(pt)
        chain.append(pt)
    chain.append(towers[1])
    for a, b in zip(chain, chain[1:]):
        cables.append(CableElement(ids.element(), a.id, b.id, spec.rope_material, spec.rope_area))
    for k in range(1, nseg):
        cables.append(CableElement(ids.element(), chain[k].id, nodes[k].id, spec.rope_material, spec.rope_area))

    for shore, x_anchor in ((0, quantize(-back)), (nseg, quantize(spec.span + back))):
        anchor = Node(ids.node(), x_anchor, 0.0)
        nodes.append(anchor)
        supports.append(Support(anchor.id, restrain_x=True, restrain_y=True))
        tower_top = towers[0] if shore == 0 else towers[1]
        cables.append(CableElement(ids.element(), tower_top.id, anchor.id, spec.rope_material, spec.rope_area))
    return nodes, beams, cables, supports, []


def generate(spec: BridgeSpec) -> StructureModel:
    """Build the structural model for one bridge spec.

    Every generated model carries a SelfWeight load case; wheels become
    point masses at the deck ends.
    """
    nseg = _check_spec(spec)
    ids = _Ids()

    if spec.kind in _REPLICA_KINDS:
        nodes, beams, cables, supports, loads = _replica(
            spec, ids, nseg, grounded=spec.kind is BridgeKind.LEONARDO_GROUNDED
        )
    elif spec.kind is BridgeKind.BEAM:
        nodes, beams, supports = _deck(spec, ids, nseg)
        cables, loads = [], list(_wheel_loads(spec, nodes))
    elif spec.kind is BridgeKind.CANTILEVER:
        nodes, beams, cables, supports, loads = _cantilever(spec, ids, nseg)
    elif spec.kind is BridgeKind.TRUSS:
        nodes, beams, cables, supports, loads = _truss(spec, ids, nseg)
    elif spec.kind is BridgeKind.CABLE_STAYED:
        nodes, beams, cables, supports, loads = _cable_stayed(spec, ids, nseg)
    elif spec.kind is BridgeKind.SUSPENSION:
        nodes, beams, cables, supports, loads = _suspension(spec, ids, nseg)
    else:  # pragma: no cover
        raise InvalidSpec(f"unknown bridge kind {spec.kind!r}")

    if spec.mid_support:
        # Deck nodes are allocated first, so the central one is nseg//2 + 1.
        supports = list(supports) + [Support(nseg // 2 + 1, restrain_y=True)]
    loads = list(loads) + [SelfWeight(DEFAULT_G)]
    materials = [MATERIAL_PRESETS[spec.deck_material]]
    if cables and spec.rope_material != spec.deck_material:
        materials.append(MATERIAL_PRESETS[spec.rope_material])
    sections = [DECK_SECTION]
    if any(b.section == PILLAR_SECTION.name for b in beams):
        sections.append(PILLAR_SECTION)

    return build_model(
        nodes=nodes,
        materials=materials,
        sections=sections,
        beams=beams,
        cables=cables,
        supports=supports,
        loads=loads,
    )


def generate_preset(preset_id: PresetId | str) -> StructureModel:
    return generate(preset(preset_id).spec)


# ---------------------------------------------------------------------------
# Deck helpers and the bare-deck comparison oracle


def _deck_elevation(model: StructureModel) -> float:
    """The elevation carrying the most nodes; ties favour supported ones."""
    if not model.nodes:
        raise NotAReplica("model has no nodes")
    node_counts: dict[float, int] = {}
    for n in model.nodes:
        node_counts[n.y] = node_counts.get(n.y, 0) + 1
    support_counts: dict[float, int] = {}
    for s in model.supports:
        y = model.node(s.node).y
        support_counts[y] = support_counts.get(y, 0) + 1
    return max(sorted(node_counts), key=lambda y: (node_counts[y], support_counts.get(y, 0)))


def deck_node_ids(model: StructureModel) -> tuple[int, ...]:
    y0 = _deck_elevation(model)
    return tuple(n.id for n in model.nodes if n.y == y0)


def deck_beam_ids(model: StructureModel) -> tuple[int, ...]:
    y0 = _deck_elevation(model)
    deck = {n.id for n in model.nodes if n.y == y0}
    return tuple(b.id for b in model.beams if b.node_i in deck and b.node_j in deck)


def with_deck_udl(model: StructureModel, w: float) -> StructureModel:
    """The model plus a uniform load on every deck beam."""
    return model.with_loads(UniformLoad(bid, w) for bid in deck_beam_ids(model))


def strip_to_bare_deck(model: StructureModel) -> StructureModel:
    """Remove pillars and ropes, re-applying their self-weight where it acted.

    Each removed member's end lumps become point masses: lumps at deck
    nodes stay there, lumps at a pillar top are routed to that pillar's
    base deck node (a vertical pillar transfers them axially). Deck,
    supports and wheel masses are unchanged. Raises ``NotAReplica`` for
    anything that is not a deck-with-pillars replica (e.g. grounded
    pillars, truss chords, loads on pillar tops).
    """
    y0 = _deck_elevation(model)
    if any(model.node(s.node).y != y0 for s in model.supports):
        raise NotAReplica("supports are not all at the deck elevation")
    deck_nodes = {n.id for n in model.nodes if n.y == y0}

    base_of: dict[int, int] = {}
    deck_beams: list[BeamElement] = []
    stripped: list[BeamElement | CableElement] = []
    for b in model.beams:
        i_deck = b.node_i in deck_nodes
        j_deck = b.node_j in deck_nodes
        if i_deck and j_deck:
            deck_beams.append(b)
            continue
        if not (i_deck or j_deck):
            raise NotAReplica(f"beam {b.id} does not touch the deck")
        base, top = (b.node_i, b.node_j) if i_deck else (b.node_j, b.node_i)
        if model.node(base).x != model.node(top).x:
            raise NotAReplica(f"beam {b.id} is not a vertical pillar")
        if top in base_of:
            raise NotAReplica(f"node {top} tops more than one pillar")
        base_of[top] = base
        stripped.append(b)

    def route(node_id: int) -> int:
        if node_id in deck_nodes:
            return node_id
        if node_id in base_of:
            return base_of[node_id]
        raise NotAReplica(f"cable end node {node_id} is neither on the deck nor a pillar top")

    extra_mass: dict[int, float] = {}

    def lump(element, area: float) -> None:
        rho = model.material(element.material).density
        half = rho * area * model.element_length(element) / 2.0
        for end in (element.node_i, element.node_j):
            target = route(end)
            extra_mass[target] = extra_mass.get(target, 0.0) + half

    for b in stripped:
        lump(b, model.section(b.section).area)
    for c in model.cables:
        lump(c, c.area)

    deck_beam_set = {b.id for b in deck_beams}
    for load in model.loads:
        if isinstance(load, (NodalForce, PointMass)) and load.node not in deck_nodes:
            raise NotAReplica(f"load applied off the deck at node {load.node}")
        if isinstance(load, UniformLoad) and load.beam not in deck_beam_set:
            raise NotAReplica(f"uniform load on stripped beam {load.beam}")

    added = tuple(PointMass(nid, extra_mass[nid]) for nid in sorted(extra_mass) if extra_mass[nid] != 0.0)
    return build_model(
        nodes=[n for n in model.nodes if n.id in deck_nodes],
        materials=model.materials,
        sections=model.sections,
        beams=deck_beams,
        cables=(),
        supports=model.supports,
        loads=model.loads + added,
    )
