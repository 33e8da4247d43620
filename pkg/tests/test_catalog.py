from dataclasses import replace

import pytest
from pytest import approx

from ponte.catalog import (
    BridgeKind,
    BridgeSpec,
    PresetId,
    Wheels,
    deck_beam_ids,
    deck_node_ids,
    generate,
    generate_preset,
    presets,
    strip_to_bare_deck,
    with_deck_udl,
)
from ponte.errors import InvalidSpec, NotAReplica
from ponte.model import PointMass, validate
from ponte.solver import analyze


def max_deck_deflection(model, result) -> float:
    return max(abs(result.node_displacements[n][1]) for n in deck_node_ids(model))


class TestPresets:
    def test_catalog_contents(self):
        by_id = {p.id: p for p in presets()}
        assert by_id[PresetId.LEONARDO_DRAWING].spec.pillar_count == 11
        assert by_id[PresetId.LEONARDO_DRAWING].spec.wheels is Wheels.RIGHT_ONLY
        assert by_id[PresetId.FLORENCE].spec.pillar_count == 6
        assert by_id[PresetId.FLORENCE].spec.wheels is Wheels.BOTH_SIDES
        assert by_id[PresetId.GRANDE].spec.pillar_count == 5
        assert by_id[PresetId.GRANDE].spec.wheels is Wheels.NONE
        assert by_id[PresetId.AMBOISE_SCALE].spec.pillar_count == 9
        assert by_id[PresetId.AMBOISE_SCALE].spec.mid_support is True
        assert by_id[PresetId.AMBOISE_PARK].spec.pillar_count == 4
        assert by_id[PresetId.AMBOISE_PARK].spec.crosswise_top_ropes is True

    def test_stable_ordering_and_notes(self):
        ids = [p.id for p in presets()]
        assert ids == [p.id for p in presets()]
        assert all(p.note for p in presets())
        notes = {p.id: p.note for p in presets()}
        assert "Florence" in notes[PresetId.FLORENCE]
        assert "Amboise" in notes[PresetId.AMBOISE_SCALE]

    def test_every_preset_validates_clean(self):
        for p in presets():
            report = validate(generate(p.spec))
            assert report.ok, (p.id, [i.message for i in report])


class TestGenerate:
    def test_deterministic(self):
        spec = presets()[0].spec
        assert generate(spec) == generate(spec)

    def test_replica_member_counts(self):
        model = generate_preset(PresetId.GRANDE)
        # 6 deck beams + 5 pillars; 2 fan cables per pillar.
        assert len(model.beams) == 11
        assert len(model.cables) == 10
        assert len([b for b in model.beams if b.pin_i]) == 5

    def test_wheels_become_point_masses(self):
        drawing = generate_preset(PresetId.LEONARDO_DRAWING)
        masses = [l for l in drawing.loads if isinstance(l, PointMass)]
        right_end = max(deck_node_ids(drawing))
        assert [m.node for m in masses] == [right_end]

        florence = generate_preset(PresetId.FLORENCE)
        masses = [l.node for l in florence.loads if isinstance(l, PointMass)]
        deck = deck_node_ids(florence)
        assert sorted(masses) == [min(deck), max(deck)]

    def test_mid_support_adds_central_roller(self):
        model = generate_preset(PresetId.AMBOISE_SCALE)
        mid = model.node(6)  # 10 segments, node 6 at midspan
        assert mid.x == approx(6.0)
        assert any(s.node == 6 and s.restrain_y for s in model.supports)

    def test_crosswise_ropes_added(self):
        park = generate_preset(PresetId.AMBOISE_PARK)
        plain = generate(replace(presets()[4].spec, crosswise_top_ropes=False))
        # 3 extra ropes per adjacent pillar pair.
        assert len(park.cables) == len(plain.cables) + 3 * 3

    def test_grounded_adds_struts_and_bed_supports(self):
        grounded = generate_preset(PresetId.GROUNDED_STAYED)
        replica = generate_preset(PresetId.GRANDE)
        assert len(grounded.beams) == len(replica.beams) + 5
        bed_nodes = [n for n in grounded.nodes if n.y < 0]
        assert len(bed_nodes) == 5
        supported = {s.node for s in grounded.supports}
        assert all(n.id in supported for n in bed_nodes)

    def test_every_kind_generates_and_analyzes(self):
        for kind in BridgeKind:
            spec = BridgeSpec(kind, pillar_count=3 if kind in
                              (BridgeKind.LEONARDO_REPLICA, BridgeKind.LEONARDO_GROUNDED) else 0)
            model = generate(spec)
            assert validate(model).ok, kind
            analyze(model)

    def test_invalid_specs_rejected(self):
        with pytest.raises(InvalidSpec):
            generate(BridgeSpec(BridgeKind.BEAM, span=-1.0))
        with pytest.raises(InvalidSpec):
            generate(BridgeSpec(BridgeKind.LEONARDO_REPLICA, pillar_count=3, deck_segments=3))
        with pytest.raises(InvalidSpec):
            generate(BridgeSpec(BridgeKind.LEONARDO_REPLICA, pillar_count=2, deck_segments=7))
        with pytest.raises(InvalidSpec):
            generate(BridgeSpec(BridgeKind.BEAM, deck_segments=5, mid_support=True))

    def test_symmetric_displacements_under_symmetric_load(self):
        model = generate_preset(PresetId.GRANDE)
        result = analyze(model)
        deck = deck_node_ids(model)
        span = max(model.node(n).x for n in deck)
        peak = max(abs(result.node_displacements[n][1]) for n in deck)
        by_x = {model.node(n).x: result.node_displacements[n][1] for n in deck}
        for x, dy in by_x.items():
            assert dy == approx(by_x[span - x], rel=1e-9, abs=1e-9 * peak)


class TestStripToBareDeck:
    def test_zero_pillars_unchanged(self):
        bare = generate(BridgeSpec(BridgeKind.LEONARDO_REPLICA, pillar_count=0, deck_segments=4))
        assert strip_to_bare_deck(bare) == bare

    def test_florence_strip_counts_and_mass_conservation(self):
        model = generate_preset(PresetId.FLORENCE)
        stripped = strip_to_bare_deck(model)
        assert len(stripped.beams) == 7
        assert stripped.cables == ()
        added = [l for l in stripped.loads if isinstance(l, PointMass)
                 and l not in model.loads]
        # Stripped member mass: 6 pillars + 12 ropes, conserved exactly.
        rho_t = model.material("timber").density
        rho_r = model.material("hemp-rope").density
        pillar_mass = sum(
            rho_t * model.section(b.section).area * model.element_length(b)
            for b in model.beams if b.id not in deck_beam_ids(model)
        )
        rope_mass = sum(rho_r * c.area * model.element_length(c) for c in model.cables)
        assert sum(l.mass for l in added) == approx(pillar_mass + rope_mass, rel=1e-12)
        # Every added mass lands on a deck node.
        deck = set(deck_node_ids(model))
        assert all(l.node in deck for l in added)

    def test_supports_and_wheels_unchanged(self):
        model = generate_preset(PresetId.FLORENCE)
        stripped = strip_to_bare_deck(model)
        assert stripped.supports == model.supports
        original_masses = [l for l in model.loads if isinstance(l, PointMass)]
        assert all(l in stripped.loads for l in original_masses)

    def test_total_vertical_load_preserved(self):
        from ponte.model import self_weight_loads

        model = with_deck_udl(generate_preset(PresetId.GRANDE), 1500.0)
        stripped = strip_to_bare_deck(model)
        g = 9.81
        total = sum(f.fy for f in self_weight_loads(model, g))
        total_stripped = sum(f.fy for f in self_weight_loads(stripped, g))
        assert total_stripped == approx(total, rel=1e-12)

    def test_grounded_is_not_a_replica(self):
        with pytest.raises(NotAReplica):
            strip_to_bare_deck(generate_preset(PresetId.GROUNDED_STAYED))

    def test_truss_is_not_a_replica(self):
        with pytest.raises(NotAReplica):
            strip_to_bare_deck(generate(BridgeSpec(BridgeKind.TRUSS)))


class TestOrderings:
    """The comparative findings the catalog exists to demonstrate."""

    def test_replica_never_beats_its_bare_deck(self):
        # Free-spanning replicas: pillars and ropes only add weight.
        for pid in (PresetId.LEONARDO_DRAWING, PresetId.FLORENCE, PresetId.GRANDE):
            model = with_deck_udl(generate_preset(pid), 1000.0)
            r = analyze(model)
            rb = analyze(strip_to_bare_deck(model))
            assert max_deck_deflection(model, r) >= max_deck_deflection(model, rb) - 1e-12

    def test_grounding_the_pillars_works(self):
        replica = with_deck_udl(generate_preset(PresetId.GRANDE), 1000.0)
        grounded = with_deck_udl(generate_preset(PresetId.GROUNDED_STAYED), 1000.0)
        r_rep = analyze(replica)
        r_grd = analyze(grounded)
        assert r_grd.active_cables, "grounded pillars must put ropes to work"
        assert max_deck_deflection(grounded, r_grd) < max_deck_deflection(replica, r_rep)

    def test_underslung_ropes_work_under_gravity(self):
        model = with_deck_udl(generate_preset(PresetId.UNDERSLUNG), 1000.0)
        result = analyze(model)
        assert len(result.active_cables) == 2
        bare = analyze(strip_to_bare_deck(model))
        assert max_deck_deflection(model, result) < max_deck_deflection(model, bare)

    def test_mid_support_prop_makes_nearby_ropes_structural(self):
        # The model-maker's central prop creates a hogging region where the
        # flanking posts and ropes genuinely act as a crane; the free-span
        # null-cable finding deliberately does not extend to this preset.
        model = with_deck_udl(generate_preset(PresetId.AMBOISE_SCALE), 2000.0)
        result = analyze(model)
        assert result.active_cables, "ropes near the prop carry real tension"
        mid_pillar_cables = {28, 29}  # ropes of the post standing on the prop
        assert mid_pillar_cables <= result.active_cables
        for cid in result.active_cables:
            assert result.member_forces[cid].axial > 1.0
        # Without the prop the same bridge reverts to the null-cable finding.
        free_span = replace(
            next(p.spec for p in presets() if p.id is PresetId.AMBOISE_SCALE),
            mid_support=False,
        )
        free_result = analyze(with_deck_udl(generate(free_span), 2000.0))
        assert free_result.active_cables == frozenset()
