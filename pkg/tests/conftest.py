"""Shared fixtures: deterministic random model generation.

Generated models are always valid and stable: every node hangs on a
spanning tree of beams, supports give a pin plus an offset roller, and all
numeric fields are quantized so text round-trips are exact.
"""

import random

import pytest

from ponte.model import (
    BeamElement,
    CableElement,
    Material,
    NodalForce,
    Node,
    PointMass,
    Section,
    SelfWeight,
    Support,
    UniformLoad,
    build_model,
)
from ponte.textio import quantize


def random_valid_model(seed: int):
    rng = random.Random(seed)
    n_nodes = rng.randint(4, 9)
    grid = [(quantize(0.5 * i), quantize(0.5 * j)) for i in range(25) for j in range(13)]
    points = rng.sample(grid, n_nodes)
    # The roller must sit at a different x than the pin, or rotation about
    # the pin is unrestrained.
    if len({p[0] for p in points}) < 2:
        points[-1] = (quantize(points[0][0] + 2.0), points[-1][1])
    nodes = [Node(i + 1, x, y) for i, (x, y) in enumerate(points)]

    materials = [
        Material("m1", quantize(rng.uniform(5e9, 2.1e11)), quantize(rng.uniform(0.0, 8000.0)),
                 quantize(rng.uniform(5e6, 4e8))),
        Material("m2", quantize(rng.uniform(5e9, 2.1e11)), quantize(rng.uniform(0.0, 8000.0)),
                 quantize(rng.uniform(5e6, 4e8))),
    ]
    sections = [
        Section("s1", quantize(rng.uniform(1e-3, 0.1)), quantize(rng.uniform(1e-6, 1e-3)),
                quantize(rng.uniform(0.05, 0.5))),
    ]

    beams = []
    order = list(range(n_nodes))
    rng.shuffle(order)
    next_id = 1
    for k in range(1, n_nodes):
        a = nodes[order[k]].id
        b = nodes[order[rng.randrange(k)]].id
        beams.append(BeamElement(next_id, a, b, rng.choice(materials).name, "s1"))
        next_id += 1
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(range(n_nodes), 2)
        beams.append(BeamElement(next_id, nodes[a].id, nodes[b].id, rng.choice(materials).name, "s1"))
        next_id += 1

    cables = []
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(range(n_nodes), 2)
        cables.append(
            CableElement(next_id, nodes[a].id, nodes[b].id, rng.choice(materials).name,
                         quantize(rng.uniform(1e-5, 2e-3)))
        )
        next_id += 1

    pin = min(nodes, key=lambda n: (n.x, n.id))
    roller = max(nodes, key=lambda n: (n.x, n.id))
    supports = [
        Support(pin.id, restrain_x=True, restrain_y=True),
        Support(roller.id, restrain_y=True),
    ]
    if rng.random() < 0.4:
        supports.append(Support(pin.id, restrain_rz=True))

    loads = []
    for _ in range(rng.randint(1, 3)):
        target = rng.choice(nodes)
        loads.append(
            NodalForce(
                target.id,
                fx=quantize(rng.uniform(-5e4, 5e4)),
                fy=quantize(rng.uniform(-5e4, 5e4)),
                mz=quantize(rng.uniform(-2e4, 2e4)),
            )
        )
    for _ in range(rng.randint(0, 2)):
        loads.append(UniformLoad(rng.choice(beams).id, quantize(rng.uniform(-4e3, 4e3))))
    for _ in range(rng.randint(0, 2)):
        loads.append(PointMass(rng.choice(nodes).id, quantize(rng.uniform(0.0, 500.0))))
    loads.append(SelfWeight(9.81))

    return build_model(
        nodes=nodes, materials=materials, sections=sections,
        beams=beams, cables=cables, supports=supports, loads=loads,
    )


@pytest.fixture(scope="session")
def random_models():
    return [random_valid_model(seed) for seed in range(100)]


def pytest_runtest_logreport(report):
    """One PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    criterion = name.removeprefix("test_").split("_")[0].upper()
    status = "PASS" if report.passed else "FAIL"
    print(f"\n{criterion} {status}: {name}")
