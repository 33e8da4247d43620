"""Staged cantilever erection: build out from a counterweighted abutment,
planting a riverbed pillar every few modules, and check each stage for
overturning and strength.

Geometry convention: the abutment edge is at x = 0, construction advances
in -x, and the counterweight sits on a shore bearing at x = +lever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .catalog import DECK_SECTION
from .errors import InvalidPlan, SingularSystem
from .model import (
    MATERIAL_PRESETS,
    BeamElement,
    NodalForce,
    Node,
    StructureModel,
    Support,
    UniformLoad,
    build_model,
)
from .solver import EPS_FORCE, AnalysisResult, analyze
from .textio import quantize

# Relative slack on the factor >= safety_factor comparison, so a plan run
# exactly at its minimal counterweight does not flip on the last ulp.
_FACTOR_RTOL = 1e-12


class Verdict(str, Enum):
    STABLE = "Stable"
    OVERTURNS = "Overturns"
    OVERSTRESSED = "Overstressed"


@dataclass(frozen=True)
class ErectionPlan:
    """Parameters of one staged build.

    The deck carries only its own weight ``deck_weight_per_length``; the
    counterweight acts at ``counterweight_lever`` behind the abutment
    edge. Every ``pillar_interval`` modules the tip is planted as a
    riverbed support before cantilevering further.
    """

    module_length: float  # m
    module_count: int
    deck_weight_per_length: float  # N/m
    counterweight: float  # N
    counterweight_lever: float  # m
    pillar_interval: int = 2
    safety_factor: float = 1.0


@dataclass(frozen=True)
class Stage:
    index: int
    model: StructureModel
    cantilever_length: float  # m beyond the outermost support
    description: str
    planted_modules: tuple[int, ...] = ()
    landed: bool = False

    @property
    def pure_cantilever(self) -> bool:
        """True while the abutment is the only support line."""
        return not self.planted_modules and not self.landed


@dataclass(frozen=True)
class StageReport:
    index: int
    overturning_factor: float
    max_utilization: float
    max_deflection: float
    verdict: Verdict


@dataclass(frozen=True)
class PlanReport:
    stages: tuple[StageReport, ...]
    stable: bool
    minimal_counterweight: float
    minimal_verified: bool

    @property
    def first_failure(self) -> int | None:
        for report in self.stages:
            if report.verdict is not Verdict.STABLE:
                return report.index
        return None


def _check_plan(plan: ErectionPlan) -> None:
    checks = (
        ("module_length", plan.module_length > 0),
        ("module_count", plan.module_count >= 0),
        ("deck_weight_per_length", plan.deck_weight_per_length > 0),
        ("counterweight", plan.counterweight > 0),
        ("counterweight_lever", plan.counterweight_lever > 0),
        ("pillar_interval", plan.pillar_interval >= 1),
        ("safety_factor", plan.safety_factor >= 1),
    )
    for name, ok in checks:
        value = getattr(plan, name)
        if not ok or not math.isfinite(float(value)):
            raise InvalidPlan(f"{name} out of range: {value}")


def _stage_model(plan: ErectionPlan, built: int, planted: tuple[int, ...], landed: bool) -> StructureModel:
    """Deck chain from the ballast node (x=+lever) out to module ``built``.

    The abutment clamps the deck at x=0 (pin plus rotation: the deck is
    held between the shore block and the ballast span); planted pillars
    are ideal vertical bearings.
    """
    mod = plan.module_length
    nodes = [Node(1, quantize(plan.counterweight_lever), 0.0), Node(2, 0.0, 0.0)]
    nodes.extend(Node(2 + k, quantize(-k * mod), 0.0) for k in range(1, built + 1))
    beams = [
        BeamElement(k, k, k + 1, "timber", DECK_SECTION.name)
        for k in range(1, built + 2)
    ]
    supports = [
        Support(2, restrain_x=True, restrain_y=True, restrain_rz=True),
        Support(1, restrain_y=True),
    ]
    supports.extend(Support(2 + m, restrain_y=True) for m in planted)
    if landed:
        supports.append(Support(2 + built, restrain_y=True))
    loads = [UniformLoad(b.id, plan.deck_weight_per_length) for b in beams]
    loads.append(NodalForce(1, fy=-plan.counterweight))
    return build_model(nodes=nodes, beams=beams, supports=supports, loads=loads,
                       materials=[MATERIAL_PRESETS["timber"]], sections=[DECK_SECTION])


def expand_plan(plan: ErectionPlan) -> tuple[Stage, ...]:
    """Enumerate the construction stages, deterministically.

    Stage 0 is the counterweighted abutment alone; each later stage either
    appends one module, plants the current tip as a riverbed pillar, or
    lands the tip on the far shore.
    """
    _check_plan(plan)
    stages = [Stage(0, _stage_model(plan, 0, (), False), 0.0, "counterweighted abutment")]
    planted: tuple[int, ...] = ()
    built = 0
    while built < plan.module_count:
        built += 1
        last = max(planted, default=0)
        stages.append(
            Stage(
                len(stages),
                _stage_model(plan, built, planted, False),
                (built - last) * plan.module_length,
                f"module {built} cantilevered",
                planted_modules=planted,
            )
        )
        if built < plan.module_count and built % plan.pillar_interval == 0:
            planted = planted + (built,)
            stages.append(
                Stage(
                    len(stages),
                    _stage_model(plan, built, planted, False),
                    0.0,
                    f"pillar planted at module {built}",
                    planted_modules=planted,
                )
            )
    if plan.module_count > 0:
        stages.append(
            Stage(
                len(stages),
                _stage_model(plan, built, planted, True),
                0.0,
                "tip landed on the far shore",
                planted_modules=planted,
                landed=True,
            )
        )
    return tuple(stages)


def _vertical_reactions(result: AnalysisResult) -> list[float]:
    dm = result.dofs
    out = []
    for nid, comp in sorted(dm.restrained):
        if comp == 1:  # DOF_Y
            out.append(result.reactions[nid][1])
    return out


def _total_vertical_load(plan: ErectionPlan, stage: Stage) -> float:
    deck = sum(stage.model.element_length(b) for b in stage.model.beams)
    return plan.deck_weight_per_length * deck + plan.counterweight


def _factor_from_result(stage: Stage, plan: ErectionPlan, result: AnalysisResult | None) -> float:
    """Overturning factor; >= safety_factor means the stage cannot tip.

    Pure cantilever stages use the rigid-body ballast balance
    (W*a)/(w*c^2/2) about the abutment edge; the stabilizing self-weight
    of the back span is ignored (ballast-only restoring, conservative).
    Indeterminate stages (planted pillars / landed) are judged from the
    support reactions instead: any hold-down demand at a bearing fails,
    reported as 1 + (most negative reaction)/(total load); no uplift
    means the stage cannot tip and reports +inf.
    """
    c = stage.cantilever_length
    if stage.pure_cantilever:
        if c <= 0:
            return math.inf
        overturning = plan.deck_weight_per_length * c * c / 2.0
        return plan.counterweight * plan.counterweight_lever / overturning
    if result is None:
        return 0.0
    r_min = min(_vertical_reactions(result))
    total = _total_vertical_load(plan, stage)
    if r_min >= -EPS_FORCE:
        return math.inf
    return 1.0 + r_min / total


def overturning_factor(stage: Stage, plan: ErectionPlan) -> float:
    """See ``_factor_from_result``; runs the stage analysis when needed."""
    if stage.pure_cantilever:
        return _factor_from_result(stage, plan, None)
    try:
        result = analyze(stage.model)
    except SingularSystem:
        return 0.0
    return _factor_from_result(stage, plan, result)


def analyze_stage(stage: Stage, plan: ErectionPlan) -> StageReport:
    """Full structural check of one stage: overturning, stress, deflection."""
    try:
        result = analyze(stage.model)
    except SingularSystem:
        # An unstable statics model at this stage is itself the finding.
        return StageReport(stage.index, 0.0, math.inf, math.inf, Verdict.OVERTURNS)
    factor = _factor_from_result(stage, plan, result)
    util = result.max_utilization
    if factor < plan.safety_factor * (1.0 - _FACTOR_RTOL):
        verdict = Verdict.OVERTURNS
    elif util >= 1.0:
        verdict = Verdict.OVERSTRESSED
    else:
        verdict = Verdict.STABLE
    return StageReport(stage.index, factor, util, result.max_deflection, verdict)


def minimal_counterweight(plan: ErectionPlan) -> float:
    """Closed-form smallest counterweight keeping every pure-cantilever
    stage at the safety factor: W_min = safety * max(w*c^2/2) / lever."""
    _check_plan(plan)
    worst = 0.0
    for stage in expand_plan(plan):
        if stage.pure_cantilever and stage.cantilever_length > 0:
            c = stage.cantilever_length
            worst = max(worst, plan.deck_weight_per_length * c * c / 2.0)
    return plan.safety_factor * worst / plan.counterweight_lever


def run_plan(plan: ErectionPlan) -> PlanReport:
    """Analyze every stage and report the overall feasibility."""
    stages = expand_plan(plan)
    reports = tuple(analyze_stage(stage, plan) for stage in stages)
    stable = all(r.verdict is Verdict.STABLE for r in reports)

    w_min = minimal_counterweight(plan)
    if w_min > 0:
        verify = replace(plan, counterweight=w_min)
        verified = all(
            analyze_stage(stage, verify).verdict is Verdict.STABLE
            for stage in expand_plan(verify)
        )
    else:
        verified = True
    return PlanReport(reports, stable, w_min, verified)
