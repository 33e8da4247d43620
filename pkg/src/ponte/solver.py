"""Direct stiffness analysis with tension-only cables.

Element stiffness, assembly over free dofs, a symmetric linear solve, the
taut/slack active-set iteration, force recovery, reactions and member
utilization. All functions are pure; models are shared read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import InvalidModel, NoConvergence, NonPositiveProperty, SingularSystem
from .model import (
    DOF_X,
    DOF_Y,
    BeamElement,
    CableElement,
    DofMap,
    NodalForce,
    SelfWeight,
    StructureModel,
    UniformLoad,
    dof_map,
    self_weight_loads,
    validate,
)

EPS_FORCE = 1e-6  # N, dead band for taut/slack decisions
MAX_ACTIVE_SET_ITERATIONS = 100
RESIDUAL_RTOL = 1e-8
SYMMETRY_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Element matrices


def beam_stiffness_local(E: float, A: float, I: float, L: float) -> np.ndarray:
    """6x6 local stiffness of a 2D frame element (no end releases).

    Dof order: [u_i, v_i, rz_i, u_j, v_j, rz_j].
    """
    for name, val in (("E", E), ("A", A), ("I", I), ("L", L)):
        if not (val > 0 and math.isfinite(val)):
            raise NonPositiveProperty(f"{name} must be > 0, got {val}")
    return _beam_local(E, A, I, L, False, False)


def _beam_local(E: float, A: float, I: float, L: float, pin_i: bool, pin_j: bool) -> np.ndarray:
    k = np.zeros((6, 6))
    ax = E * A / L
    k[0, 0] = k[3, 3] = ax
    k[0, 3] = k[3, 0] = -ax

    b = E * I / L**3
    if not pin_i and not pin_j:
        kb = b * np.array(
            [
                [12.0, 6.0 * L, -12.0, 6.0 * L],
                [6.0 * L, 4.0 * L**2, -6.0 * L, 2.0 * L**2],
                [-12.0, -6.0 * L, 12.0, -6.0 * L],
                [6.0 * L, 2.0 * L**2, -6.0 * L, 4.0 * L**2],
            ]
        )
        rows = (1, 2, 4, 5)
    elif pin_i and not pin_j:
        # Hinge at i: theta_i statically condensed out.
        kb = 3.0 * b * np.array(
            [
                [1.0, -1.0, L],
                [-1.0, 1.0, -L],
                [L, -L, L**2],
            ]
        )
        rows = (1, 4, 5)
    elif pin_j and not pin_i:
        kb = 3.0 * b * np.array(
            [
                [1.0, L, -1.0],
                [L, L**2, -L],
                [-1.0, -L, 1.0],
            ]
        )
        rows = (1, 2, 4)
    else:
        # Hinges at both ends: pure axial member.
        return k
    for a_, ra in enumerate(rows):
        for b_, rb in enumerate(rows):
            k[ra, rb] = kb[a_, b_]
    return k


def _transformation(cx: float, cy: float) -> np.ndarray:
    """Global -> local rotation for the 6 frame dofs."""
    T = np.zeros((6, 6))
    T[0, 0] = T[1, 1] = T[3, 3] = T[4, 4] = cx
    T[0, 1] = T[3, 4] = cy
    T[1, 0] = T[4, 3] = -cy
    T[2, 2] = T[5, 5] = 1.0
    return T


def cable_stiffness_global(E: float, A: float, L: float, cx: float, cy: float) -> np.ndarray:
    """4x4 global stiffness of a taut cable over [x_i, y_i, x_j, y_j].

    Rank-1 outer product (EA/L) * d d^T with d = [-cx, -cy, cx, cy].
    """
    for name, val in (("E", E), ("A", A), ("L", L)):
        if not (val > 0 and math.isfinite(val)):
            raise NonPositiveProperty(f"{name} must be > 0, got {val}")
    if abs(math.hypot(cx, cy) - 1.0) > 1e-9:
        raise ValueError(f"direction cosines must be a unit vector, got ({cx}, {cy})")
    d = np.array([-cx, -cy, cx, cy])
    return (E * A / L) * np.outer(d, d)


def fixed_end_forces(w: float, L: float) -> np.ndarray:
    """Equivalent nodal loads of a uniform load w (positive down) on a
    horizontal beam: end shears wL/2 and end moments +/- wL^2/12.

    With these consistent loads, nodal displacements under uniform loads
    are exact for Euler-Bernoulli theory.
    """
    if not (L > 0 and math.isfinite(L)):
        raise ValueError(f"L must be > 0, got {L}")
    return _fixed_end_local(0.0, -w, L, False, False)


def _fixed_end_local(p: float, q: float, L: float, pin_i: bool, pin_j: bool) -> np.ndarray:
    """Equivalent nodal loads in local axes for axial intensity p and
    transverse intensity q (N/m), honouring end releases."""
    f = np.zeros(6)
    f[0] = f[3] = p * L / 2.0
    if not pin_i and not pin_j:
        f[1] = f[4] = q * L / 2.0
        f[2] = q * L**2 / 12.0
        f[5] = -q * L**2 / 12.0
    elif pin_i and not pin_j:
        f[1] = 3.0 * q * L / 8.0
        f[4] = 5.0 * q * L / 8.0
        f[5] = -q * L**2 / 8.0
    elif pin_j and not pin_i:
        f[1] = 5.0 * q * L / 8.0
        f[2] = q * L**2 / 8.0
        f[4] = 3.0 * q * L / 8.0
    else:
        f[1] = f[4] = q * L / 2.0
    return f


# ---------------------------------------------------------------------------
# Assembly


def _geometry(model: StructureModel, element) -> tuple[float, float, float]:
    ni = model.node(element.node_i)
    nj = model.node(element.node_j)
    dx, dy = nj.x - ni.x, nj.y - ni.y
    L = math.hypot(dx, dy)
    return L, dx / L, dy / L


def _node_positions(model: StructureModel) -> dict[int, int]:
    return {n.id: 3 * k for k, n in enumerate(model.nodes)}


def _element_loads(model: StructureModel) -> dict[int, float]:
    """Total uniform-load intensity per beam id."""
    w: dict[int, float] = {}
    for load in model.loads:
        if isinstance(load, UniformLoad):
            w[load.beam] = w.get(load.beam, 0.0) + load.w
    return w


def _nodal_load_records(model: StructureModel) -> list[NodalForce]:
    records = [l for l in model.loads if isinstance(l, NodalForce)]
    for load in model.loads:
        if isinstance(load, SelfWeight):
            records.extend(self_weight_loads(model, load.g))
    return records


def _beam_global(model: StructureModel, beam: BeamElement) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k_global 6x6, T, k_local) for one beam."""
    mat = model.material(beam.material)
    sec = model.section(beam.section)
    L, cx, cy = _geometry(model, beam)
    kl = _beam_local(mat.elastic_modulus, sec.area, sec.second_moment, L, beam.pin_i, beam.pin_j)
    T = _transformation(cx, cy)
    return T.T @ kl @ T, T, kl


def _assemble_full(
    model: StructureModel, active_cables: frozenset[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness and load vector over all 3*n candidate dofs.

    Only taut cables contribute stiffness and pretension forces; uniform
    loads enter through their (release-aware) fixed-end vectors.
    """
    pos = _node_positions(model)
    n = 3 * len(model.nodes)
    K = np.zeros((n, n))
    F = np.zeros(n)
    udl = _element_loads(model)

    for beam in model.beams:
        kg, T, _ = _beam_global(model, beam)
        ix = pos[beam.node_i]
        jx = pos[beam.node_j]
        dofs = [ix, ix + 1, ix + 2, jx, jx + 1, jx + 2]
        K[np.ix_(dofs, dofs)] += kg
        w = udl.get(beam.id, 0.0)
        if w != 0.0:
            L, cx, cy = _geometry(model, beam)
            # Project the global (0, -w) line load on the member axes.
            p = -w * cy
            q = -w * cx
            fl = _fixed_end_local(p, q, L, beam.pin_i, beam.pin_j)
            F[dofs] += T.T @ fl

    for cable in model.cables:
        if cable.id not in active_cables:
            continue
        mat = model.material(cable.material)
        L, cx, cy = _geometry(model, cable)
        kg = cable_stiffness_global(mat.elastic_modulus, cable.area, L, cx, cy)
        ix = pos[cable.node_i]
        jx = pos[cable.node_j]
        dofs = [ix, ix + 1, jx, jx + 1]
        K[np.ix_(dofs, dofs)] += kg
        if cable.pretension:
            F[ix] += cable.pretension * cx
            F[ix + 1] += cable.pretension * cy
            F[jx] -= cable.pretension * cx
            F[jx + 1] -= cable.pretension * cy

    for rec in _nodal_load_records(model):
        ix = pos[rec.node]
        F[ix] += rec.fx
        F[ix + 1] += rec.fy
        F[ix + 2] += rec.mz

    return K, F


def _free_indices(model: StructureModel, dm: DofMap) -> np.ndarray:
    pos = _node_positions(model)
    return np.array([pos[nid] + comp for nid, comp in dm.entries], dtype=int)


def assemble(
    model: StructureModel, active_cables: frozenset[int] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Reduced (K, F) over the free dofs of ``dof_map(model)``.

    Beams are always assembled; only cables in ``active_cables`` are
    (default: all). Restraints are applied by elimination, not penalties.
    """
    if active_cables is None:
        active_cables = frozenset(c.id for c in model.cables)
    dm = dof_map(model)
    K, F = _assemble_full(model, frozenset(active_cables))
    free = _free_indices(model, dm)
    return K[np.ix_(free, free)], F[free]


# ---------------------------------------------------------------------------
# Linear solve


def solve_linear(K: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Solve the symmetric system K u = F by Cholesky factorization.

    Raises ``SingularSystem`` when K is not positive definite (a mechanism)
    or the residual exceeds 1e-8 * ||F||.
    """
    K = np.asarray(K, dtype=float)
    F = np.asarray(F, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or F.shape != (K.shape[0],):
        raise ValueError(f"shape mismatch: K {K.shape}, F {F.shape}")
    if K.size == 0:
        return np.zeros(0)
    scale = np.abs(K).max()
    if scale > 0 and np.abs(K - K.T).max() > SYMMETRY_RTOL * scale:
        raise ValueError("K is not symmetric")
    try:
        factor = cho_factor(K, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise SingularSystem(f"stiffness matrix is singular: {exc}") from None
    u = cho_solve(factor, F, check_finite=False)
    fnorm = np.linalg.norm(F)
    # Written so a NaN residual also fails.
    if fnorm > 0 and not np.linalg.norm(K @ u - F) <= RESIDUAL_RTOL * fnorm:
        raise SingularSystem("stiffness system is numerically singular (residual too large)")
    return u


def _solve_tolerating_unloaded_mechanisms(K: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Solve, allowing zero-energy modes that carry no load.

    When slack cables leave an appendage free to swing (e.g. a pinned
    pillar whose ropes all went slack), K is singular but the loads do no
    work on the mechanism. The minimum-norm solution is then a valid
    equilibrium; a genuinely loaded mechanism still raises.
    """
    try:
        return solve_linear(K, F)
    except SingularSystem:
        if K.size == 0:
            return np.zeros(0)
        u, *_ = np.linalg.lstsq(K, F, rcond=None)
        fnorm = np.linalg.norm(F)
        if np.linalg.norm(K @ u - F) <= RESIDUAL_RTOL * max(fnorm, 1.0):
            return u
        raise


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class MemberForces:
    """End forces of one member in local axes; axial tension positive.

    ``shear`` is the end shear with the larger magnitude (signed);
    ``moment_i``/``moment_j`` are the signed end moments. Cables carry
    axial force only.
    """

    kind: str
    axial: float
    shear: float = 0.0
    moment_i: float = 0.0
    moment_j: float = 0.0


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    """Everything recovered from one converged analysis."""

    model: StructureModel
    dofs: DofMap
    displacements: np.ndarray = field(repr=False)  # per free dof
    node_displacements: dict[int, tuple[float, float, float]] = field(repr=False)
    member_forces: dict[int, MemberForces] = field(repr=False)
    reactions: dict[int, tuple[float, float, float]] = field(repr=False)
    active_cables: frozenset[int]
    utilization: dict[int, float] = field(repr=False)
    iterations_used: int

    @property
    def max_deflection(self) -> float:
        """Largest vertical nodal displacement magnitude."""
        if not self.node_displacements:
            return 0.0
        return max(abs(d[1]) for d in self.node_displacements.values())

    @property
    def max_utilization(self) -> float:
        return max(self.utilization.values(), default=0.0)

    @property
    def max_utilization_member(self) -> int | None:
        if not self.utilization:
            return None
        return max(sorted(self.utilization), key=lambda eid: self.utilization[eid])

    @property
    def total_cable_tension(self) -> float:
        return sum(f.axial for f in self.member_forces.values() if f.kind == "cable")


def _expand_displacements(model: StructureModel, dm: DofMap, u: np.ndarray) -> np.ndarray:
    full = np.zeros(3 * len(model.nodes))
    full[_free_indices(model, dm)] = u
    return full


def _cable_axial(model: StructureModel, cable: CableElement, full_u: np.ndarray, pos: dict[int, int]) -> float:
    """Axial force a cable would carry at the given displacements."""
    mat = model.material(cable.material)
    L, cx, cy = _geometry(model, cable)
    ix, jx = pos[cable.node_i], pos[cable.node_j]
    elongation = (full_u[jx] - full_u[ix]) * cx + (full_u[jx + 1] - full_u[ix + 1]) * cy
    return mat.elastic_modulus * cable.area / L * elongation + cable.pretension


def member_end_forces(
    model: StructureModel, u: np.ndarray, active_cables: frozenset[int]
) -> dict[int, MemberForces]:
    """Per-element local end forces recovered from the free-dof solution.

    Beam forces are k_local * T * u minus the fixed-end corrections of any
    uniform loads; inactive cables are clamped to zero force.
    """
    dm = dof_map(model)
    full = _expand_displacements(model, dm, np.asarray(u, dtype=float))
    pos = _node_positions(model)
    udl = _element_loads(model)
    out: dict[int, MemberForces] = {}

    for beam in model.beams:
        _, T, kl = _beam_global(model, beam)
        ix, jx = pos[beam.node_i], pos[beam.node_j]
        ue = full[[ix, ix + 1, ix + 2, jx, jx + 1, jx + 2]]
        f = kl @ (T @ ue)
        w = udl.get(beam.id, 0.0)
        if w != 0.0:
            L, cx, cy = _geometry(model, beam)
            f = f - _fixed_end_local(-w * cy, -w * cx, L, beam.pin_i, beam.pin_j)
        shear = f[1] if abs(f[1]) >= abs(f[4]) else -f[4]
        out[beam.id] = MemberForces(
            kind="beam", axial=f[3], shear=shear, moment_i=f[2], moment_j=f[5]
        )

    for cable in model.cables:
        n_axial = _cable_axial(model, cable, full, pos)
        if cable.id not in active_cables:
            n_axial = max(0.0, n_axial)
        out[cable.id] = MemberForces(kind="cable", axial=n_axial)

    return out


def reactions(
    model: StructureModel, u: np.ndarray, active_cables: frozenset[int] | None = None
) -> dict[int, tuple[float, float, float]]:
    """Support forces (fx, fy, mz) per supported node.

    Components that are not restrained report 0. Global equilibrium holds:
    the reactions balance the applied loads in every direction.
    """
    if active_cables is None:
        active_cables = frozenset(c.id for c in model.cables)
    dm = dof_map(model)
    full_u = _expand_displacements(model, dm, np.asarray(u, dtype=float))
    K, F = _assemble_full(model, frozenset(active_cables))
    residual = K @ full_u - F
    pos = _node_positions(model)

    out: dict[int, tuple[float, float, float]] = {}
    for nid, comp in sorted(dm.restrained):
        fx, fy, mz = out.get(nid, (0.0, 0.0, 0.0))
        value = residual[pos[nid] + comp]
        if comp == DOF_X:
            fx = value
        elif comp == DOF_Y:
            fy = value
        else:
            mz = value
        out[nid] = (fx, fy, mz)
    return out


def utilization(forces: MemberForces, material, section=None, area: float | None = None) -> float:
    """Demand/capacity ratio of one member; >= 1 is the red-alarm class.

    Beams combine axial and extreme-fibre bending stress at the worse end;
    cables use plain axial stress over the allowable.
    """
    sigma = material.allowable_stress
    if forces.kind == "beam":
        if section is None:
            raise ValueError("beam utilization needs a section")
        m_max = max(abs(forces.moment_i), abs(forces.moment_j))
        stress = abs(forces.axial) / section.area + m_max * (section.depth / 2.0) / section.second_moment
        return stress / sigma
    if area is None:
        raise ValueError("cable utilization needs an area")
    return forces.axial / (area * sigma)


def _utilization_map(model: StructureModel, forces: dict[int, MemberForces]) -> dict[int, float]:
    out: dict[int, float] = {}
    for beam in model.beams:
        out[beam.id] = utilization(forces[beam.id], model.material(beam.material), section=model.section(beam.section))
    for cable in model.cables:
        out[cable.id] = utilization(forces[cable.id], model.material(cable.material), area=cable.area)
    return out


# ---------------------------------------------------------------------------
# Tension-only iteration


def tension_only_analyze(model: StructureModel) -> AnalysisResult:
    """Find the taut/slack fixed point and recover the full result.

    Starts with every cable taut; removes cables driven into compression
    (all at once), re-adds slack cables that the current displacements
    would stretch, and repeats until the active set is stable. Cycles are
    detected by active-set history and reported, never broken silently.
    """
    dm = dof_map(model)
    pos = _node_positions(model)
    free = _free_indices(model, dm)
    all_ids = frozenset(c.id for c in model.cables)

    active = all_ids
    seen: dict[frozenset[int], int] = {active: 0}
    history = [active]
    u = np.zeros(dm.n_free)
    axial: dict[int, float] = {}
    iterations = 0

    while True:
        if iterations >= MAX_ACTIVE_SET_ITERATIONS:
            raise NoConvergence(
                f"active set did not stabilize in {MAX_ACTIVE_SET_ITERATIONS} iterations",
                cycle=history,
            )
        iterations += 1
        K_full, F_full = _assemble_full(model, active)
        u = _solve_tolerating_unloaded_mechanisms(K_full[np.ix_(free, free)], F_full[free])
        full_u = _expand_displacements(model, dm, u)

        axial = {c.id: _cable_axial(model, c, full_u, pos) for c in model.cables}
        next_active = frozenset(
            cid
            for cid in all_ids
            if (cid in active and axial[cid] >= -EPS_FORCE)
            or (cid not in active and axial[cid] > EPS_FORCE)
        )
        if next_active == active:
            break
        if next_active in seen:
            cycle = history[seen[next_active]:] + [next_active]
            raise NoConvergence(
                f"active set cycles with period {len(cycle) - 1}", cycle=cycle
            )
        seen[next_active] = len(history)
        history.append(next_active)
        active = next_active

    # Cables inside the dead band carry no real tension (e.g. a lone rope
    # on a pinned pillar that cannot react its pull settles at exactly
    # zero force). They stay engaged in the converged stiffness, which
    # they do not alter, but only genuinely taut cables are reported.
    taut = frozenset(cid for cid in active if axial[cid] > EPS_FORCE)

    forces = member_end_forces(model, u, taut)
    full_u = _expand_displacements(model, dm, u)
    node_disp = {
        n.id: (float(full_u[pos[n.id]]), float(full_u[pos[n.id] + 1]), float(full_u[pos[n.id] + 2]))
        for n in model.nodes
    }
    return AnalysisResult(
        model=model,
        dofs=dm,
        displacements=u,
        node_displacements=node_disp,
        member_forces=forces,
        reactions=reactions(model, u, active),
        active_cables=taut,
        utilization=_utilization_map(model, forces),
        iterations_used=iterations,
    )


def analyze(model: StructureModel) -> AnalysisResult:
    """Validate, then run the full tension-only analysis."""
    report = validate(model)
    if not report.ok:
        raise InvalidModel(report)
    return tension_only_analyze(model)
