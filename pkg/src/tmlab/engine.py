"""Trajectory generation for the anchored iteration

    u_n = (1 - beta_n) u + beta_n x_n
    x_{n+1} = (1 - lambda_n) u_n + lambda_n T_n u_n

over any space model, family and schedule, with the coordinate recursion
x_{n+1} = (1 - lambda_n) beta_n x_n + lambda_n T_n(beta_n x_n) available as
an independent cross-check in Euclidean models with anchor 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

from .geometry import AxiomReport, Euclidean, Point, SpaceModel
from .mappings import MappingFamily, SolverFailure
from .schedules import ScheduleBundle


class EngineError(RuntimeError):
    pass


@dataclass
class IterationState:
    n: int
    x_n: Point
    u_n: Optional[Point]  # combination used to produce x_{n+1}; None before a step
    anchor: Point
    x0: Point


@dataclass
class TrajectoryRecord:
    n: int
    x: Point
    u: Point  # u_n = (1 - beta_n) anchor + beta_n x_n
    d_step: float  # d(x_n, x_{n+1})
    d_Tn: float  # d(x_n, T_n x_n)
    d_p: float  # d(x_n, p)


@dataclass
class Trajectory:
    space: SpaceModel
    family: MappingFamily
    bundle: ScheduleBundle
    anchor: Point
    x0: Point
    records: list = field(default_factory=list)
    error: Optional[str] = None
    scenario_hash: str = ""

    def __len__(self):
        return len(self.records)

    def point(self, n: int) -> Point:
        return self.records[n].x

    def dist_points(self, i: int, j: int) -> float:
        return self.space.dist(self.records[i].x, self.records[j].x)

    def write_csv(self, stream: TextIO):
        model = self.space.describe()
        stream.write(f"# model={model} scenario={self.scenario_hash}\n")
        writer = csv.writer(stream)
        ncoords = len(self.records[0].x.data) if self.records else 0
        header = ["n"] + [f"x{i}" for i in range(ncoords)] + [
            "d_step", "d_Tn", "d_p"
        ]
        writer.writerow(header)
        for rec in self.records:
            writer.writerow(
                [rec.n]
                + [f"{float(c):.17g}" for c in rec.x.data]
                + [f"{rec.d_step:.17g}", f"{rec.d_Tn:.17g}", f"{rec.d_p:.17g}"]
            )


def step(
    state: IterationState,
    family: MappingFamily,
    bundle: ScheduleBundle,
    space: SpaceModel,
) -> IterationState:
    """One step of the anchored iteration."""
    n = state.n
    beta, lam = bundle.beta(n), bundle.lam(n)
    u_n = space.comb(state.anchor, state.x_n, beta)
    x_next = space.comb(u_n, family.apply(n, u_n), lam)
    return IterationState(
        n=n + 1, x_n=x_next, u_n=u_n, anchor=state.anchor, x0=state.x0
    )


def run(
    space: SpaceModel,
    family: MappingFamily,
    bundle: ScheduleBundle,
    u: Point,
    x0: Point,
    steps: int,
    scenario_hash: str = "",
) -> Trajectory:
    """Trajectory of length steps + 1 with all derived distance columns.

    A solver failure aborts the run; the partial trajectory is kept on the
    returned object together with the error record.
    """
    if steps < 1:
        raise EngineError("steps must be >= 1")
    traj = Trajectory(space, family, bundle, u, x0, scenario_hash=scenario_hash)
    p = family.fixed_point
    x = x0
    try:
        for n in range(steps + 1):
            beta, lam = bundle.beta(n), bundle.lam(n)
            u_n = space.comb(u, x, beta)
            x_next = space.comb(u_n, family.apply(n, u_n), lam)
            traj.records.append(
                TrajectoryRecord(
                    n=n,
                    x=x,
                    u=u_n,
                    d_step=space.dist(x, x_next),
                    d_Tn=space.dist(x, family.apply(n, x)),
                    d_p=space.dist(x, p),
                )
            )
            x = x_next
    except SolverFailure as exc:
        traj.error = str(exc)
    return traj


def check_hilbert_special_case(
    space: Euclidean,
    family: MappingFamily,
    bundle: ScheduleBundle,
    x0: Point,
    steps: int,
    tol: float = 1e-10,
) -> AxiomReport:
    """Run the geodesic recursion with anchor 0 next to the coordinate
    recursion x_{n+1} = (1-lambda) beta x + lambda T(beta x) and compare.

    The coordinate route uses raw vector arithmetic, independent of comb.
    """
    if not isinstance(space, Euclidean):
        raise EngineError("the coordinate cross-check needs a Euclidean model")
    origin = space.base_point()
    traj = run(space, family, bundle, origin, x0, steps)
    if traj.error:
        raise EngineError(traj.error)

    y = tuple(x0.data)
    worst = (-math.inf, None)
    for n in range(steps + 1):
        dev = space.dist(traj.records[n].x, Point("euclidean", y))
        slack = dev - tol * (1 + n)  # allowance grows with accumulated rounding
        if slack > worst[0]:
            worst = (slack, {"n": n, "deviation": dev})
        beta, lam = bundle.beta(n), bundle.lam(n)
        scaled = tuple(beta * c for c in y)
        image = family.apply(n, Point("euclidean", scaled)).data
        y = tuple(
            (1.0 - lam) * s + lam * t for s, t in zip(scaled, image)
        )
    return AxiomReport(
        axiom=f"hilbert-special-case[{family.name}]",
        samples=steps + 1,
        max_violation=worst[0],
        worst_case_inputs=worst[1],
        tol=0.0,
    )


def check_boundedness(traj: Trajectory, K_like: float, tol: float = 1e-9):
    """d(x_n, p) and d(u_n, p) stay below max{d(x0,p), d(u,p)} along runs
    with an exact common fixed point."""
    space, p = traj.space, traj.family.fixed_point
    worst = 0.0
    for rec in traj.records:
        worst = max(worst, rec.d_p - K_like, space.dist(rec.u, p) - K_like)
    return AxiomReport(
        axiom="boundedness",
        samples=len(traj.records),
        max_violation=worst,
        worst_case_inputs=None,
        tol=tol,
    )
