"""Verification by state-space simulation.

Deadbeat impulse plans drive an initial state to the origin in n steps;
initial states are reconstructed from n output samples.  An impulse u_i
applied at t_i produces the instantaneous state jump b * u_i at t_i+, and
the state flows freely by exp(A dt) between instants; all propagation uses
the closed-form Jordan exponential.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nusample.analysis import AlphaVector, SamplingSequence
from nusample.errors import RankDeficientError
from nusample.lti import Realization, real_jordan

SOLVE_RANK_TOL = 1e-8  # same relative singular-value threshold as the analysis module


@dataclass(frozen=True)
class ImpulsePlan:
    inputs: tuple[float, ...]
    sequence: SamplingSequence

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(float(u) for u in self.inputs))
        if not all(np.isfinite(self.inputs)):
            raise ValueError("impulse inputs must be finite")
        if len(self.inputs) != len(self.sequence.instants):
            raise ValueError("one input per sampling instant")


@dataclass(frozen=True, eq=False)
class Checkpoint:
    time: float
    side: str  # "pre" | "post"
    state: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    checkpoints: tuple[Checkpoint, ...]

    @property
    def final_state(self) -> np.ndarray:
        return self.checkpoints[-1].state


def _jordan(real: Realization):
    if real.spec is None:
        raise ValueError("realization must carry its system spec for the "
                         "closed-form exponential")
    return real_jordan(real.spec, real)


def state_transition(real: Realization, x, dt: float) -> np.ndarray:
    """exp(A dt) x via the closed-form Jordan exponential."""
    return _jordan(real).expA(dt) @ np.asarray(x, dtype=float)


def _solve_checked(M: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    svals = np.linalg.svd(M, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] / svals[0] <= SOLVE_RANK_TOL:
        smin = float(svals[-1])
        cond = np.inf if smin == 0.0 else float(svals[0] / smin)
        raise RankDeficientError(f"{what} is numerically singular "
                                 f"(sigma_min = {smin:.3e}, cond = {cond:.3e})",
                                 sigma_min=smin, condition_number=cond)
    return np.linalg.solve(M, rhs)


def deadbeat_inputs(real: Realization, x0, seq: SamplingSequence) -> ImpulsePlan:
    """Impulse inputs u_0 .. u_{n-1} at the sampling instants that drive x0
    (the state just before t_0) to the origin at t_n."""
    if seq.final_instant is None:
        raise ValueError("deadbeat plan needs the final instant t_n")
    x0 = np.asarray(x0, dtype=float)
    n = real.n
    if len(seq.instants) != n:
        raise ValueError(f"need {n} sampling instants, got {len(seq.instants)}")
    jf = _jordan(real)
    tn = seq.final_instant
    cols = [jf.expA(tn - ti) @ real.b for ti in seq.instants]
    G = np.column_stack(cols[::-1])  # [G_{n-1}, ..., G_0]
    rhs = -(jf.expA(tn - seq.instants[0]) @ x0)
    u_rev = _solve_checked(G, rhs, "controllability matrix [G_{n-1},...,G_0]")
    return ImpulsePlan(tuple(u_rev[::-1]), seq)


def simulate_impulse_train(real: Realization, x0, plan: ImpulsePlan) -> Trajectory:
    """Piecewise evolution: free flow between instants, jump b u_i at t_i."""
    x = np.asarray(x0, dtype=float)
    jf = _jordan(real)
    seq = plan.sequence
    checkpoints = []
    t_prev = seq.instants[0]
    for ti, ui in zip(seq.instants, plan.inputs):
        x = jf.expA(ti - t_prev) @ x
        checkpoints.append(Checkpoint(ti, "pre", x.copy()))
        x = x + real.b * ui
        checkpoints.append(Checkpoint(ti, "post", x.copy()))
        t_prev = ti
    if seq.final_instant is not None:
        x = jf.expA(seq.final_instant - t_prev) @ x
        checkpoints.append(Checkpoint(seq.final_instant, "pre", x.copy()))
    return Trajectory(tuple(checkpoints))


def reconstruct_initial_state(real: Realization, outputs, av: AlphaVector) -> np.ndarray:
    """Solve y(alpha_m) = c exp(A alpha_m) X0 for X0."""
    outputs = np.asarray(outputs, dtype=float)
    if outputs.shape != (real.n,):
        raise ValueError(f"need {real.n} output samples, got {outputs.shape}")
    jf = _jordan(real)
    O = np.vstack([real.c @ jf.expA(a) for a in av.alphas])
    return _solve_checked(O, outputs, "observability matrix [c exp(A alpha_m)]")


def export_trajectory_csv(traj: Trajectory, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        n = traj.checkpoints[0].state.size
        w.writerow(["time", *[f"x{i}" for i in range(n)], "side"])
        for cp in traj.checkpoints:
            w.writerow([f"{cp.time:.12g}", *[f"{v:.12g}" for v in cp.state], cp.side])
