"""Alternating maximization of the bilinear measurement-optimization problem.

With one party's effects fixed, the objective is linear in each of the other
party's effects, and the optimum per setting is the projector onto the
strictly positive eigenspace of a small Hermitian matrix.  Sweeping the two
parties in turn hill-climbs to a local maximum; multiple seeded restarts hunt
for the global one.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .inequality import BellInequality, PARTY_A, PARTY_B
from .quantum import DensityMatrix, Effect, MeasurementSet

# Eigenvalues at or below this are treated as non-positive when building the
# optimal projector; excluding the nullspace keeps effects projective.
EIG_CUTOFF = 1e-14


@dataclass(frozen=True)
class SeesawConfig:
    """Knobs for one multi-restart run.

    ``rank_policy`` lists the admissible initial projector ranks (drawn
    uniformly per effect); None means every rank 1..d-1.
    """

    tol: float = 1e-12
    max_iters: int = 500
    restarts: int = 1000
    base_seed: int = 0
    rank_policy: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be at least 1")


@dataclass(frozen=True, eq=False)
class SeesawResult:
    best_violation: float
    best_a: MeasurementSet
    best_b: MeasurementSet
    iters_used: int
    restart_index: int
    converged: bool


def _positive_projector(g: np.ndarray) -> np.ndarray:
    g = (g + g.conj().T) / 2
    evals, evecs = np.linalg.eigh(g)
    cols = evecs[:, evals > EIG_CUTOFF]
    if cols.shape[1] == 0:
        return np.zeros_like(g)
    return cols @ cols.conj().T


class _Engine:
    """Array-level core shared by the public entry points."""

    def __init__(self, ineq: BellInequality, rho: DensityMatrix):
        self.ineq = ineq
        self.d = rho.d
        self.rho4 = rho.op.reshape(self.d, self.d, self.d, self.d)
        self.marg_a = np.asarray(ineq.marg_a, dtype=float)
        self.marg_b = np.asarray(ineq.marg_b, dtype=float)
        self.joint = np.asarray(ineq.joint, dtype=float)
        self.eye = np.eye(self.d)

    def step_a(self, fs: np.ndarray) -> np.ndarray:
        """Optimal Alice effects given Bob's; fs has shape (m_b, d, d)."""
        ys = self.marg_a[:, None, None] * self.eye + np.einsum("ij,jkl->ikl", self.joint, fs)
        gs = np.einsum("ajbk,ikj->iab", self.rho4, ys)
        return np.stack([_positive_projector(g) for g in gs])

    def step_b(self, es: np.ndarray) -> np.ndarray:
        xs = self.marg_b[:, None, None] * self.eye + np.einsum("ij,ikl->jkl", self.joint, es)
        hs = np.einsum("ajck,mca->mjk", self.rho4, xs)
        return np.stack([_positive_projector(h) for h in hs])

    def objective(self, es: np.ndarray, fs: np.ndarray) -> float:
        xs = self.marg_b[:, None, None] * self.eye + np.einsum("ij,ikl->jkl", self.joint, es)
        hs = np.einsum("ajck,mca->mjk", self.rho4, xs)
        q_a = np.einsum("ajbj,iba->i", self.rho4, es).real
        total = np.einsum("mjk,mkj->", hs, fs).real + float(np.dot(self.marg_a, q_a))
        return float(total) - self.ineq.bound

    def run(self, es: np.ndarray, fs: np.ndarray, tol: float, max_iters: int):
        """Alternate full A/B sweeps until the improvement drops below tol."""
        value = self.objective(es, fs)
        converged = False
        iters = 0
        for iters in range(1, max_iters + 1):
            es = self.step_a(fs)
            # Bob's half-step, reusing its matrices for the objective value.
            xs = self.marg_b[:, None, None] * self.eye + np.einsum("ij,ikl->jkl", self.joint, es)
            hs = np.einsum("ajck,mca->mjk", self.rho4, xs)
            fs = np.stack([_positive_projector(h) for h in hs])
            q_a = np.einsum("ajbj,iba->i", self.rho4, es).real
            new_value = float(np.einsum("mjk,mkj->", hs, fs).real
                              + np.dot(self.marg_a, q_a)) - self.ineq.bound
            if new_value - value < tol:
                value = max(value, new_value)
                converged = True
                break
            value = new_value
        return es, fs, value, iters, converged

    def random_init(self, m: int, rng: np.random.Generator,
                    ranks: tuple[int, ...]) -> np.ndarray:
        from .quantum import random_projective_measurement

        ops = []
        for _ in range(m):
            rank = int(ranks[rng.integers(len(ranks))])
            ops.append(random_projective_measurement(self.d, rank, rng).op)
        return np.stack(ops)


def _package(party: str, ops: np.ndarray) -> MeasurementSet:
    d = ops.shape[1]
    return MeasurementSet(party, tuple(Effect(d, op) for op in ops))


def optimize_party(ineq: BellInequality, rho: DensityMatrix, fixed: MeasurementSet,
                   party: str) -> MeasurementSet:
    """One exact half-step: the given party's optimal projective effects with
    the other party's measurements fixed."""
    if fixed.d != rho.d:
        raise ValueError("fixed measurements do not match the state dimension")
    eng = _Engine(ineq, rho)
    if party == PARTY_A:
        if len(fixed) != ineq.m_b:
            raise ValueError("fixed set must hold Bob's effects when optimizing Alice")
        return _package(PARTY_A, eng.step_a(fixed.ops()))
    if party == PARTY_B:
        if len(fixed) != ineq.m_a:
            raise ValueError("fixed set must hold Alice's effects when optimizing Bob")
        return _package(PARTY_B, eng.step_b(fixed.ops()))
    raise ValueError(f"party must be {PARTY_A!r} or {PARTY_B!r}")


def seesaw(ineq: BellInequality, rho: DensityMatrix, init_a: MeasurementSet,
           init_b: MeasurementSet, cfg: SeesawConfig) -> SeesawResult:
    """Alternating maximization from explicit initial measurements."""
    if len(init_a) != ineq.m_a or len(init_b) != ineq.m_b:
        raise ValueError("initial measurement counts do not match the inequality")
    if init_a.d != rho.d or init_b.d != rho.d:
        raise ValueError("initial measurements do not match the state dimension")
    eng = _Engine(ineq, rho)
    es, fs, value, iters, converged = eng.run(init_a.ops(), init_b.ops(),
                                              cfg.tol, cfg.max_iters)
    return SeesawResult(value, _package(PARTY_A, es), _package(PARTY_B, fs),
                        iters, 0, converged)


def _run_restart(eng: _Engine, ineq: BellInequality, cfg: SeesawConfig,
                 ranks: tuple[int, ...], index: int, step_key: tuple,
                 warm_start) -> tuple:
    if index == 0 and warm_start is not None:
        es = warm_start[0].ops().copy()
        fs = warm_start[1].ops().copy()
    else:
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.base_seed, spawn_key=(*step_key, index)))
        es = eng.random_init(ineq.m_a, rng, ranks)
        fs = eng.random_init(ineq.m_b, rng, ranks)
    return eng.run(es, fs, cfg.tol, cfg.max_iters)


def multi_restart_max(ineq: BellInequality, rho: DensityMatrix, cfg: SeesawConfig,
                      warm_start: Optional[tuple[MeasurementSet, MeasurementSet]] = None,
                      stop_at: Optional[float] = None,
                      step_key: tuple = (),
                      threads: int = 1) -> SeesawResult:
    """Best see-saw outcome over seeded restarts.

    Restart ``i`` draws its initial measurements from a generator seeded by
    (base_seed, *step_key, i), so results do not depend on execution order or
    thread count; ties keep the lowest restart index.  ``warm_start`` replaces
    restart 0's random initialization.  When ``stop_at`` is given, restarts
    are abandoned (in index order) once the best violation exceeds it -- the
    best-so-far is still an exact see-saw local optimum, just not the best of
    all ``cfg.restarts`` starts.
    """
    eng = _Engine(ineq, rho)
    ranks = cfg.rank_policy or tuple(range(1, rho.d))
    if not all(1 <= r <= rho.d - 1 for r in ranks):
        raise ValueError(f"rank policy {ranks} invalid for d={rho.d}")

    best = None  # (violation, index, es, fs, iters, converged)

    def consider(index, outcome):
        nonlocal best
        es, fs, value, iters, converged = outcome
        if best is None or value > best[0]:
            best = (value, index, es, fs, iters, converged)

    if threads <= 1:
        for i in range(cfg.restarts):
            consider(i, _run_restart(eng, ineq, cfg, ranks, i, step_key, warm_start))
            if stop_at is not None and best[0] > stop_at:
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = False
            for lo in range(0, cfg.restarts, threads):
                if done:
                    break
                chunk = range(lo, min(lo + threads, cfg.restarts))
                outcomes = list(pool.map(
                    lambda i: _run_restart(eng, ineq, cfg, ranks, i, step_key, warm_start),
                    chunk))
                for i, outcome in zip(chunk, outcomes):
                    consider(i, outcome)
                    if stop_at is not None and best[0] > stop_at:
                        done = True
                        break

    value, index, es, fs, iters, converged = best
    return SeesawResult(value, _package(PARTY_A, es), _package(PARTY_B, fs),
                        iters, index, converged)
