"""Complex operator arithmetic: measurement effects, isotropic states, and
trace-rule evaluation of Bell inequality violations.

The tensor-product index convention is Alice-major throughout: the product
basis vector |ij> of the d x d bipartite system sits at index i*d + j.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .inequality import BellInequality, PARTY_A, PARTY_B

HERMITIAN_TOL = 1e-12
EIG_RANGE_TOL = 1e-10
PROJECTIVE_TOL = 1e-9
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10
FRECHET_TOL = 1e-10


def hermitian_eig(op: np.ndarray):
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues)."""
    return np.linalg.eigh(op)


def _check_hermitian(op: np.ndarray, what: str, tol: float = HERMITIAN_TOL):
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {op.shape}")
    if np.abs(op - op.conj().T).max() > tol:
        raise ValueError(f"{what} is not Hermitian within {tol:g}")


@dataclass(frozen=True, eq=False)
class Effect:
    """A two-outcome POVM element: Hermitian with spectrum in [0, 1]."""

    d: int
    op: np.ndarray

    def __post_init__(self):
        op = np.asarray(self.op, dtype=complex)
        object.__setattr__(self, "op", op)
        if op.shape != (self.d, self.d):
            raise ValueError(f"effect must be {self.d}x{self.d}, got {op.shape}")
        _check_hermitian(op, "effect")
        evals = np.linalg.eigvalsh(op)
        if evals[0] < -EIG_RANGE_TOL or evals[-1] > 1 + EIG_RANGE_TOL:
            raise ValueError(f"effect eigenvalues outside [0, 1]: [{evals[0]:g}, {evals[-1]:g}]")
        op.flags.writeable = False

    def projection_defect(self) -> float:
        """max |E^2 - E|; at most ~1e-9 for projective effects."""
        return float(np.abs(self.op @ self.op - self.op).max())

    def complement(self) -> "Effect":
        return Effect(self.d, np.eye(self.d) - self.op)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """One party's list of two-outcome measurement effects."""

    party: str
    effects: tuple[Effect, ...]

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        if self.party not in (PARTY_A, PARTY_B):
            raise ValueError(f"party must be {PARTY_A!r} or {PARTY_B!r}")
        if not self.effects:
            raise ValueError("measurement set needs at least one effect")
        d = self.effects[0].d
        if any(e.d != d for e in self.effects):
            raise ValueError("all effects must share one dimension")

    @property
    def d(self) -> int:
        return self.effects[0].d

    def __len__(self) -> int:
        return len(self.effects)

    def ops(self) -> np.ndarray:
        return np.stack([e.op for e in self.effects])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """State of the d x d bipartite system: Hermitian, unit trace, PSD."""

    d: int
    op: np.ndarray

    def __post_init__(self):
        op = np.asarray(self.op, dtype=complex)
        object.__setattr__(self, "op", op)
        n = self.d * self.d
        if op.shape != (n, n):
            raise ValueError(f"state must be {n}x{n} for d={self.d}, got {op.shape}")
        _check_hermitian(op, "state")
        tr = op.trace()
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"state trace {tr} is not 1")
        if np.linalg.eigvalsh(op)[0] < -PSD_TOL:
            raise ValueError("state is not positive semidefinite")
        op.flags.writeable = False


@dataclass(frozen=True, eq=False)
class CorrelationVector:
    """Outcome-1 probabilities q_i0, q_0j, q_ij of one correlation experiment."""

    p_a: np.ndarray
    p_b: np.ndarray
    p_ab: np.ndarray

    def __post_init__(self):
        p_a = np.asarray(self.p_a, dtype=float)
        p_b = np.asarray(self.p_b, dtype=float)
        p_ab = np.asarray(self.p_ab, dtype=float)
        for name, arr in (("p_a", p_a), ("p_b", p_b), ("p_ab", p_ab)):
            object.__setattr__(self, name, arr)
        if p_ab.shape != (p_a.size, p_b.size):
            raise ValueError("p_ab shape must be (m_a, m_b)")
        for name, arr in (("p_a", p_a), ("p_b", p_b), ("p_ab", p_ab)):
            if (arr < -FRECHET_TOL).any() or (arr > 1 + FRECHET_TOL).any():
                raise ValueError(f"{name} entries must lie in [0, 1]")
        lo = np.maximum(0.0, p_a[:, None] + p_b[None, :] - 1.0)
        hi = np.minimum(p_a[:, None], p_b[None, :])
        if (p_ab < lo - FRECHET_TOL).any() or (p_ab > hi + FRECHET_TOL).any():
            raise ValueError("joint probabilities violate the Frechet bounds")
        for arr in (p_a, p_b, p_ab):
            arr.flags.writeable = False

    @property
    def m_a(self) -> int:
        return self.p_a.size

    @property
    def m_b(self) -> int:
        return self.p_b.size


# ---------------------------------------------------------------------------
# States


def max_entangled(d: int) -> np.ndarray:
    """The maximally entangled state vector (1/sqrt(d)) sum_k |kk>."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return psi


def isotropic_state(d: int, alpha: float) -> DensityMatrix:
    """alpha |psi_d><psi_d| + (1 - alpha) I / d^2."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    psi = max_entangled(d)
    op = alpha * np.outer(psi, psi.conj()) + (1.0 - alpha) * np.eye(d * d) / (d * d)
    return DensityMatrix(d, op)


def partial_trace_a(op: np.ndarray, d: int) -> np.ndarray:
    return op.reshape(d, d, d, d).trace(axis1=0, axis2=2)


def partial_trace_b(op: np.ndarray, d: int) -> np.ndarray:
    return op.reshape(d, d, d, d).trace(axis1=1, axis2=3)


# ---------------------------------------------------------------------------
# Correlations and violations


def correlations(rho: DensityMatrix, a: MeasurementSet, b: MeasurementSet) -> CorrelationVector:
    """q_i0 = tr(rho (E_i x I)), q_0j = tr(rho (I x F_j)), q_ij = tr(rho (E_i x F_j))."""
    d = rho.d
    if a.d != d or b.d != d:
        raise ValueError(f"measurement dimension does not match state dimension {d}")
    rho4 = rho.op.reshape(d, d, d, d)
    es = a.ops()
    fs = b.ops()
    q_a = np.einsum("ajbj,iba->i", rho4, es)
    q_b = np.einsum("ajak,mkj->m", rho4, fs)
    q_ab = np.einsum("ajbk,iba,mkj->im", rho4, es, fs)
    worst = max(np.abs(q_a.imag).max(), np.abs(q_b.imag).max(), np.abs(q_ab.imag).max())
    if worst > IMAG_TOL:
        raise ValueError(f"imaginary probability residue {worst:g} exceeds {IMAG_TOL:g}")
    return CorrelationVector(q_a.real, q_b.real, q_ab.real)


def violation(ineq: BellInequality, rho: DensityMatrix, a: MeasurementSet,
              b: MeasurementSet) -> float:
    """Value of the inequality's left side minus its bound; positive violates."""
    if len(a) != ineq.m_a or len(b) != ineq.m_b:
        raise ValueError("measurement counts do not match the inequality")
    q = correlations(rho, a, b)
    joint = np.asarray(ineq.joint, dtype=float)
    total = (np.dot(ineq.marg_a, q.p_a) + np.dot(ineq.marg_b, q.p_b)
             + float((joint * q.p_ab).sum()))
    return total - ineq.bound


# ---------------------------------------------------------------------------
# Random projectors


def random_projective_measurement(d: int, rank: int, rng: np.random.Generator) -> Effect:
    """Projector onto a Haar-random subspace of the given rank."""
    if not 1 <= rank <= d - 1:
        raise ValueError(f"rank must lie in 1..{d - 1}, got {rank}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    q, _ = np.linalg.qr(g)
    return Effect(d, q @ q.conj().T)


# ---------------------------------------------------------------------------
# Crossing of the affine violation curve


@dataclass(frozen=True)
class Crossing:
    """Zero crossing of the violation of a fixed measurement pair as a
    function of the isotropic mixing parameter."""

    alpha: float
    v0: float
    v1: float
    in_range: bool

    @property
    def never_violating(self) -> bool:
        return self.v1 <= 0.0


def alpha_crossing(ineq: BellInequality, d: int, a: MeasurementSet,
                   b: MeasurementSet) -> Crossing:
    """Where the violation crosses zero along the isotropic family.

    For fixed measurements the violation is affine in alpha, so the crossing
    is alpha* = -v0 / (v1 - v0) from the endpoint values alone.
    """
    v0 = violation(ineq, isotropic_state(d, 0.0), a, b)
    v1 = violation(ineq, isotropic_state(d, 1.0), a, b)
    if v1 == v0:
        raise ValueError("degenerate measurements: violation does not depend on alpha")
    raw = -v0 / (v1 - v0)
    alpha = min(max(raw, 0.0), 1.0)
    return Crossing(alpha, v0, v1, in_range=(0.0 <= raw <= 1.0))


# ---------------------------------------------------------------------------
# Measurement file format


def parse_measurements(text: str, party_a_count: Optional[int] = None,
                       party_b_count: Optional[int] = None):
    """Parse a measurement file into (alice, bob) MeasurementSets.

    Records are ``effect <A|B> <index> <proj|complement|zero|identity>``;
    proj and complement are followed by one line of 2d reals giving the
    vector, which is renormalized on load.
    """
    lines = [l for l in (raw.strip() for raw in text.splitlines())
             if l and not l.startswith("#")]
    raw_records = []  # (party, index, kind, vector or None)
    pos = 0
    while pos < len(lines):
        tokens = lines[pos].split()
        if len(tokens) != 4 or tokens[0] != "effect":
            raise ValueError(f"expected 'effect <A|B> <index> <kind>', got {lines[pos]!r}")
        _, party, index_s, kind = tokens
        if party not in (PARTY_A, PARTY_B):
            raise ValueError(f"unknown party {party!r}")
        index = int(index_s)
        pos += 1
        if kind in ("proj", "complement"):
            if pos >= len(lines):
                raise ValueError(f"missing vector line for effect {party} {index}")
            vals = [float(t) for t in lines[pos].split()]
            pos += 1
            if len(vals) % 2 != 0:
                raise ValueError("vector line must hold re/im pairs")
            vec = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
            norm = np.linalg.norm(vec)
            if norm < 1e-9:
                raise ValueError(f"effect {party} {index}: vector norm too small")
            raw_records.append((party, index, kind, vec / norm))
        elif kind in ("zero", "identity"):
            raw_records.append((party, index, kind, None))
        else:
            raise ValueError(f"unknown effect kind {kind!r}")

    dims = {vec.size for _, _, _, vec in raw_records if vec is not None}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector dimensions {sorted(dims)}")
    if not dims:
        raise ValueError("no vector records; cannot infer the dimension")
    d = dims.pop()

    records: dict[str, dict[int, Effect]] = {PARTY_A: {}, PARTY_B: {}}
    for party, index, kind, vec in raw_records:
        if kind == "zero":
            op = np.zeros((d, d))
        elif kind == "identity":
            op = np.eye(d)
        else:
            op = np.outer(vec, vec.conj())
            if kind == "complement":
                op = np.eye(d) - op
        if index in records[party]:
            raise ValueError(f"duplicate effect {party} {index}")
        records[party][index] = Effect(d, op)

    sets = []
    for party, expected in ((PARTY_A, party_a_count), (PARTY_B, party_b_count)):
        got = records[party]
        if not got:
            raise ValueError(f"no effects for party {party}")
        m = max(got)
        if sorted(got) != list(range(1, m + 1)):
            raise ValueError(f"party {party} effect indices must be 1..{m} without gaps")
        if expected is not None and m != expected:
            raise ValueError(f"party {party}: expected {expected} effects, found {m}")
        sets.append(MeasurementSet(party, tuple(got[i] for i in range(1, m + 1))))
    return sets[0], sets[1]


def load_measurements(path, party_a_count: Optional[int] = None,
                      party_b_count: Optional[int] = None):
    return parse_measurements(Path(path).read_text(encoding="utf-8"),
                              party_a_count, party_b_count)


def dump_measurements(a: MeasurementSet, b: MeasurementSet) -> str:
    """Serialize projective measurement sets to the measurement file format.

    Effects of rank 1 become ``proj`` records, rank d-1 ``complement``, and
    rank 0 / d the vectorless ``zero`` / ``identity`` markers.  Middle ranks
    (possible only for d >= 4) have no file form and raise.
    """
    out = []
    for mset in (a, b):
        for index, eff in enumerate(mset.effects, start=1):
            if eff.projection_defect() > PROJECTIVE_TOL:
                raise ValueError(f"effect {mset.party} {index} is not projective")
            evals, evecs = hermitian_eig(eff.op)
            rank = int((evals > 0.5).sum())
            d = eff.d
            if rank == 0:
                out.append(f"effect {mset.party} {index} zero")
                continue
            if rank == d:
                out.append(f"effect {mset.party} {index} identity")
                continue
            if rank == 1:
                kind, vec = "proj", evecs[:, -1]
            elif rank == d - 1:
                kind, vec = "complement", evecs[:, 0]
            else:
                raise ValueError(f"effect {mset.party} {index}: rank {rank} of {d} has no "
                                 "single-vector file form")
            out.append(f"effect {mset.party} {index} {kind}")
            out.append(" ".join(f"{z.real:.12f} {z.imag:.12f}" for z in vec))
    return "\n".join(out) + "\n"
