"""
Brute-force check of the mode algebra in a truncated Fock space.

The four-mode vacuum is stored as a dense amplitude tensor indexed by
(n_s1, n_i1, n_s2, n_i2), each occupation running over 0..N.  Elements are
applied to the state in Schroedinger order (DC1, idler beam splitter, DC2)
and moments are read off by applying ladder matrices along tensor axes.
This module deliberately shares no code with :mod:`wzmsim.modes` beyond
the mode layout and the :class:`MomentSet` container.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InvalidArgument
from .expm import expm
from .modes import LAYOUT, ModeId, ModeLayout, MomentSet, moments_from_matrices

NORM_TOL = 1e-10
DEFAULT_CAP = 24

SQUEEZER = "squeezer"
BEAM_SPLITTER = "beam-splitter"


def ladder_matrix(cutoff: int) -> np.ndarray:
    """Annihilation operator truncated to occupations 0..cutoff."""
    if int(cutoff) != cutoff or cutoff < 1:
        raise InvalidArgument(f"cutoff must be an integer >= 1, got {cutoff}")
    cutoff = int(cutoff)
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def embed_operator(op, mode: ModeId, layout: ModeLayout = LAYOUT) -> np.ndarray:
    """
    Lift a single-mode operator to the full four-mode space.

    The result is dense with side (N+1)**4, so keep this to small cutoffs;
    state evolution never builds it.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] < 2:
        raise InvalidArgument(f"single-mode operator must be square with side >= 2, got {op.shape}")
    j = layout.index(mode)
    ident = np.eye(op.shape[0])
    out = np.ones((1, 1))
    for k in range(len(layout)):
        out = np.kron(out, op if k == j else ident)
    return out


@dataclass(frozen=True)
class GeneratorSpec:
    """
    One optical element as seen by the oracle.

    ``strength`` is chi for a squeezer and theta = arcsin(t) for a beam
    splitter; ``modes`` is (a, b) for a squeezer, (from, to) for a beam
    splitter.
    """

    kind: str
    modes: tuple
    strength: float

    def __post_init__(self):
        if self.kind not in (SQUEEZER, BEAM_SPLITTER):
            raise InvalidArgument(f"unknown element kind {self.kind!r}")
        if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
            raise InvalidArgument(f"element needs two distinct modes, got {self.modes!r}")
        if not math.isfinite(self.strength):
            raise InvalidArgument(f"strength must be finite, got {self.strength}")
        if self.kind == BEAM_SPLITTER and not (0.0 <= self.strength <= math.pi / 2):
            raise InvalidArgument(f"beam-splitter angle must lie in [0, pi/2], got {self.strength}")

    @classmethod
    def squeezer(cls, mode_a, mode_b, chi):
        return cls(SQUEEZER, (mode_a, mode_b), float(chi))

    @classmethod
    def beam_splitter(cls, mode_from, mode_to, t):
        if not (0.0 <= t <= 1.0):
            raise InvalidArgument(f"t must lie in [0, 1], got {t}")
        return cls(BEAM_SPLITTER, (mode_from, mode_to), math.asin(t))


def wzm_generators(chi: float, t: float) -> list:
    """DC1, idler beam splitter, DC2 in the order they act on the state."""
    return [
        GeneratorSpec.squeezer("s1", "i1", chi),
        GeneratorSpec.beam_splitter("i1", "i2", t),
        GeneratorSpec.squeezer("s2", "i2", chi),
    ]


def pair_generator(kind: str, cutoff: int, strength: float) -> np.ndarray:
    """
    Anti-Hermitian generator on the two-mode space, basis order (first, second).

    squeezer:      -i chi (a b + a^dag b^dag)
    beam splitter: theta (a_to^dag a_from - a_from^dag a_to)
    """
    a = ladder_matrix(cutoff)
    ad = a.T
    if kind == SQUEEZER:
        return -1j * strength * (np.kron(a, a) + np.kron(ad, ad))
    if kind == BEAM_SPLITTER:
        return strength * (np.kron(a, ad) - np.kron(ad, a)).astype(complex)
    raise InvalidArgument(f"unknown element kind {kind!r}")


@functools.lru_cache(maxsize=64)
def _pair_unitary(kind, cutoff, strength):
    U = expm(pair_generator(kind, cutoff, strength))
    U.setflags(write=False)
    return U


@dataclass(frozen=True, eq=False)
class FockState:
    amplitudes: np.ndarray
    cutoff: int
    layout: ModeLayout = field(default=LAYOUT, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        side = self.cutoff + 1
        if amps.shape != (side,) * len(self.layout):
            raise InvalidArgument(f"amplitude tensor shape {amps.shape} does not match cutoff {self.cutoff}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def vacuum(cls, cutoff: int, layout: ModeLayout = LAYOUT) -> "FockState":
        ladder_matrix(cutoff)  # validates
        amps = np.zeros((cutoff + 1,) * len(layout), dtype=complex)
        amps[(0,) * len(layout)] = 1.0
        return cls(amps, cutoff, layout)

    @classmethod
    def basis(cls, occupations, cutoff: int, layout: ModeLayout = LAYOUT) -> "FockState":
        amps = np.zeros((cutoff + 1,) * len(layout), dtype=complex)
        amps[tuple(occupations)] = 1.0
        return cls(amps, cutoff, layout)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes.ravel()))

    def mean_number(self, mode: ModeId) -> float:
        j = self.layout.index(mode)
        probs = np.abs(self.amplitudes) ** 2
        n = np.arange(self.cutoff + 1)
        shape = [1] * probs.ndim
        shape[j] = -1
        return float(np.sum(probs * n.reshape(shape)))


def apply_element(state: FockState, gen: GeneratorSpec) -> FockState:
    """Return exp(G) |state> for the element's generator G."""
    ja = state.layout.index(gen.modes[0])
    jb = state.layout.index(gen.modes[1])
    if gen.strength == 0.0:
        return state
    side = state.cutoff + 1
    U = _pair_unitary(gen.kind, state.cutoff, gen.strength)
    psi = np.moveaxis(state.amplitudes, (ja, jb), (0, 1))
    rest = psi.shape[2:]
    psi = (U @ psi.reshape(side * side, -1)).reshape((side, side) + rest)
    psi = np.moveaxis(psi, (0, 1), (ja, jb))
    return FockState(psi, state.cutoff, state.layout)


def _lower(amps, axis, a):
    return np.moveaxis(np.tensordot(a, amps, axes=([1], [axis])), 0, axis)


def measure_moments(state: FockState) -> MomentSet:
    """N[j, k] = <a_j^dag a_k> and M[j, k] = <a_j a_k> from ladder-shifted states."""
    a = ladder_matrix(state.cutoff)
    psi = state.amplitudes
    m = len(state.layout)
    shifted = [_lower(psi, k, a) for k in range(m)]
    N = np.empty((m, m), dtype=complex)
    M = np.empty((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            N[j, k] = np.vdot(shifted[j], shifted[k])
            M[j, k] = np.vdot(psi, _lower(shifted[k], j, a))
    return moments_from_matrices(N, M, state.layout)


@dataclass
class ChainRun:
    state: FockState
    moments: MomentSet
    max_norm_drift: float


def run_chain(chi: float, t: float, cutoff: int) -> ChainRun:
    """Evolve the vacuum through the two-downconverter chain at one cutoff."""
    state = FockState.vacuum(cutoff)
    drift = 0.0
    for gen in wzm_generators(chi, t):
        before = state.norm()
        state = apply_element(state, gen)
        drift = max(drift, abs(state.norm() - before))
    return ChainRun(state, measure_moments(state), drift)


@dataclass
class TruncationResult:
    """
    Outcome of the cutoff doubling schedule.

    ``cutoff`` is the smallest N whose moments agree with the next cutoff
    up to ``tol``; ``moments`` come from that larger cutoff and ``error``
    is the change observed between the two.
    """

    cutoff: int
    moments: MomentSet
    error: float
    max_norm_drift: float
    history: list


def cutoff_schedule(start: int = 1, cap: int = DEFAULT_CAP):
    n = start
    while True:
        yield n
        if n >= cap:
            return
        n = min(2 * n, cap)


def truncation_check(config, tol: float = 1e-10, cap: int = DEFAULT_CAP, start: int = 1) -> TruncationResult:
    """
    Double the per-mode cutoff until all three signal moments settle.

    ``config`` needs ``chi`` and ``t`` attributes.  Raises
    :class:`ConvergenceFailure` once the cap is reached unsettled.
    """
    if not tol > 0:
        raise InvalidArgument(f"tol must be positive, got {tol}")
    if cap < start:
        raise InvalidArgument(f"cap {cap} is below the starting cutoff {start}")
    history = []
    drift = 0.0
    prev = None
    for n in cutoff_schedule(start, cap):
        run = run_chain(config.chi, config.t, n)
        drift = max(drift, run.max_norm_drift)
        if prev is not None:
            change = run.moments.max_deviation(prev[1])
            history.append((prev[0], n, change))
            if change < tol:
                return TruncationResult(prev[0], run.moments, change, drift, history)
        prev = (n, run.moments)
    last = history[-1][2] if history else float("nan")
    raise ConvergenceFailure(
        f"moments still changing by {last:.3g} (tol {tol:g}) at cutoff cap {cap} "
        f"for chi={config.chi:g}, t={config.t:g}",
        history,
        moments=prev[1] if prev else None,
        error=last,
    )
