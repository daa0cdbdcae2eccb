"""
Heisenberg-picture mode algebra.

Every optical element is stored as a Bogoliubov transform on the four
annihilation operators::

    a'_j = sum_k (A[j, k] a_k + B[j, k] a_k^dagger)

so the state never has to be represented.  Because all inputs are vacuum,
second-order moments follow directly from the (A, B) blocks.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgument

ModeId = Union[str, int]

ALGEBRA_TOL = 1e-12


@dataclass(frozen=True)
class ModeLayout:
    """Fixed ordering of mode labels.  Indices are stable for the whole run."""

    labels: tuple = ("s1", "i1", "s2", "i2")

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) != 4 or len(set(labels)) != 4:
            raise InvalidArgument(f"layout needs 4 distinct labels, got {labels!r}")
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.labels)

    def index(self, mode: ModeId) -> int:
        if isinstance(mode, (int, np.integer)) and not isinstance(mode, bool):
            if 0 <= mode < len(self.labels):
                return int(mode)
            raise InvalidArgument(f"mode index {mode} out of range")
        try:
            return self.labels.index(mode)
        except ValueError:
            raise InvalidArgument(f"unknown mode {mode!r}") from None


LAYOUT = ModeLayout()


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    """Linear map on the stacked operator vector (a; a^dagger)."""

    A: np.ndarray
    B: np.ndarray
    layout: ModeLayout = LAYOUT

    def __post_init__(self):
        A, B = _frozen(self.A), _frozen(self.B)
        m = len(self.layout)
        if A.shape != (m, m) or B.shape != (m, m):
            raise InvalidArgument(f"A and B must be {m}x{m}, got {A.shape} and {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def symplectic(self) -> np.ndarray:
        """The 2M x 2M matrix [[A, B], [B*, A*]] acting on (a; a^dagger)."""
        return np.block([[self.A, self.B], [self.B.conj(), self.A.conj()]])

    def commutator_residual(self) -> float:
        """max |A A^H - B B^H - I|; zero iff [a'_j, a'_k^dagger] = delta_jk."""
        m = self.A.shape[0]
        res = self.A @ self.A.conj().T - self.B @ self.B.conj().T - np.eye(m)
        return float(np.max(np.abs(res)))

    def symmetry_residual(self) -> float:
        """max |A B^T - B A^T|; zero iff [a'_j, a'_k] = 0."""
        res = self.A @ self.B.T - self.B @ self.A.T
        return float(np.max(np.abs(res)))

    def is_valid(self, tol: float = ALGEBRA_TOL) -> bool:
        return self.commutator_residual() <= tol and self.symmetry_residual() <= tol

    def coefficient(self, out_mode: ModeId, in_mode: ModeId, dagger: bool = False) -> complex:
        """Coefficient of a_in (or a_in^dagger) in the expansion of a'_out."""
        j = self.layout.index(out_mode)
        k = self.layout.index(in_mode)
        return complex((self.B if dagger else self.A)[j, k])


def identity_transform(layout: ModeLayout = LAYOUT) -> BogoliubovTransform:
    m = len(layout)
    return BogoliubovTransform(np.eye(m), np.zeros((m, m)), layout)


def _pair(layout, mode_a, mode_b):
    ja, jb = layout.index(mode_a), layout.index(mode_b)
    if ja == jb:
        raise InvalidArgument(f"element needs two distinct modes, got {mode_a!r} twice")
    return ja, jb


def two_mode_squeezer(layout: ModeLayout, mode_a: ModeId, mode_b: ModeId,
                      chi: float) -> BogoliubovTransform:
    """
    Downconverter with an undepleted pump, exp[-i chi (a b + a^dag b^dag)].

    a' = a cosh(chi) - i b^dag sinh(chi), and symmetrically for b.
    """
    ja, jb = _pair(layout, mode_a, mode_b)
    chi = float(chi)
    if not math.isfinite(chi):
        raise InvalidArgument(f"chi must be finite, got {chi}")
    A = np.eye(len(layout), dtype=complex)
    B = np.zeros_like(A)
    A[ja, ja] = A[jb, jb] = math.cosh(chi)
    B[ja, jb] = B[jb, ja] = -1j * math.sinh(chi)
    return BogoliubovTransform(A, B, layout)


def reflection_amplitude(t: float) -> float:
    radicand = 1.0 - t * t
    if radicand < -1e-15:
        raise InvalidArgument(f"transmission amplitude {t} exceeds 1")
    return math.sqrt(max(radicand, 0.0))


def beam_splitter(layout: ModeLayout, mode_from: ModeId, mode_to: ModeId,
                  t: float) -> BogoliubovTransform:
    """
    Real beam splitter feeding ``mode_from`` into ``mode_to``.

    With r = sqrt(1 - t^2)::

        a'_to   = t a_from + r a_to
        a'_from = r a_from - t a_to

    t = 0 leaves both modes alone; t = 1 routes mode_from into mode_to.
    """
    jf, jt = _pair(layout, mode_from, mode_to)
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise InvalidArgument(f"t must lie in [0, 1], got {t}")
    r = reflection_amplitude(t)
    A = np.eye(len(layout), dtype=complex)
    A[jt, jf] = t
    A[jt, jt] = r
    A[jf, jf] = r
    A[jf, jt] = -t
    return BogoliubovTransform(A, np.zeros_like(A), layout)


def compose(second: BogoliubovTransform, first: BogoliubovTransform) -> BogoliubovTransform:
    """
    Transform for ``first`` acting on the state, followed by ``second``.

    In the Heisenberg picture the operators produced by ``second`` are
    rewritten with ``first``'s map, so the symplectic matrices multiply as
    S_second @ S_first.
    """
    if second.layout != first.layout:
        raise InvalidArgument("cannot compose transforms on different layouts")
    A2, B2 = second.A, second.B
    A1, B1 = first.A, first.B
    A = A2 @ A1 + B2 @ B1.conj()
    B = A2 @ B1 + B2 @ A1.conj()
    return BogoliubovTransform(A, B, second.layout)


def compose_all(elements: Sequence[BogoliubovTransform]) -> BogoliubovTransform:
    """Compose elements listed in the order they act on the state."""
    if not elements:
        raise InvalidArgument("need at least one element")
    total = elements[0]
    for element in elements[1:]:
        total = compose(element, total)
    return total


@dataclass(frozen=True, eq=False)
class MomentSet:
    """
    Second-order moments of the two output signals.

    ``N[j, k] = <a_j^dag a_k>`` and ``M[j, k] = <a_j a_k>`` are kept when the
    producing backend has them.
    """

    n_s1: float
    n_s2: float
    cross: complex
    N: Optional[np.ndarray] = field(default=None, repr=False)
    M: Optional[np.ndarray] = field(default=None, repr=False)

    def as_array(self) -> np.ndarray:
        return np.array([self.n_s1, self.n_s2, self.cross], dtype=complex)

    def max_deviation(self, other: "MomentSet") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def moments_from_matrices(N, M=None, layout: ModeLayout = LAYOUT) -> MomentSet:
    s1, s2 = layout.index("s1"), layout.index("s2")
    return MomentSet(
        n_s1=float(N[s1, s1].real),
        n_s2=float(N[s2, s2].real),
        cross=complex(N[s1, s2]),
        N=N,
        M=M,
    )


def vacuum_moments(T: BogoliubovTransform) -> MomentSet:
    """Normal-ordered and anomalous moments of T applied to the four-mode vacuum."""
    N = T.B.conj() @ T.B.T
    M = T.A @ T.B.T
    N.setflags(write=False)
    M.setflags(write=False)
    return moments_from_matrices(N, M, T.layout)
