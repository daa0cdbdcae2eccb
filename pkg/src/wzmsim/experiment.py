"""
Two-downconverter induced-coherence experiment.

DC1 squeezes (s1, i1); idler 1 passes a beam splitter of transmission
amplitude t into the idler port of DC2, which squeezes (s2, i2).  The
first-order coherence between the two signal beams is computed three ways
(moments, closed form in chi, closed form in the idler photon number) and
by simulating the final 50/50 fringe scan.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, UndefinedCoherence
from .modes import (
    LAYOUT,
    BogoliubovTransform,
    MomentSet,
    beam_splitter,
    compose_all,
    reflection_amplitude,
    two_mode_squeezer,
    vacuum_moments,
)

# g1 may exceed 1 by rounding; anything beyond this is a real error.
_ROUNDING_SLACK = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """Squeezing strength ``chi`` (both crystals) and idler transmission ``t``."""

    chi: float
    t: float

    def __post_init__(self):
        chi, t = float(self.chi), float(self.t)
        if not math.isfinite(chi) or chi < 0:
            raise InvalidArgument(f"chi must be finite and >= 0, got {self.chi}")
        if not (0.0 <= t <= 1.0):
            raise InvalidArgument(f"t must lie in [0, 1], got {self.t}")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "t", t)

    @classmethod
    def from_nbar(cls, nbar1: float, t: float) -> "ExperimentConfig":
        if not (nbar1 >= 0 and math.isfinite(nbar1)):
            raise InvalidArgument(f"nbar1 must be finite and >= 0, got {nbar1}")
        return cls(math.asinh(math.sqrt(nbar1)), t)

    @property
    def nbar1(self) -> float:
        """Mean photon number of idler 1 entering the beam splitter."""
        return math.sinh(self.chi) ** 2

    @property
    def r(self) -> float:
        return reflection_amplitude(self.t)


def build_chain(config: ExperimentConfig) -> BogoliubovTransform:
    return compose_all([
        two_mode_squeezer(LAYOUT, "s1", "i1", config.chi),
        beam_splitter(LAYOUT, "i1", "i2", config.t),
        two_mode_squeezer(LAYOUT, "s2", "i2", config.chi),
    ])


def moments_closed_form(config: ExperimentConfig) -> MomentSet:
    sh2 = math.sinh(config.chi) ** 2
    ch = math.cosh(config.chi)
    t, r = config.t, config.r
    return MomentSet(
        n_s1=sh2,
        n_s2=sh2 * (r * r + t * t * ch * ch),
        cross=complex(sh2 * t * ch),
    )


def _check_unit(value):
    if value > 1.0 + _ROUNDING_SLACK:
        raise ArithmeticError(f"coherence {value!r} exceeds 1")
    return min(value, 1.0)


def g1_from_moments(m: MomentSet) -> float:
    """|<a1^dag a2>| / sqrt(<a1^dag a1><a2^dag a2>); undefined with no light."""
    if not (m.n_s1 > 0 and m.n_s2 > 0):
        raise UndefinedCoherence(
            f"g1 needs both signal intensities > 0 (n_s1={m.n_s1}, n_s2={m.n_s2})")
    return _check_unit(abs(m.cross) / math.sqrt(m.n_s1 * m.n_s2))


def g1_closed_form(chi: float, t: float) -> float:
    return _check_unit(t * math.cosh(chi) / math.sqrt(1.0 + (t * math.sinh(chi)) ** 2))


def g1_nbar_form(nbar1: float, t: float) -> float:
    """Coherence as a function of the idler-1 photon number; lies in [t, 1]."""
    return _check_unit(t * math.sqrt((1.0 + nbar1) / (1.0 + t * t * nbar1)))


def g1_exact(config: ExperimentConfig) -> float:
    """g1 from the moments of the composed Bogoliubov chain."""
    return g1_from_moments(vacuum_moments(build_chain(config)))


@dataclass(frozen=True, eq=False)
class FringeScanResult:
    phi: np.ndarray
    I_plus: np.ndarray
    I_minus: np.ndarray
    visibility: float
    phase_offset: float
    balance: bool
    attenuation: float = 1.0
    attenuated_arm: str = field(default="")


def default_phase_grid(count: int = 73) -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, count)


def extract_visibility(phi, intensity):
    """
    Least-squares fit of I(phi) = c0 + c1 cos(phi) + c2 sin(phi).

    Returns (visibility, phase_offset) with visibility = amplitude / mean.
    """
    phi = np.asarray(phi, dtype=float)
    design = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    if np.linalg.matrix_rank(design) < 3:
        raise InvalidArgument("phase grid must contain at least 3 distinct phases modulo 2 pi")
    (c0, c1, c2), *_ = np.linalg.lstsq(design, np.asarray(intensity, dtype=float), rcond=None)
    amplitude = math.hypot(c1, c2)
    offset = math.atan2(-c2, c1)
    return amplitude / c0, offset


def fringe_scan(config: ExperimentConfig, phase_grid=None, balance: bool = True,
                moments: MomentSet = None) -> FringeScanResult:
    """
    Intensities at the two outputs of the final lossless 50/50 beam splitter.

    The outputs are (a'_s1 +/- exp(i phi) a'_s2) / sqrt(2), where phi is the
    extra path-length phase of signal 2, giving

        I_pm(phi) = (n_s1 + n_s2) / 2 +/- |cross| cos(phi + arg(cross)).

    With ``balance`` the brighter signal first passes an attenuator of
    amplitude transmission sqrt(n_min / n_max); vacuum entering the
    attenuator does not contribute to normally ordered moments, so the
    attenuated arm keeps its coherence and the fringe visibility reaches g1.
    """
    if config.chi == 0:
        raise UndefinedCoherence("no signal light at chi = 0; visibility is undefined")
    if moments is None:
        moments = vacuum_moments(build_chain(config))
    phi = default_phase_grid() if phase_grid is None else np.asarray(phase_grid, dtype=float)

    n1, n2, cross = moments.n_s1, moments.n_s2, moments.cross
    eta, arm = 1.0, ""
    if balance and n1 != n2:
        eta = math.sqrt(min(n1, n2) / max(n1, n2))
        if n1 > n2:
            n1, arm = n2, "s1"
        else:
            n2, arm = n1, "s2"
        cross = cross * eta

    mean = 0.5 * (n1 + n2)
    fringe = abs(cross) * np.cos(phi + np.angle(cross))
    I_plus = mean + fringe
    I_minus = mean - fringe
    visibility, offset = extract_visibility(phi, I_plus)
    return FringeScanResult(
        phi=phi,
        I_plus=I_plus,
        I_minus=I_minus,
        visibility=float(visibility),
        phase_offset=float(offset),
        balance=balance,
        attenuation=eta,
        attenuated_arm=arm,
    )


@dataclass(frozen=True)
class LimitRow:
    nbar1: float
    t: float
    g1: float
    dev_from_t: float
    dev_from_one: float
    linear: bool
    saturated: bool


@dataclass
class LimitReport:
    rows: list
    threshold: float

    def curve(self, nbar1):
        return [row for row in self.rows if row.nbar1 == nbar1]

    def max_dev_from_t(self, nbar1) -> float:
        return max(row.dev_from_t for row in self.curve(nbar1))

    def summary(self):
        """Per nbar1: (max |g1 - t|, whole curve linear, every t > 0 saturated)."""
        out = {}
        for nbar in dict.fromkeys(row.nbar1 for row in self.rows):
            rows = self.curve(nbar)
            positive = [row for row in rows if row.t > 0]
            out[nbar] = (
                max(row.dev_from_t for row in rows),
                all(row.linear for row in rows),
                bool(positive) and all(row.saturated for row in positive),
            )
        return out


def limit_report(t_grid, nbar_list, threshold: float = 1e-3) -> LimitReport:
    """
    Tabulate g1 against the single-photon (g1 = t) and classical (g1 = 1) limits.

    A row is ``linear`` when |g1 - t| <= threshold and ``saturated`` when
    t > 0 and 1 - g1 <= threshold.
    """
    t_grid = list(t_grid)
    nbar_list = list(nbar_list)
    if not t_grid or not nbar_list:
        raise InvalidArgument("limit_report needs non-empty t and nbar1 grids")
    rows = []
    for nbar in nbar_list:
        for t in t_grid:
            g = g1_nbar_form(nbar, t)
            rows.append(LimitRow(
                nbar1=nbar,
                t=t,
                g1=g,
                dev_from_t=abs(g - t),
                dev_from_one=1.0 - g,
                linear=abs(g - t) <= threshold,
                saturated=t > 0 and 1.0 - g <= threshold,
            ))
    return LimitReport(rows, threshold)
