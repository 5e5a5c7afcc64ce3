"""Physical setup for standing-wave diffraction of a structured charge.

Converts laboratory inputs (laser wavelength, field amplitude, interaction
time) into the dimensionless groups the solvers use, builds the effective
one-period potential generated by the low-order multipole moments of the
charge distribution, and reports whether a given configuration sits inside
the thin-grating (Raman-Nath) regime.

Unit conventions: lengths in 1/k_L, so the potential period is pi; energies
in units of the recoil energy; times in hbar over recoil energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# CODATA 2018
E_CHARGE = 1.602176634e-19    # C (exact)
M_ELECTRON = 9.1093837015e-31  # kg
HBAR = 1.054571817e-34        # J s
C_LIGHT = 299792458.0         # m/s (exact)

_REL_TOL = 1e-12


def _require_finite(name: str, value: float, nonneg: bool = False, positive: bool = False) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if nonneg and value < 0.0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class ElectronConstants:
    """Particle constants used for scale conversion, overridable in bulk."""

    e: float = E_CHARGE
    m: float = M_ELECTRON
    hbar: float = HBAR
    c: float = C_LIGHT

    def __post_init__(self):
        for name in ("e", "m", "hbar", "c"):
            _require_finite(name, getattr(self, name), positive=True)


@dataclass(frozen=True)
class LaserSetup:
    """Standing-wave parameters: wavelength and peak field of one beam."""

    wavelength_m: float
    field_amplitude_V_per_m: float = 0.0

    def __post_init__(self):
        _require_finite("wavelength_m", self.wavelength_m, positive=True)
        _require_finite("field_amplitude_V_per_m", self.field_amplitude_V_per_m, nonneg=True)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    @property
    def angular_frequency(self) -> float:
        # with the default speed of light; derive_scales honors an override
        return 2.0 * math.pi * C_LIGHT / self.wavelength_m


@dataclass(frozen=True)
class DimensionlessSetup:
    """Dimensionless run parameters.

    u0 is the well depth over the recoil energy, tau the interaction time in
    recoil units, and alpha = u0 * tau / 2 the accumulated grating phase.
    A setup built from alpha alone represents the ideal thin-grating limit
    and is stored as u0 = inf, tau = 0.  recoil_energy_J and v0_V keep the
    SI anchors when the setup came from laboratory inputs.
    """

    u0: float
    tau: float
    alpha: float
    recoil_energy_J: float | None = None
    v0_V: float | None = None

    def __post_init__(self):
        for name in ("u0", "tau", "alpha"):
            v = float(getattr(self, name))
            if math.isnan(v) or v < 0.0:
                raise ValueError(f"{name} must be a nonnegative number, got {v!r}")
        if not math.isfinite(self.tau) or not math.isfinite(self.alpha):
            raise ValueError("tau and alpha must be finite")
        if math.isfinite(self.u0):
            expect = 0.5 * self.u0 * self.tau
            if abs(self.alpha - expect) > _REL_TOL * max(1.0, abs(self.alpha)):
                raise ValueError(
                    f"inconsistent setup: alpha={self.alpha!r} but u0*tau/2={expect!r}")
        for name in ("recoil_energy_J", "v0_V"):
            v = getattr(self, name)
            if v is not None:
                _require_finite(name, v, nonneg=True)

    @classmethod
    def from_u0_tau(cls, u0: float, tau: float, **kw) -> "DimensionlessSetup":
        u0 = _require_finite("u0", u0, nonneg=True)
        tau = _require_finite("tau", tau, nonneg=True)
        return cls(u0=u0, tau=tau, alpha=0.5 * u0 * tau, **kw)

    @classmethod
    def from_u0_alpha(cls, u0: float, alpha: float, **kw) -> "DimensionlessSetup":
        u0 = _require_finite("u0", u0, positive=True)
        alpha = _require_finite("alpha", alpha, nonneg=True)
        return cls(u0=u0, tau=2.0 * alpha / u0, alpha=alpha, **kw)

    @classmethod
    def from_alpha(cls, alpha: float, **kw) -> "DimensionlessSetup":
        """Ideal phase-grating limit: infinitely deep, infinitely short."""
        alpha = _require_finite("alpha", alpha, nonneg=True)
        return cls(u0=math.inf, tau=0.0, alpha=alpha, **kw)


def derive_scales(laser: LaserSetup, interaction_time_s: float,
                  consts: ElectronConstants = ElectronConstants()) -> DimensionlessSetup:
    """Reduce laboratory inputs to the dimensionless groups.

    The standing wave acts through the oscillation-averaged potential
    V(x) = V0 cos^2(k_L x) with V0 = e E0^2 / (4 m w_L^2) in volts; the
    recoil energy is hbar^2 k_L^2 / 2m.

    Parameters
    ----------
    laser : LaserSetup
    interaction_time_s : float
        Time the charge spends inside the standing wave, seconds.
    consts : ElectronConstants, optional

    Returns
    -------
    DimensionlessSetup
        With u0, tau, alpha and the SI anchors filled in.
    """
    t = _require_finite("interaction_time_s", interaction_time_s, nonneg=True)
    k_l = laser.wavenumber
    omega = 2.0 * math.pi * consts.c / laser.wavelength_m
    v0 = consts.e * laser.field_amplitude_V_per_m**2 / (4.0 * consts.m * omega**2)
    recoil = consts.hbar**2 * k_l**2 / (2.0 * consts.m)
    u0 = consts.e * v0 / recoil
    tau = recoil * t / consts.hbar
    return DimensionlessSetup(u0=u0, tau=tau, alpha=0.5 * u0 * tau,
                              recoil_energy_J=recoil, v0_V=v0)


@dataclass(frozen=True)
class MomentSet:
    """Scaled multipole moments q~_m = Q_m k_L^m / e for m = 1..M.

    The monopole is the unit charge (q~_0 = 1) and is implicit.  Entry 0 of
    q_tilde is the scaled dipole moment, entry 1 the scaled quadrupole.
    """

    q_tilde: tuple[float, ...] = ()

    def __post_init__(self):
        vals = tuple(_require_finite(f"q_tilde[{i}]", v) for i, v in enumerate(self.q_tilde))
        object.__setattr__(self, "q_tilde", vals)

    @classmethod
    def from_dipole_quadrupole(cls, d_tilde: float = 0.0, q_tilde: float = 0.0,
                               higher: tuple[float, ...] = ()) -> "MomentSet":
        return cls((float(d_tilde), float(q_tilde)) + tuple(float(v) for v in higher))

    @property
    def max_order(self) -> int:
        return len(self.q_tilde)

    def moment(self, m: int) -> float:
        """q~_m with the implicit monopole q~_0 = 1; zero beyond max_order."""
        if m < 0:
            raise ValueError(f"moment order must be >= 0, got {m}")
        if m == 0:
            return 1.0
        if m <= self.max_order:
            return self.q_tilde[m - 1]
        return 0.0

    @property
    def dipole(self) -> float:
        return self.moment(1)

    @property
    def quadrupole(self) -> float:
        return self.moment(2)


def moments_from_si(dipole_Cm: float, quadrupole_Cm2: float, k_l: float,
                    e: float = E_CHARGE) -> MomentSet:
    """Scale SI dipole [C m] and quadrupole [C m^2] moments by k_L and e."""
    _require_finite("dipole_Cm", dipole_Cm)
    _require_finite("quadrupole_Cm2", quadrupole_Cm2)
    _require_finite("k_l", k_l, positive=True)
    _require_finite("e", e, positive=True)
    return MomentSet((dipole_Cm * k_l / e, quadrupole_Cm2 * k_l**2 / e))


@dataclass(frozen=True)
class PotentialSpec:
    """One-period potential offset + a_c cos(2x) + a_s sin(2x), in units of
    half the well depth (e V0 / 2)."""

    offset: float
    a_c: float
    a_s: float


def build_potential(moments: MomentSet) -> PotentialSpec:
    """Collapse the multipole series onto the single spatial harmonic.

    Every derivative of cos^2(k_L x) is again a cos/sin of 2 k_L x, so the
    m-th moment contributes (+-) q~_m 2^m / m! to one of the two quadrature
    coefficients: even m to a_c, odd m to a_s.
    """
    a_c = 0.0
    a_s = 0.0
    for m in range(0, moments.max_order + 1):
        w = moments.moment(m) * 2.0**m / math.factorial(m)
        if m % 2 == 0:
            a_c += (-1.0) ** (m // 2) * w
        else:
            a_s += (-1.0) ** ((m + 1) // 2) * w
    return PotentialSpec(offset=1.0, a_c=a_c, a_s=a_s)


def evaluate_potential(spec: PotentialSpec, x):
    """Potential profile at scaled position x (scalar or array), period pi."""
    return spec.offset + spec.a_c * np.cos(2.0 * x) + spec.a_s * np.sin(2.0 * x)


@dataclass(frozen=True)
class RegimeReport:
    """Validity diagnostics; advisory only, nothing here raises."""

    raman_nath_ratio: float
    raman_nath_ok: bool
    moment_ratios: tuple[float, ...]
    ordering_ok: bool
    recoil_energy_J: float | None
    explorable_length_m: float | None
    notes: str

    def as_dict(self) -> dict:
        return {
            "raman_nath_ratio": self.raman_nath_ratio,
            "raman_nath_ok": self.raman_nath_ok,
            "moment_ratios": list(self.moment_ratios),
            "ordering_ok": self.ordering_ok,
            "recoil_energy_J": self.recoil_energy_J,
            "explorable_length_m": self.explorable_length_m,
            "notes": self.notes,
        }


def check_regime(setup: DimensionlessSetup, moments: MomentSet,
                 consts: ElectronConstants = ElectronConstants()) -> RegimeReport:
    """Report regime validity for a configuration.

    The thin-grating treatment needs the well depth to dominate the recoil
    energy (u0 >= 100; 10 <= u0 < 100 is flagged as marginal only in the
    notes).  The multipole hierarchy is healthy when the scaled moments fall
    off strictly with order and all sit below one; trailing zero moments are
    ignored so a point-like charge passes.  The explorable length scale is
    the standing-wave wavelength, recovered from the recoil energy when the
    setup carries its SI anchor.
    """
    notes = []
    u0 = setup.u0
    rn_ok = bool(u0 >= 100.0)
    if math.isinf(u0):
        notes.append("ideal phase-grating limit (u0 not finite)")
    elif 10.0 <= u0 < 100.0:
        notes.append(f"marginal thin-grating ratio u0 = {u0:.3g} (want >= 100)")
    elif u0 < 10.0:
        notes.append(f"thin-grating ratio u0 = {u0:.3g} well below validity")

    qs = [abs(q) for q in moments.q_tilde]
    while qs and qs[-1] == 0.0:
        qs.pop()
    ordering_ok = all(qs[i] > qs[i + 1] for i in range(len(qs) - 1)) and all(q < 1.0 for q in qs)
    if not ordering_ok:
        notes.append("moment hierarchy violated: expansion of the potential is not controlled")

    length = None
    if setup.recoil_energy_J is not None and setup.recoil_energy_J > 0.0:
        k_l = math.sqrt(2.0 * consts.m * setup.recoil_energy_J) / consts.hbar
        length = 2.0 * math.pi / k_l
    else:
        notes.append("no SI anchor: explorable length unknown")

    return RegimeReport(
        raman_nath_ratio=u0,
        raman_nath_ok=rn_ok,
        moment_ratios=(1.0,) + tuple(moments.q_tilde),
        ordering_ok=ordering_ok,
        recoil_energy_J=setup.recoil_energy_J,
        explorable_length_m=length,
        notes="; ".join(notes),
    )
