"""Physical setup shared by every other module.

Internal unit system is MeV / fm / s; lengths are converted to metres only
at output boundaries.  An explicit ``hbar_scale`` factor on the scenario
rescales every occurrence of hbar, which is how classical-limit sweeps are
expressed as plain parameter scans.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .errors import SingularEnergyError

# CODATA 2018 recommended values, in MeV / fm / s.  hbar_c is derived as
# the exact product so that identities like p = hbar k = sqrt(...)/c hold
# to machine precision; the product equals the published 197.3269804 at
# its printed 10 digits.
HBAR_MEV_S = 6.582119569e-22
C_FM_PER_S = 2.99792458e23
HBAR_C_MEV_FM = HBAR_MEV_S * C_FM_PER_S

ELECTRON_REST_MEV = 0.510998950

METERS_PER_FM = 1.0e-15

# A point counts as a turning point when |(E-V)^2 - (m0 c^2)^2| <= this * E^2.
TURNING_TOL_FACTOR = 1.0e-12


def fm_to_m(x_fm: float) -> float:
    """Convert a length from femtometres to metres."""
    return x_fm * METERS_PER_FM


def m_to_fm(x_m: float) -> float:
    """Convert a length from metres to femtometres."""
    return x_m / METERS_PER_FM


class RegionClass(enum.Enum):
    ALLOWED = "allowed"
    FORBIDDEN = "forbidden"
    TURNING_POINT = "turning-point"


@dataclass(frozen=True)
class Constants:
    """Fundamental constants; defaults are the CODATA values above."""

    hbar: float = HBAR_MEV_S      # MeV s
    c: float = C_FM_PER_S         # fm / s
    hbar_c: float = HBAR_C_MEV_FM  # MeV fm

    def __post_init__(self):
        if not (self.hbar_c > 0 and self.hbar > 0 and self.c > 0):
            raise ValueError("constants must be strictly positive")
        if abs(self.hbar_c - self.hbar * self.c) > 1e-9 * self.hbar_c:
            raise ValueError("inconsistent constants: hbar_c != hbar * c")


@dataclass(frozen=True)
class Species:
    """Particle species, identified by its rest energy m0 c^2 in MeV."""

    rest_energy: float

    def __post_init__(self):
        if self.rest_energy < 0:
            raise ValueError("rest energy must be >= 0")

    @property
    def is_photon(self) -> bool:
        return self.rest_energy == 0.0

    @classmethod
    def electron(cls) -> "Species":
        return cls(rest_energy=ELECTRON_REST_MEV)

    @classmethod
    def photon(cls) -> "Species":
        return cls(rest_energy=0.0)


class PotentialKind(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"


@dataclass(frozen=True)
class Potential:
    """Constant (V = U0) or linear (V = g x) external potential."""

    kind: PotentialKind
    u0: float = 0.0  # MeV, constant case
    g: float = 0.0   # MeV / fm, linear case

    @classmethod
    def constant(cls, u0: float = 0.0) -> "Potential":
        return cls(kind=PotentialKind.CONSTANT, u0=u0)

    @classmethod
    def linear(cls, g: float) -> "Potential":
        if g == 0.0:
            raise ValueError("linear potential needs a nonzero slope")
        return cls(kind=PotentialKind.LINEAR, g=g)

    @property
    def is_constant(self) -> bool:
        return self.kind is PotentialKind.CONSTANT

    def value(self, x):
        if self.kind is PotentialKind.CONSTANT:
            return self.u0 if not hasattr(x, "shape") else self.u0 + 0.0 * x
        return self.g * x

    def derivative(self, x):
        if self.kind is PotentialKind.CONSTANT:
            return 0.0 if not hasattr(x, "shape") else 0.0 * x
        return self.g if not hasattr(x, "shape") else self.g + 0.0 * x

    def second_derivative(self, x):
        return 0.0 if not hasattr(x, "shape") else 0.0 * x


@dataclass(frozen=True)
class Scenario:
    """Species + potential + total energy (rest energy included)."""

    species: Species
    potential: Potential
    energy: float                 # MeV, total
    hbar_scale: float = 1.0       # dimensionless epsilon in (0, 1]
    constants: Constants = field(default_factory=Constants)

    def __post_init__(self):
        if self.energy <= 0:
            raise ValueError("total energy must be positive")
        if not (0.0 < self.hbar_scale <= 1.0):
            raise ValueError("hbar_scale must lie in (0, 1]")

    # Effective constants: every hbar in the formulation carries the scale
    # factor; c does not.
    @property
    def hbar(self) -> float:
        return self.constants.hbar * self.hbar_scale

    @property
    def hbar_c(self) -> float:
        return self.constants.hbar_c * self.hbar_scale

    @property
    def c(self) -> float:
        return self.constants.c

    @property
    def rest_energy(self) -> float:
        return self.species.rest_energy

    def with_hbar_scale(self, eps: float) -> "Scenario":
        return replace(self, hbar_scale=eps)


def classify_region(s: Scenario, x: float) -> RegionClass:
    """Classify x as allowed / forbidden / turning point.

    Allowed means (E - V)^2 > (m0 c^2)^2; the turning-point band is
    relative to E^2 so the test behaves uniformly across energy scales.
    """
    u = s.energy - s.potential.value(x)
    d = u * u - s.rest_energy**2
    if abs(d) <= TURNING_TOL_FACTOR * s.energy**2:
        return RegionClass.TURNING_POINT
    return RegionClass.ALLOWED if d > 0 else RegionClass.FORBIDDEN


def kinetic_factor(s: Scenario, x) -> float:
    """(E - V) - m0^2 c^4 / (E - V), the bracketed velocity factor.

    Vanishes at turning points; for a photon it reduces to E - V.
    """
    u = s.energy - s.potential.value(x)
    if hasattr(u, "shape"):
        import numpy as np

        if np.any(u == 0.0):
            raise SingularEnergyError("E - V(x) = 0 inside evaluation range")
        return u - s.rest_energy**2 / u
    if u == 0.0:
        raise SingularEnergyError(f"E - V(x) = 0 at x = {x}")
    return u - s.rest_energy**2 / u


def classical_momentum(s: Scenario, x: float = 0.0) -> float:
    """sqrt((E-V)^2 - m0^2 c^4) / c in MeV s / fm (allowed regions)."""
    u = s.energy - s.potential.value(x)
    d = u * u - s.rest_energy**2
    if d <= 0:
        raise SingularEnergyError(f"no real momentum at x = {x}")
    return math.sqrt(d) / s.c


# ---------------------------------------------------------------------------
# Flat key = value configuration files.

CONFIG_KEYS = (
    "species",
    "energy_mev",
    "potential",
    "u0_mev",
    "g_mev_per_fm",
    "hbar_scale",
)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blanks ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())


def scenario_from_config(cfg: Mapping[str, str]) -> Scenario:
    """Build a Scenario from a parsed configuration mapping."""
    unknown = set(cfg) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    species_name = cfg.get("species", "electron").lower()
    if species_name == "electron":
        species = Species.electron()
    elif species_name == "photon":
        species = Species.photon()
    else:
        raise ValueError(f"unknown species {species_name!r} (electron or photon)")

    pot_name = cfg.get("potential", "constant").lower()
    if pot_name == "constant":
        potential = Potential.constant(u0=float(cfg.get("u0_mev", "0")))
    elif pot_name == "linear":
        potential = Potential.linear(g=float(cfg.get("g_mev_per_fm", "0.25")))
    else:
        raise ValueError(f"unknown potential {pot_name!r} (constant or linear)")

    return Scenario(
        species=species,
        potential=potential,
        energy=float(cfg.get("energy_mev", "2")),
        hbar_scale=float(cfg.get("hbar_scale", "1")),
    )
