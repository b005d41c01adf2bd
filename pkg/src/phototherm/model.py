"""Lumped-capacitance thermal model of a light-heated actuator wall.

The wall is either a bare silicone membrane or a silicone membrane backed by
a thin laser-induced-graphene (LIG) absorber film. Each layer is a single
temperature node (no internal gradients). Energy enters from the light
source, either as blackbody radiative exchange or as a constant absorbed
flux split between the layers by their absorptances, and leaves by
convection to the environment. In the bilayer the LIG film feeds the
silicone through a conduction coupling set by the silicone conductivity
and thickness.

All quantities are SI: kelvin, seconds, watts, metres. Celsius appears only
at I/O boundaries.
"""

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    KindMismatchError,
    ModeMismatchError,
    NumericalError,
    ValidationError,
)

STEFAN_BOLTZMANN = 5.67037442e-8  # W m^-2 K^-4
KELVIN_OFFSET = 273.15

# residual tolerance (W) and iteration cap for radiative steady-state solves
_STEADY_RESIDUAL_TOL = 1e-9
_STEADY_MAX_ITER = 500


class SourceMode(Enum):
    RADIATIVE_BODY = "radiative_body"
    CONSTANT_FLUX = "constant_flux"


class WallKind(Enum):
    SINGLE_LAYER = "single_layer"
    BILAYER = "bilayer"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class ThermalLayer:
    """Material and geometric properties of one wall layer."""

    specific_heat: float  # J/(kg K)
    density: float  # kg/m^3
    thickness: float  # m
    area: float  # m^2, heat-transfer area
    emissivity: float  # dimensionless, in [0, 1]
    absorptance: float  # dimensionless, in [0, 1]; constant-flux power fraction
    conductivity: float  # W/(m K); only the silicone value enters the coupling
    conv_coeff: float  # W/(m^2 K), convection to the environment
    conv_faces: int | None = None  # faces exchanging with the environment (0..2)

    def __post_init__(self):
        for name in ("specific_heat", "density", "thickness", "area",
                     "conductivity", "conv_coeff"):
            value = getattr(self, name)
            _require(math.isfinite(value) and value > 0.0,
                     f"{name} must be strictly positive, got {value!r}")
        for name in ("emissivity", "absorptance"):
            value = getattr(self, name)
            _require(math.isfinite(value) and 0.0 <= value <= 1.0,
                     f"{name} must lie in [0, 1], got {value!r}")
        if self.conv_faces is not None:
            _require(self.conv_faces in (0, 1, 2),
                     f"conv_faces must be 0, 1 or 2, got {self.conv_faces!r}")


@dataclass(frozen=True)
class HeatSource:
    """Light source, either a radiating blackbody or a constant absorbed flux.

    mode RADIATIVE_BODY uses source_temperature and source_emissivity;
    mode CONSTANT_FLUX uses power, split between layers by absorptance.
    """

    mode: SourceMode
    source_temperature: float | None = None  # K
    source_emissivity: float | None = None  # dimensionless, in (0, 1]
    power: float | None = None  # W

    def __post_init__(self):
        if self.mode is SourceMode.RADIATIVE_BODY:
            _require(self.source_temperature is not None
                     and self.source_temperature > 0.0,
                     "radiative source needs source_temperature > 0")
            _require(self.source_emissivity is not None
                     and 0.0 < self.source_emissivity <= 1.0,
                     "radiative source needs source_emissivity in (0, 1]")
            _require(self.power is None,
                     "power is a constant-flux field; not valid in radiative mode")
        elif self.mode is SourceMode.CONSTANT_FLUX:
            _require(self.power is not None and self.power >= 0.0,
                     "constant-flux source needs power >= 0")
            _require(self.source_temperature is None and self.source_emissivity is None,
                     "source_temperature/source_emissivity are radiative fields")
        else:
            raise ValidationError(f"unknown source mode {self.mode!r}")

    @classmethod
    def constant_flux(cls, power: float) -> "HeatSource":
        return cls(mode=SourceMode.CONSTANT_FLUX, power=power)

    @classmethod
    def radiative(cls, temperature: float, emissivity: float) -> "HeatSource":
        return cls(mode=SourceMode.RADIATIVE_BODY,
                   source_temperature=temperature, source_emissivity=emissivity)


@dataclass(frozen=True)
class Environment:
    """Ambient conditions."""

    ambient_temperature: float  # K

    def __post_init__(self):
        _require(math.isfinite(self.ambient_temperature)
                 and self.ambient_temperature > 0.0,
                 "ambient_temperature must be strictly positive")


@dataclass(frozen=True)
class WallAssembly:
    """Single-layer or bilayer wall configuration.

    conv_faces left as None on a layer is resolved here: 2 for the lone
    silicone wall (both faces exposed), 1 per layer in the bilayer (each
    layer has one exposed face). Explicit values are kept as given.
    """

    kind: WallKind
    silicone: ThermalLayer
    lig: ThermalLayer | None = None

    def __post_init__(self):
        if self.kind is WallKind.SINGLE_LAYER:
            _require(self.lig is None, "single-layer assembly must not carry a lig layer")
            if self.silicone.conv_faces is None:
                object.__setattr__(self, "silicone", replace(self.silicone, conv_faces=2))
        elif self.kind is WallKind.BILAYER:
            _require(self.lig is not None, "bilayer assembly requires a lig layer")
            if self.silicone.conv_faces is None:
                object.__setattr__(self, "silicone", replace(self.silicone, conv_faces=1))
            if self.lig.conv_faces is None:
                object.__setattr__(self, "lig", replace(self.lig, conv_faces=1))
            _require(coupling_conductance(self.silicone) > 0.0,
                     "interlayer coupling conductance must be strictly positive")
            alpha_sum = self.silicone.absorptance + self.lig.absorptance
            if alpha_sum > 1.0 + 1e-12:
                warnings.warn(
                    f"layer absorptances sum to {alpha_sum:.4f} > 1; "
                    "more power absorbed than supplied is unphysical",
                    UserWarning, stacklevel=2)
        else:
            raise ValidationError(f"unknown wall kind {self.kind!r}")

    @classmethod
    def single(cls, silicone: ThermalLayer) -> "WallAssembly":
        return cls(kind=WallKind.SINGLE_LAYER, silicone=silicone)

    @classmethod
    def bilayer(cls, silicone: ThermalLayer, lig: ThermalLayer) -> "WallAssembly":
        return cls(kind=WallKind.BILAYER, silicone=silicone, lig=lig)


@dataclass(frozen=True)
class ThermalState:
    """Temperatures of the wall at one instant."""

    time: float  # s
    silicone_temperature: float  # K
    lig_temperature: float | None = None  # K, bilayer only

    def __post_init__(self):
        _require(math.isfinite(self.time), "time must be finite")
        _require(math.isfinite(self.silicone_temperature)
                 and self.silicone_temperature > 0.0,
                 "silicone_temperature must be strictly positive")
        if self.lig_temperature is not None:
            _require(math.isfinite(self.lig_temperature) and self.lig_temperature > 0.0,
                     "lig_temperature must be strictly positive")


def heat_capacity(layer: ThermalLayer) -> float:
    """Lumped heat capacity of a layer in J/K: specific heat times mass."""
    return layer.specific_heat * layer.density * layer.area * layer.thickness


def coupling_conductance(silicone: ThermalLayer) -> float:
    """Interlayer conduction conductance in W/K, from the silicone layer."""
    return silicone.conductivity * silicone.area / silicone.thickness


def convective_conductance(layer: ThermalLayer) -> float:
    """Linear convective loss conductance in W/K for one layer."""
    faces = 2 if layer.conv_faces is None else layer.conv_faces
    return faces * layer.conv_coeff * layer.area


def radiative_exchange(theta_hot: float, eps_hot: float,
                       theta_cold: float, eps_cold: float, area: float) -> float:
    """Net radiative power exchanged between two grey surfaces, in W.

    Positive when theta_hot exceeds theta_cold. The grey-body resistance
    uses both emissivities: sigma (Th^4 - Tc^4) A / (1/eps_h + 1/eps_c - 1).
    """
    _require(theta_hot > 0.0 and theta_cold > 0.0, "temperatures must be > 0 K")
    _require(0.0 < eps_hot <= 1.0, f"emissivity must lie in (0, 1], got {eps_hot!r}")
    _require(0.0 < eps_cold <= 1.0, f"emissivity must lie in (0, 1], got {eps_cold!r}")
    _require(area > 0.0, "area must be strictly positive")
    return (STEFAN_BOLTZMANN * (theta_hot ** 4 - theta_cold ** 4) * area
            / (1.0 / eps_hot + 1.0 / eps_cold - 1.0))


def absorbed_power(source: HeatSource, layer: ThermalLayer, scale: float = 1.0) -> float:
    """Power absorbed by a layer from a constant-flux source, in W."""
    if source.mode is not SourceMode.CONSTANT_FLUX:
        raise ModeMismatchError("absorbed_power requires a constant-flux source")
    _require(scale >= 0.0, "scale must be non-negative")
    return layer.absorptance * source.power * scale


def conduction_flow(theta_lig: float, theta_silicone: float,
                    silicone: ThermalLayer) -> float:
    """Conductive power flowing from the LIG film into the silicone, in W."""
    return coupling_conductance(silicone) * (theta_lig - theta_silicone)


def _source_input(source: HeatSource, layer: ThermalLayer, scale: float,
                  layer_temperature: float) -> float:
    """Drive term for one layer under the current source mode, in W."""
    if source.mode is SourceMode.CONSTANT_FLUX:
        return absorbed_power(source, layer, scale)
    return scale * radiative_exchange(source.source_temperature,
                                      source.source_emissivity,
                                      layer_temperature, layer.emissivity,
                                      layer.area)


def _single_rate(theta_s: float, theta_e: float, q_in: float,
                 g_conv: float, capacity: float) -> float:
    # shared by the public rhs and the integrator so both produce identical floats
    return (q_in - g_conv * (theta_s - theta_e)) / capacity


def _bilayer_rates(theta_s: float, theta_l: float, theta_e: float,
                   q_s: float, q_l: float, g_s: float, g_l: float,
                   k: float, cap_s: float, cap_l: float) -> tuple[float, float]:
    q_ls = k * (theta_l - theta_s)
    d_s = (q_s - g_s * (theta_s - theta_e) + q_ls) / cap_s
    d_l = (q_l - g_l * (theta_l - theta_e) - q_ls) / cap_l
    return d_s, d_l


def rhs_single(state: ThermalState, assembly: WallAssembly, source: HeatSource,
               env: Environment, scale: float = 1.0) -> float:
    """Temperature rate dT/dt of the lone silicone wall, in K/s."""
    if assembly.kind is not WallKind.SINGLE_LAYER:
        raise KindMismatchError("rhs_single requires a single-layer assembly")
    layer = assembly.silicone
    q_in = _source_input(source, layer, scale, state.silicone_temperature)
    return _single_rate(state.silicone_temperature, env.ambient_temperature,
                        q_in, convective_conductance(layer), heat_capacity(layer))


def rhs_bilayer(state: ThermalState, assembly: WallAssembly, source: HeatSource,
                env: Environment, scale: float = 1.0) -> tuple[float, float]:
    """Temperature rates (dTs/dt, dTl/dt) of the bilayer wall, in K/s.

    The conduction term appears with equal magnitude and opposite sign in
    the two balances, so the pair conserves energy exactly.
    """
    if assembly.kind is not WallKind.BILAYER:
        raise KindMismatchError("rhs_bilayer requires a bilayer assembly")
    if state.lig_temperature is None:
        raise KindMismatchError("bilayer state must carry a lig_temperature")
    sil, lig = assembly.silicone, assembly.lig
    q_s = _source_input(source, sil, scale, state.silicone_temperature)
    q_l = _source_input(source, lig, scale, state.lig_temperature)
    return _bilayer_rates(state.silicone_temperature, state.lig_temperature,
                          env.ambient_temperature, q_s, q_l,
                          convective_conductance(sil), convective_conductance(lig),
                          coupling_conductance(sil),
                          heat_capacity(sil), heat_capacity(lig))


def _bisect(residual, lo: float, hi: float, tol: float) -> float:
    """Root of a continuous residual bracketed by [lo, hi], to within tol W."""
    r_lo = residual(lo)
    if abs(r_lo) < tol:
        return lo
    r_hi = residual(hi)
    if abs(r_hi) < tol:
        return hi
    if r_lo * r_hi > 0.0:
        raise NumericalError("steady-state residual does not change sign over bracket")
    for _ in range(_STEADY_MAX_ITER):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if abs(r_mid) < tol:
            return mid
        if r_lo * r_mid <= 0.0:
            hi = mid
        else:
            lo, r_lo = mid, r_mid
    raise NumericalError(
        f"steady-state iteration did not reach |residual| < {tol:g} W")


def steady_state(assembly: WallAssembly, source: HeatSource, env: Environment,
                 scale: float = 1.0) -> ThermalState:
    """Temperatures at which all rates vanish.

    Constant-flux sources solve in closed form (the balances are linear);
    radiative sources are solved by bisection on the power residual, to
    |residual| < 1e-9 W. The returned state carries time 0.
    """
    _require(scale >= 0.0, "scale must be non-negative")
    theta_e = env.ambient_temperature

    if source.mode is SourceMode.CONSTANT_FLUX:
        if assembly.kind is WallKind.SINGLE_LAYER:
            g = convective_conductance(assembly.silicone)
            q = absorbed_power(source, assembly.silicone, scale)
            if q == 0.0:
                return ThermalState(0.0, theta_e)
            if g <= 0.0:
                raise NumericalError("no loss path: steady state undefined under drive")
            return ThermalState(0.0, theta_e + q / g)
        sil, lig = assembly.silicone, assembly.lig
        g_s, g_l = convective_conductance(sil), convective_conductance(lig)
        k = coupling_conductance(sil)
        q_s = absorbed_power(source, sil, scale)
        q_l = absorbed_power(source, lig, scale)
        if q_s == 0.0 and q_l == 0.0:
            return ThermalState(0.0, theta_e, theta_e)
        # zeroed balances in excess temperatures (v, u) = (Ts - Te, Tl - Te):
        #   (g_s + k) v - k u = q_s
        #   -k v + (g_l + k) u = q_l
        det = (g_s + k) * (g_l + k) - k * k
        if det <= 0.0:
            raise NumericalError("no loss path: steady state undefined under drive")
        v = (q_s * (g_l + k) + k * q_l) / det
        u = ((g_s + k) * q_l + k * q_s) / det
        return ThermalState(0.0, theta_e + v, theta_e + u)

    # radiative mode: bisection on the layer power residuals
    theta_h = source.source_temperature
    if scale == 0.0 or theta_h == theta_e:
        if assembly.kind is WallKind.SINGLE_LAYER:
            return ThermalState(0.0, theta_e)
        return ThermalState(0.0, theta_e, theta_e)

    if assembly.kind is WallKind.SINGLE_LAYER:
        layer = assembly.silicone
        g = convective_conductance(layer)
        # tight enough that the rate residual stays well below 1e-6 K/s
        tol = min(_STEADY_RESIDUAL_TOL, 1e-7 * heat_capacity(layer))

        def residual(theta):
            return (_source_input(source, layer, scale, theta)
                    - g * (theta - theta_e))

        lo, hi = min(theta_e, theta_h), max(theta_e, theta_h)
        return ThermalState(0.0, _bisect(residual, lo, hi, tol))

    sil, lig = assembly.silicone, assembly.lig
    g_s, g_l = convective_conductance(sil), convective_conductance(lig)
    k = coupling_conductance(sil)
    tol = min(_STEADY_RESIDUAL_TOL,
              1e-7 * min(heat_capacity(sil), heat_capacity(lig)))

    def silicone_for(theta_l: float) -> float:
        def residual(theta_s):
            return (_source_input(source, sil, scale, theta_s)
                    + k * (theta_l - theta_s) - g_s * (theta_s - theta_e))

        lo = min(theta_e, theta_h, theta_l)
        hi = max(theta_e, theta_h, theta_l)
        # inner error feeds the outer residual through k; solve two orders
        # tighter so the outer bisection sees a clean sign
        return _bisect(residual, lo, hi, 0.01 * tol)

    def residual_lig(theta_l: float) -> float:
        theta_s = silicone_for(theta_l)
        return (_source_input(source, lig, scale, theta_l)
                - g_l * (theta_l - theta_e) - k * (theta_l - theta_s))

    lo, hi = min(theta_e, theta_h), max(theta_e, theta_h)
    theta_l = _bisect(residual_lig, lo, hi, tol)
    return ThermalState(0.0, silicone_for(theta_l), theta_l)
