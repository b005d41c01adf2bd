import pytest

from phototherm import (
    Environment,
    HeatSource,
    ThermalLayer,
    WallAssembly,
)

# wall and source constants used throughout the suite (bundled preset values)
SILICONE = dict(specific_heat=1300.0, density=1050.0, thickness=1.0e-3,
                area=1.0e-4, emissivity=0.95, absorptance=0.17,
                conductivity=0.2, conv_coeff=6.0)
LIG = dict(specific_heat=700.0, density=400.0, thickness=1.0e-4,
           area=1.0e-4, emissivity=0.95, absorptance=0.83,
           conductivity=1.0, conv_coeff=18.0)
POWER_W = 0.075
AMBIENT_K = 298.0

CAP_SILICONE = 1300.0 * 1050.0 * 1.0e-4 * 1.0e-3  # 0.1365 J/K
CAP_LIG = 700.0 * 400.0 * 1.0e-4 * 1.0e-4  # 2.8e-3 J/K
COUPLING_W_PER_K = 0.2 * 1.0e-4 / 1.0e-3  # 0.02 W/K
TAU_SINGLE_S = CAP_SILICONE / (2 * 6.0 * 1.0e-4)  # 113.75 s


@pytest.fixture
def silicone_layer():
    return ThermalLayer(**SILICONE)


@pytest.fixture
def lig_layer():
    return ThermalLayer(**LIG)


@pytest.fixture
def single_wall(silicone_layer):
    return WallAssembly.single(silicone_layer)


@pytest.fixture
def bilayer_wall(silicone_layer, lig_layer):
    return WallAssembly.bilayer(silicone_layer, lig_layer)


@pytest.fixture
def flux_source():
    return HeatSource.constant_flux(POWER_W)


@pytest.fixture
def environment():
    return Environment(AMBIENT_K)
