"""Independent reference solution of the constant-flux bilayer system.

The bilayer balances under a constant absorbed flux form a linear 2x2 ODE
in the excess temperatures. This oracle builds the system matrix straight
from the raw layer fields (no package helpers) and propagates the exact
solution with scipy's matrix exponential, one exact step per grid point.
"""

import numpy as np
from scipy.linalg import expm


def bilayer_system(assembly, source, scale=1.0):
    """(A, f): d/dt [vs, vl] = A [vs, vl] + f with v = theta - theta_e."""
    sil, lig = assembly.silicone, assembly.lig
    cap_s = sil.specific_heat * sil.density * sil.area * sil.thickness
    cap_l = lig.specific_heat * lig.density * lig.area * lig.thickness
    g_s = sil.conv_faces * sil.conv_coeff * sil.area
    g_l = lig.conv_faces * lig.conv_coeff * lig.area
    k = sil.conductivity * sil.area / sil.thickness
    q_s = sil.absorptance * source.power * scale
    q_l = lig.absorptance * source.power * scale
    a = np.array([[-(g_s + k) / cap_s, k / cap_s],
                  [k / cap_l, -(g_l + k) / cap_l]])
    f = np.array([q_s / cap_s, q_l / cap_l])
    return a, f


def exact_bilayer_grid(assembly, source, env, scale, dt, n_steps):
    """Exact (theta_s, theta_L) at times i*dt for i = 0..n_steps, light on
    the whole time, started from ambient."""
    a, f = bilayer_system(assembly, source, scale)
    y_ss = -np.linalg.solve(a, f)
    propagator = expm(a * dt)
    states = np.empty((n_steps + 1, 2))
    y = np.zeros(2)
    states[0] = y
    for i in range(n_steps):
        y = y_ss + propagator @ (y - y_ss)
        states[i + 1] = y
    return env.ambient_temperature + states


def steady_bilayer(assembly, source, env, scale=1.0):
    """Steady (theta_s, theta_L) from a dense linear solve."""
    a, f = bilayer_system(assembly, source, scale)
    return env.ambient_temperature + (-np.linalg.solve(a, f))
