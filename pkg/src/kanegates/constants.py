"""Physical constants and the named operating points used by the compiler.

Units: energies in meV, times in microseconds, fields in tesla, angular
frequencies in rad/us.
"""

HBAR = 6.582119569e-7  # meV * us
MU_B = 5.788382e-2  # meV / T
# 31P nuclear Zeeman factor, fixed so that g_n mu_n * 2 T = 7.1e-5 meV
GN_MU_N = 3.55e-5  # meV / T

# Single-qubit operating points
B_DEFAULT = 2.0  # T
A_DEFAULT = 0.1211e-3  # unperturbed hyperfine, meV
A_Z_DEFAULT = 0.0606e-3  # hyperfine during a Z rotation, meV
A_X_DEFAULT = 0.0606e-3  # hyperfine during an X/Y rotation, meV
B_AC_DEFAULT = 0.0025  # T

# Two-qubit interaction operating point
A_U_DEFAULT = 0.1197e-3  # meV
J_U_DEFAULT = 0.0423  # meV

A_MAX = 0.1211e-3  # meV
J_MAX = 0.043  # meV
