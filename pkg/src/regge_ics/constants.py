"""Physical constants for the meV / Angstrom / Dalton unit system."""

# hbar*c in eV*Angstrom and the Dalton rest energy in eV (CODATA 2018).
HBAR_C_EV_A = 1973.269804
DALTON_C2_EV = 931.49410242e6

# hbar^2/(2*Dalton) in meV*Angstrom^2: with E in meV and mu in Daltons,
# k^2 = mu * E / HBAR2_OVER_2U gives k in 1/Angstrom.
HBAR2_OVER_2U = HBAR_C_EV_A**2 / (2.0 * DALTON_C2_EV) * 1000.0
