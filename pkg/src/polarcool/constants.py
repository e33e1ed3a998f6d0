"""Physical constants and material defaults.

SI units throughout. Frequencies elsewhere in the package are angular
(rad/s) unless a name says otherwise; the gyromagnetic ratio below is the
one exception, kept as a linear frequency per tesla because that is how it
enters the Rabi-frequency calibration.
"""

HBAR = 1.054571817e-34   # J s
KB = 1.380649e-23        # J / K

# YIG sphere defaults
SPIN_DENSITY = 4.22e27          # spins per m^3
GYROMAGNETIC_RATIO = 28e9       # Hz / T
