"""
Photon-axion mixing in an inhomogeneous magnetic field.
Birefringent indices, split-beam ray paths, cavity bifurcation statistics
and Gaussian-beam intensity deficit, from config to result files.
"""

__version__ = "0.1.0"
