"""Phonon-swap cooling of trapped polar molecules by Rydberg atoms.

Submodules:

- ``angular``: Wigner 3j symbols and the dipole-dipole angular matrix
- ``interactions``: vdW channels, angular matrices, mixing fractions
- ``expansion``: second-order expansion of potentials into phonon rates
- ``gaussian``: exact Gaussian dynamics of the atom/molecule chain
- ``swap``: dissipative swap model and r_0.95 range solver
- ``hyperfine``: bialkali hyperfine/Zeeman structure and dressing spread
- ``fidelity``: post-swap qubit fidelity
"""

__version__ = "0.1.0"
