"""Numerical laboratory for the periodic NLS-KdV system.

Submodules:

* :mod:`nlskdv.spectral_core` - grids, transforms, sparse space-time spectra
* :mod:`nlskdv.bourgain_norms` - weighted space-time norms and Strichartz ratios
* :mod:`nlskdv.estimate_lab` - counterexamples, scaling fits, lemma checks
* :mod:`nlskdv.dynamics` - ETDRK4 solver with conservation monitors
* :mod:`nlskdv.picard` - Duhamel fixed-point solver
* :mod:`nlskdv.cli` - configuration-driven experiment harness
"""

__version__ = "0.1.0"
