"""Spin-photon interface analysis toolkit for donor qubits in silicon.

Library modules, one per analysis stage:

- units: physical constants and unit conversions
- spinmodel: hyperfine spin Hamiltonian, levels, clock transition
- fitcore: shared weighted nonlinear least-squares engine
- relaxation: spin T1 decay extraction and T^9 rate-law fits
- spectra: FTIR ingestion, absorption coefficients, baselines, peaks
- absorption: dipole moment and concentration conversion factors
- luminescence: ZPL fraction, reabsorption correction, efficiency
- modulation: modulated-excitation lifetime and homogeneous linewidth
- raman: Raman-shift vs photoluminescence feature classification
- cavity: emitter-cavity cooperativity estimates
- synth: seeded synthetic datasets with ground-truth sidecars
- cli: batch frontend emitting reports, plot data, and figures
"""

__version__ = "0.1.0"

from .units import CONSTANTS, PhysicalConstants, Quantity, convert  # noqa: F401
