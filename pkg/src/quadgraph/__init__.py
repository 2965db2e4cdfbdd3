"""Quadratic difference equations on graphs: fields, frameworks, spectra and energies."""

__version__ = "0.1.0"
