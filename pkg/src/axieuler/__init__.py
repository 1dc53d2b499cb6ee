"""Axisymmetric swirl-free Euler: Biot-Savart kernels, Lorentz quasinorms,
vorticity-stretching diagnostics and a vortex particle solver."""

__version__ = "0.1.0"
