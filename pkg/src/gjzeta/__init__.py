"""Exact local zeta integrals for GL_n principal series over Q_p."""

__version__ = "0.1.0"
