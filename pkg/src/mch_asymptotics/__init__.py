"""Large-time asymptotics of the modified Camassa-Holm equation on a nonzero background.

Modules, bottom-up: ``phase_geometry`` (stationary points, sectors),
``reflection_model`` (model reflection coefficients), ``cauchy_engine``
(delta and chi integrals), ``asymptotic_coeffs`` (closed-form leading terms),
``rh_algebra`` (the same terms through the Riemann-Hilbert chain),
``pde_reference`` (pseudospectral solver and measurements) and ``cli``.
"""

__version__ = "0.1.0"
