"""Euler-angle parametrization, invariant geometry and Haar sampling for G2."""

__version__ = "0.1.0"

from g2haar.algebra import (
    AlgebraElement,
    Backend,
    StructureConstants,
    bracket,
    build_backend,
    build_structure_constants,
    project,
)
from g2haar.measure import (
    HaarSample,
    MCEstimate,
    analytic_volume,
    g2_density,
    mc_integrate,
    sample_haar,
    su3_density,
)
from g2haar.parametrization import (
    EulerCoordinatesG2,
    exp_generator,
    g2_element,
    parameter_ranges,
    sigma,
    su3_element,
)

__all__ = [
    "AlgebraElement", "Backend", "StructureConstants", "bracket", "build_backend",
    "build_structure_constants", "project", "HaarSample", "MCEstimate", "analytic_volume",
    "g2_density", "mc_integrate", "sample_haar", "su3_density", "EulerCoordinatesG2",
    "exp_generator", "g2_element", "parameter_ranges", "sigma", "su3_element",
]
