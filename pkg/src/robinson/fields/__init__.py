"""Field-level calculus over charts."""

from .core import (Box, ChartMap, Field, FormField, MetricField, VectorField, constant_form,
                   constant_vector, covector_basis, d, divergence, exterior_derivative,
                   form_basis, hodge_field, inner, interior, jet_d, jet_hodge, jet_interior,
                   jet_wedge, lie_form,
                   lie_form_field, lie_metric, lie_metric_field, lower, pullback, pullback_field,
                   vector_basis, wedge)
from .jetarray import JetArray, compose, einsum, minors

__all__ = [
    "Box", "ChartMap", "Field", "FormField", "JetArray", "MetricField", "VectorField", "compose",
    "constant_form", "constant_vector", "covector_basis", "d", "divergence", "einsum",
    "exterior_derivative", "form_basis", "hodge_field", "inner", "interior", "jet_d", "jet_hodge",
    "jet_interior", "jet_wedge",
    "lie_form", "lie_form_field", "lie_metric", "lie_metric_field", "lower", "minors", "pullback",
    "pullback_field", "vector_basis", "wedge",
]
