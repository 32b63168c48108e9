"""chainlen: certified chains of diagonal-form presentations and the
symbol-length decompositions they induce in the 2-primary Brauer group."""

from .fields import FieldConfig, Fp, Qp

__version__ = "0.1.0"

__all__ = ["FieldConfig", "Fp", "Qp", "__version__"]
