"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: validation/config errors exit 1,
I/O errors (plain OSError) exit 2, numerical divergence exits 3.
"""


class ValidationError(ValueError):
    """Bad input, config, or contract violation."""


class ShapeError(ValidationError):
    """Tensor shapes incompatible with the requested operation."""


class DivergenceError(RuntimeError):
    """An optimization produced a non-finite objective."""
