"""evimap: trial-abstract evidence extraction, concept normalization, and
queryable evidence maps."""

__version__ = "0.1.0"
