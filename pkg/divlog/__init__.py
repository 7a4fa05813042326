"""divlog: divergences on monads and relational judgments about effectful programs."""

__version__ = "0.1.0"
