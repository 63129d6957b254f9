from .report import BoundReport

__all__ = ["BoundReport"]
