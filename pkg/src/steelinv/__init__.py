"""
Steel Inverse - Teacher-Student inverse design of steel tempering recipes.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
