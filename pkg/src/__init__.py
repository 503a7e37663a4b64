"""
Neutral-delay stability certifier - Source Code Package
"""

__version__ = "1.0.0"
