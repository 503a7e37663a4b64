"""
Utilities - serialization helpers
"""
