"""
Configuration - Sampling, certification, simulation and logging settings
"""
