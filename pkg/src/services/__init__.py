"""
Services Layer - config loading, fixtures, reports and sweeps
"""
