"""
Core numerics - expressions, matrix functions, system model, certificates and integration
"""
