"""
Command-line interface: certify, bound, simulate, verify and sweep
"""
