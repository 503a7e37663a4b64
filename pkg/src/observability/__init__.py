"""
Observability - logging setup and timed operations
"""
