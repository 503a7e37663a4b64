"""
Data Models - Pydantic models for configs, certificates and reports
"""
