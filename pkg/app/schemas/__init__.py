"""
Pydantic schemas: quantum value types and experiment envelopes.
"""
