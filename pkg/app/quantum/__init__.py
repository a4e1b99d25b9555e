"""
Numerical core: linear algebra, states, filters, tomography, metrics and bounds.
"""
