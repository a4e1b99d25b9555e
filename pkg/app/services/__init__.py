"""
Experiment pipelines and result writing.
"""
