"""
Configuration: environment settings, logging, and run configuration types.
"""
