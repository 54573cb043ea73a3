"""
Defaults, presets and the run configuration.
"""
