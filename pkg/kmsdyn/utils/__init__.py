"""
Utility functions for kmsdyn.
This package provides utilities for logging, colors and report files.
"""

# Re-export logging functions
from .logging import setup_logger, get_logger

# Re-export color utilities
from .colors import get_color, palette, shade

# Re-export file operation utilities
from .file_operations import csv_text, dumps_json, write_bytes

__all__ = [
    # Logging
    "setup_logger",
    "get_logger",

    # Colors
    "get_color",
    "palette",
    "shade",

    # File operations
    "csv_text",
    "dumps_json",
    "write_bytes",
]
