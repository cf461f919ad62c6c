"""
Configuration du simulateur.
"""

from .settings import OUTPUT_DIR_ENV, deep_merge, get_setting, load_defaults, load_settings

__all__ = ['OUTPUT_DIR_ENV', 'deep_merge', 'get_setting', 'load_defaults', 'load_settings']
