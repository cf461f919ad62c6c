"""
Utilitaires: validation des enregistrements et gestion des fichiers.
"""

from .file_handlers import ensure_directory_exists, get_files_to_process, read_csv, write_csv, write_jsonl, write_yaml
from .validators import ValidationResult, validate_and_correct_service

__all__ = [
    'ensure_directory_exists',
    'get_files_to_process',
    'read_csv',
    'write_csv',
    'write_jsonl',
    'write_yaml',
    'ValidationResult',
    'validate_and_correct_service',
]
