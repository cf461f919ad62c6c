"""
Package CLI pour l'interface en ligne de commande.
"""

from .cli import CLI, main, setup_logging

__all__ = ['CLI', 'main', 'setup_logging']
