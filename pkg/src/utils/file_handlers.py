"""
Module de gestion des fichiers pour les rapports et traces du simulateur.
"""
import csv
import json
import logging
import os
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import yaml

from ..exceptions.composition_exceptions import FileError

logger = logging.getLogger(__name__)


def ensure_directory_exists(filepath: str) -> None:
    """
    Crée le répertoire parent du fichier s'il n'existe pas.

    Args:
        filepath: Chemin du fichier
    """
    directory = os.path.dirname(filepath)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
        logger.info(f"Répertoire créé: {directory}")


def get_files_to_process(paths: Iterable[str], suffix: str) -> List[str]:
    """
    Récupère la liste des fichiers à traiter.

    Les répertoires sont parcourus récursivement; les fichiers sont gardés
    tels quels.

    Args:
        paths: Fichiers ou répertoires
        suffix: Extension recherchée dans les répertoires (ex. '.csv')

    Returns:
        Liste triée des fichiers

    Raises:
        FileError: Si un chemin n'existe pas
    """
    files = []
    for path in paths:
        if os.path.isdir(path):
            for root, _, filenames in os.walk(path):
                for filename in filenames:
                    if filename.endswith(suffix):
                        files.append(os.path.join(root, filename))
        elif os.path.isfile(path):
            files.append(path)
        else:
            raise FileError(f"Chemin introuvable: {path}")
    return sorted(files)


def write_csv(filepath: str, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    """Écrit des lignes dans l'ordre de colonnes donné (fin de ligne '\\n')."""
    ensure_directory_exists(filepath)
    try:
        with open(filepath, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator='\n', extrasaction='ignore')
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    except OSError as e:
        raise FileError(f"Erreur lors de l'écriture de {filepath}: {e}")


def read_csv(filepath: str) -> List[Dict[str, str]]:
    try:
        with open(filepath, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise FileError(f"Erreur lors de la lecture de {filepath}: {e}")


def write_yaml(filepath: str, data: Any) -> None:
    ensure_directory_exists(filepath)
    try:
        with open(filepath, 'w', encoding='utf-8') as f:
            yaml.safe_dump(data, f, allow_unicode=True, sort_keys=False)
    except OSError as e:
        raise FileError(f"Erreur lors de l'écriture de {filepath}: {e}")


def write_jsonl(filepath: str, records: Iterable[Mapping[str, Any]]) -> int:
    """
    Écrit des enregistrements JSON, un par ligne, clés triées.

    Returns:
        Nombre de lignes écrites
    """
    ensure_directory_exists(filepath)
    count = 0
    try:
        with open(filepath, 'w', encoding='utf-8') as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
                f.write('\n')
                count += 1
    except OSError as e:
        raise FileError(f"Erreur lors de l'écriture de {filepath}: {e}")
    return count
