"""Fichiers de configuration packagés (defaults.yaml, defaults.schema.json)."""
