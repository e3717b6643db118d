"""Taxonomie des erreurs de tensorbridge.

Le nom de classe de chaque erreur est son `kind` : c'est ce nom qui apparaît
dans les enregistrements de conformité quand un backend lève une erreur.
"""

from __future__ import annotations

from typing import Optional


class TensorBridgeError(Exception):
    """Erreur de base de la librairie."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class UnknownBackend(TensorBridgeError, TypeError):
    """L'objet ne correspond à aucun backend enregistré."""

    def __init__(self, message: str, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class MixedBackends(TensorBridgeError, ValueError):
    """Des tenseurs de backends différents dans une même expression."""


class ShapeMismatch(TensorBridgeError, ValueError):
    """Formes incompatibles (broadcast, reshape, transpose, squeeze)."""


class DTypeMismatch(TensorBridgeError, TypeError):
    """Opérandes de dtypes différents (aucune promotion implicite)."""


class InvalidAxis(TensorBridgeError, ValueError):
    """Axe hors limites ou dupliqué."""


class EmptyReduction(TensorBridgeError, ValueError):
    """min/max/argmax/argmin sur zéro élément."""


class InvalidArgument(TensorBridgeError, ValueError):
    """Paramètre d'opération invalide (descripteur, arange négatif, ...)."""


class NonDifferentiableOp(TensorBridgeError):
    """Aucune règle VJP pour cette opération."""


class NotScalarLoss(TensorBridgeError, ValueError):
    """backward() appelé sur un tenseur de rang non nul."""


class TapeConsumed(TensorBridgeError, RuntimeError):
    """Deuxième appel à gradient() sur une tape non persistante."""


class NotWatched(TensorBridgeError, ValueError):
    """Gradient demandé par rapport à un tenseur non surveillé par la tape."""


class NonScalarOutput(TensorBridgeError, ValueError):
    """La fonction différenciée ne renvoie pas un tenseur de rang 0."""


class UntraceableOp(TensorBridgeError, TypeError):
    """La fonction tracée sort du périmètre traçable (concrétisation, sortie non tensorielle)."""


class NoAutodiffCapability(TensorBridgeError, TypeError):
    """Le backend ne supporte pas la différentiation automatique."""


class LiteralParseError(TensorBridgeError, ValueError):
    """Littéral de tenseur illisible ou irrégulier."""


class ReportIOError(TensorBridgeError, OSError):
    """Écriture du rapport de conformité impossible."""
