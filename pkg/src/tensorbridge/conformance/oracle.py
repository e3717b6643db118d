"""conformance/oracle.py

Comparateur élément par élément (NaN == NaN) et oracle de différences finies.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from tensorbridge.core.errors import InvalidArgument


def max_abs_err(a: np.ndarray, b: np.ndarray) -> Optional[float]:
    """
    Plus grand écart absolu entre a et b.

    NaN face à NaN et ±inf face au même infini comptent comme égaux.
    Renvoie None si l'écart n'est pas mesurable (formes différentes, NaN face
    à un nombre, infinis différents).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        return None
    if a.size == 0:
        return 0.0

    both_nan = np.isnan(a) & np.isnan(b)
    same_inf = np.isinf(a) & (a == b)
    equal = both_nan | same_inf
    if np.any((np.isnan(a) | np.isnan(b) | np.isinf(a) | np.isinf(b)) & ~equal):
        return None

    with np.errstate(invalid="ignore"):
        diff = np.where(equal, 0.0, np.abs(a - b))
    return float(np.max(diff))


def scale_of(a: np.ndarray) -> float:
    """max(1, |a|∞) sur les éléments finis : facteur d'échelle de la tolérance."""
    a = np.asarray(a, dtype=np.float64)
    finite = a[np.isfinite(a)]
    if finite.size == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(finite))))


def within(err: Optional[float], tol: float) -> bool:
    return err is not None and err <= tol


def finite_diff_grad(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """
    Gradient par différences centrées, coordonnée par coordonnée :
    (f(x + h e_i) - f(x - h e_i)) / 2h. Toujours évalué en float64.
    """
    if h <= 0:
        raise InvalidArgument(f"Pas de différences finies invalide : {h}")
    x = np.array(x, dtype=np.float64, copy=True)
    grad = np.zeros_like(x)
    flat_x = x.reshape(-1)
    flat_g = grad.reshape(-1)
    for i in range(flat_x.size):
        original = flat_x[i]
        flat_x[i] = original + h
        f_plus = float(f(x.copy()))
        flat_x[i] = original - h
        f_minus = float(f(x.copy()))
        flat_x[i] = original
        flat_g[i] = (f_plus - f_minus) / (2.0 * h)
    return grad
