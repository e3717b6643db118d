"""conformance/runner.py

Exécution différentielle des cas et suite de gradients.

  - run_differential() : un cas exécuté sur chaque backend, un enregistrement
    par paire non ordonnée de backends
  - run_gradient_case() : chaque backend différentiable comparé à l'oracle de
    différences finies, puis les backends différentiables entre eux
  - run_check() : génération, exécution (éventuellement parallèle), ordre
    des enregistrements indépendant de l'exécution
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from tensorbridge.autodiff.unify import value_and_grad
from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.loader import autodiff_backends, get_backend
from tensorbridge.conformance.corpus import GradientCase, build_gradient_corpus
from tensorbridge.conformance.generator import ConformanceCase, ShapeBudget, edge_cases, generate_cases, select_op_specs
from tensorbridge.conformance.oracle import finite_diff_grad, max_abs_err, scale_of, within
from tensorbridge.conformance.report import ERROR, FAIL, FD_ORACLE, PASS, CaseRecord
from tensorbridge.core.config_loader import HarnessConfig
from tensorbridge.core.errors import InvalidArgument, TensorBridgeError
from tensorbridge.core.logger import get_logger, log_phase
from tensorbridge.core.types import BackendId, DType
from tensorbridge.tensor.conversion import astensor
from tensorbridge.tensor.ops import apply

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Outcome:
    """Résultat d'un backend : valeur, ou nom d'erreur (foreign = hors taxonomie)."""

    value: Optional[np.ndarray] = None
    error: Optional[str] = None
    foreign: bool = False


def _capture(backend: BaseBackend, action: Callable[[], np.ndarray]) -> Outcome:
    try:
        return Outcome(value=action())
    except TensorBridgeError as exc:
        return Outcome(error=exc.kind)
    except Exception as exc:
        logger.warning("Exception hors taxonomie sur le backend '%s' : %r", backend.name, exc)
        return Outcome(error=type(exc).__name__, foreign=True)


def _finite_or_none(err: Optional[float]) -> Optional[float]:
    if err is None or not math.isfinite(err):
        return None
    return err


def _value_record(case_id: str, op: str, a: str, b: str, value_a: np.ndarray, value_b: np.ndarray, base_tol: float, scale_ref: np.ndarray) -> CaseRecord:
    err = _finite_or_none(max_abs_err(value_a, value_b))
    tol = base_tol * scale_of(scale_ref)
    return CaseRecord(case_id, op, a, b, err, tol, PASS if within(err, tol) else FAIL)


# ---------------------------------------------------------------------------
# Différentiel
# ---------------------------------------------------------------------------


def execute_case(case: ConformanceCase, backend: BaseBackend) -> Outcome:
    def action() -> np.ndarray:
        handles = [astensor(backend.from_array(arr, dtype=case.dtype)) for arr in case.arrays()]
        return apply(case.op, *handles, backend=backend).numpy()

    return _capture(backend, action)


def run_differential(case: ConformanceCase, backends: Sequence[BaseBackend], tol: float) -> List[CaseRecord]:
    """
    Une ligne par paire non ordonnée de backends.

    Une erreur de la taxonomie n'est un succès que si TOUS les backends lèvent
    la même ; une exception hors taxonomie donne le statut "error".
    """
    if len(backends) < 2:
        raise InvalidArgument("run_differential attend au moins deux backends")

    outcomes = [execute_case(case, b) for b in backends]
    kinds = {o.error for o in outcomes}
    unanimous_error = all(o.error is not None and not o.foreign for o in outcomes) and len(kinds) == 1

    records: List[CaseRecord] = []
    for (i, out_a), (j, out_b) in combinations(enumerate(outcomes), 2):
        a, b = backends[i].name, backends[j].name
        if out_a.foreign or out_b.foreign:
            error = " vs ".join(o.error for o in (out_a, out_b) if o.foreign)
            records.append(CaseRecord(case.case_id, case.kind, a, b, None, tol, ERROR, error))
        elif out_a.error is not None or out_b.error is not None:
            if unanimous_error:
                records.append(CaseRecord(case.case_id, case.kind, a, b, 0.0, tol, PASS, out_a.error))
            else:
                error = f"{out_a.error or 'ok'} vs {out_b.error or 'ok'}"
                records.append(CaseRecord(case.case_id, case.kind, a, b, None, tol, FAIL, error))
        else:
            records.append(_value_record(case.case_id, case.kind, a, b, out_a.value, out_b.value, tol, out_a.value))
    return records


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------


def _oracle_gradient(case: GradientCase, h: float) -> np.ndarray:
    plain = get_backend(BackendId.PLAIN)

    def f(arr: np.ndarray) -> float:
        return case.fn(astensor(plain.from_array(arr, dtype=DType.F64))).item()

    return finite_diff_grad(f, case.x_array().astype(np.float64), h)


def run_gradient_case(
    case: GradientCase,
    backends: Sequence[BaseBackend],
    fd_step: float,
    rel_tol: float,
    ad_tol: float,
) -> List[CaseRecord]:
    op = f"grad:{case.name}"
    backends = autodiff_backends(backends)
    plain = get_backend(BackendId.PLAIN)
    oracle = _capture(plain, lambda: _oracle_gradient(case, fd_step))

    outcomes = []
    for backend in backends:
        def action(backend: BaseBackend = backend) -> np.ndarray:
            x = astensor(backend.from_array(case.x_array(), dtype=case.dtype))
            _, grad = value_and_grad(case.fn, x)
            return grad.numpy()

        outcomes.append(_capture(backend, action))

    records: List[CaseRecord] = []
    for backend, out in zip(backends, outcomes):
        records.append(_compare_gradient(case.case_id, op, backend.name, FD_ORACLE, out, oracle, rel_tol, reference=oracle))
    for (i, out_a), (j, out_b) in combinations(enumerate(outcomes), 2):
        records.append(_compare_gradient(case.case_id, op, backends[i].name, backends[j].name, out_a, out_b, ad_tol, reference=out_a))
    return records


def _compare_gradient(case_id: str, op: str, a: str, b: str, out_a: Outcome, out_b: Outcome, base_tol: float, reference: Outcome) -> CaseRecord:
    if out_a.foreign or out_b.foreign:
        error = " vs ".join(o.error for o in (out_a, out_b) if o.foreign)
        return CaseRecord(case_id, op, a, b, None, base_tol, ERROR, error)
    if out_a.error is not None or out_b.error is not None:
        error = f"{out_a.error or 'ok'} vs {out_b.error or 'ok'}"
        return CaseRecord(case_id, op, a, b, None, base_tol, FAIL, error)
    return _value_record(case_id, op, a, b, out_a.value, out_b.value, base_tol, reference.value)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _map_flat(fn: Callable[[T], List[R]], items: Iterable[T], workers: int) -> List[R]:
    items = list(items)
    if workers <= 1:
        chunks = [fn(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, items))
    return [record for chunk in chunks for record in chunk]


def run_check(
    backends: Sequence[BaseBackend],
    config: HarnessConfig,
    dtype: DType = DType.F64,
    ops: Optional[Iterable[str]] = None,
    seed: Optional[int] = None,
) -> List[CaseRecord]:
    """
    Suite complète : cas générés + cas limites sur toutes les paires de
    backends, puis suite de gradients sur les backends différentiables.
    """
    if len(backends) < 2:
        raise InvalidArgument("La vérification exige au moins deux backends")
    dtype = DType.parse(dtype)
    ops = list(ops) if ops is not None else None
    seed = config.generator.seed if seed is None else seed
    gen = config.generator
    workers = max(1, config.runner.workers)

    log_phase(logger, "conformance.generate", f"seed={seed} dtype={dtype.value} backends={[b.name for b in backends]}")
    budget = ShapeBudget(max_rank=gen.max_rank, max_extent=gen.max_extent)
    cases = generate_cases(seed, select_op_specs(ops), budget, dtype=dtype, cases_per_rank=gen.cases_per_rank)
    cases += edge_cases(seed, dtype=dtype, kinds=ops)

    tol = config.tolerance.for_dtype(dtype)
    log_phase(logger, "conformance.run", f"{len(cases)} cas, {workers} worker(s)")
    records = _map_flat(lambda case: run_differential(case, backends, tol), cases, workers)

    if autodiff_backends(backends):
        grad_cfg = config.gradient
        ad_tol = grad_cfg.ad_agreement_f32 if dtype is DType.F32 else grad_cfg.ad_agreement_f64
        corpus = build_gradient_corpus(seed, dtype=dtype, kinds=ops)
        log_phase(logger, "conformance.gradients", f"{len(corpus)} fonction(s) du corpus")
        records += _map_flat(
            lambda case: run_gradient_case(case, backends, grad_cfg.fd_step, grad_cfg.rel_tol, ad_tol),
            corpus,
            workers,
        )

    failed = sum(1 for r in records if r.status != PASS)
    logger.info("Conformité : %d enregistrement(s), %d en échec", len(records), failed)
    return records
