#!/usr/bin/env python3
"""
tensorbridge - point d'entrée CLI.

Sous-commandes :
  check      harnais de conformité différentiel, rapport JSON Lines
  demo norm  norme L2 d'un littéral sur chaque backend
  demo grad  valeur et gradient de sum(square(x)) sur les backends différentiables
  list-ops   table des opérations

Codes de sortie :
  0  succès
  1  au moins un enregistrement en échec / backend sans autodiff
  2  erreur d'usage (argument, backend, opération, littéral, rapport)
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from tensorbridge import __version__
from tensorbridge.autodiff.unify import value_and_grad
from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.loader import get_builtin_backends, parse_backend_names
from tensorbridge.conformance.mutants import get_mutant, list_mutants
from tensorbridge.conformance.report import emit_report
from tensorbridge.conformance.runner import run_check
from tensorbridge.core.config_loader import ConfigError, ConfigLoader, HarnessConfig
from tensorbridge.core.descriptor import get_op_spec, list_op_specs
from tensorbridge.core.errors import InvalidArgument, LiteralParseError, NoAutodiffCapability, ReportIOError, TensorBridgeError
from tensorbridge.core.literal import format_scalar, format_value, parse_literal
from tensorbridge.core.logger import configure_logging, get_logger, log_phase
from tensorbridge.core.types import BackendId, DType
from tensorbridge.tensor.conversion import astensor

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SEED_ENV = "TB_SEED"
MAX_SEED = (1 << 64) - 1

AD_BACKENDS = (BackendId.IMPERATIVE.value, BackendId.TAPE.value, BackendId.FUNCTIONAL.value)


class UsageError(Exception):
    """Argument de ligne de commande invalide (code de sortie 2)."""


@dataclass(frozen=True)
class CliConfig:
    """Options résolues d'une invocation."""

    subcommand: str
    seed: Optional[int] = None
    dtype: DType = DType.F64
    backends: Sequence[BaseBackend] = ()
    ops: Optional[Sequence[str]] = None
    report: str = "-"
    literal: Optional[str] = None


# ---------------------------------------------------------------------------
# Arguments
# ---------------------------------------------------------------------------


def _split_list(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="Logs DEBUG sur stderr")

    parser = argparse.ArgumentParser(
        prog="tensorbridge",
        description="Tenseurs multi-backends et harnais de conformité",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"tensorbridge {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    check = sub.add_parser("check", parents=[common], help="Lance la suite de conformité")
    check.add_argument("--seed", type=int, default=None, help=f"Graine 64 bits (défaut : ${SEED_ENV} ou config)")
    check.add_argument("--dtype", choices=[d.value for d in DType], default=DType.F64.value)
    check.add_argument("--backends", default=None, help="Liste séparée par des virgules (défaut : tous)")
    check.add_argument("--ops", default=None, help="Opérations à tester, séparées par des virgules (défaut : toutes)")
    check.add_argument("--report", default="-", help="Chemin du rapport JSON Lines, '-' pour stdout")
    check.add_argument(
        "--mutant",
        action="append",
        default=[],
        choices=[m.name for m in list_mutants()],
        help="Ajoute un backend volontairement faux (répétable)",
    )

    demo = sub.add_parser("demo", parents=[common], help="Calculs de démonstration")
    demo_sub = demo.add_subparsers(dest="demo", metavar="DEMO")
    demo_sub.required = True

    norm = demo_sub.add_parser("norm", parents=[common], help="Norme L2 d'un littéral")
    norm.add_argument("literal", help='Littéral tensoriel, ex. "[1,2,3]"')
    norm.add_argument("--backends", default=None)
    norm.add_argument("--dtype", choices=[d.value for d in DType], default=DType.F64.value)

    grad = demo_sub.add_parser("grad", parents=[common], help="Valeur et gradient de sum(square(x))")
    grad.add_argument("literal", help='Littéral tensoriel, ex. "[1,2,3]"')
    grad.add_argument("--backends", default=None)
    grad.add_argument("--dtype", choices=[d.value for d in DType], default=DType.F64.value)

    sub.add_parser("list-ops", parents=[common], help="Affiche la table des opérations")
    return parser


def _resolve_seed(value: Optional[int]) -> Optional[int]:
    """--seed explicite, sinon None (le ConfigLoader applique TB_SEED puis le défaut)."""
    if value is None:
        return None
    if not 0 <= value <= MAX_SEED:
        raise UsageError(f"Graine hors de l'intervalle 64 bits : {value}")
    return value


def _resolve_backends(names: Optional[str], default: Sequence[str]) -> List[BaseBackend]:
    selected = _split_list(names)
    try:
        return parse_backend_names(selected if selected is not None else default)
    except TensorBridgeError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_ops(names: Optional[str]) -> Optional[List[str]]:
    selected = _split_list(names)
    if selected is None:
        return None
    if not selected:
        raise UsageError("--ops ne contient aucune opération")
    for kind in selected:
        try:
            get_op_spec(kind)
        except InvalidArgument as exc:
            raise UsageError(str(exc)) from exc
    return selected


def build_cli_config(args: argparse.Namespace) -> CliConfig:
    """Valide les arguments avant tout calcul ; lève UsageError."""
    command = args.command if args.command != "demo" else f"demo {args.demo}"
    all_names = [b.name for b in get_builtin_backends()]

    if command == "check":
        backends = _resolve_backends(args.backends, all_names)
        backends += [get_mutant(name).build() for name in args.mutant]
        if len(backends) < 2:
            raise UsageError("La vérification exige au moins deux backends")
        return CliConfig(
            subcommand=command,
            seed=_resolve_seed(args.seed),
            dtype=DType.parse(args.dtype),
            backends=backends,
            ops=_resolve_ops(args.ops),
            report=args.report,
        )
    if command == "demo norm":
        return CliConfig(command, dtype=DType.parse(args.dtype), backends=_resolve_backends(args.backends, all_names), literal=args.literal)
    if command == "demo grad":
        return CliConfig(command, dtype=DType.parse(args.dtype), backends=_resolve_backends(args.backends, AD_BACKENDS), literal=args.literal)
    return CliConfig(command)


# ---------------------------------------------------------------------------
# Sous-commandes
# ---------------------------------------------------------------------------


def cmd_check(config: CliConfig, harness: HarnessConfig) -> int:
    seed = harness.generator.seed if config.seed is None else config.seed
    records = run_check(config.backends, harness, dtype=config.dtype, ops=config.ops, seed=seed)
    try:
        summary = emit_report(records, config.report, seed)
    except ReportIOError as exc:
        logger.error("❌ %s", exc)
        return EXIT_USAGE

    if summary.ok:
        log_phase(logger, "check.done", f"✓ {summary.passed} enregistrement(s) conformes")
        return EXIT_OK
    logger.error("❌ %d échec(s), %d erreur(s)", summary.failed, summary.errored)
    return EXIT_FAILURE


def _parse(config: CliConfig):
    try:
        return parse_literal(config.literal or "", config.dtype)
    except LiteralParseError as exc:
        raise UsageError(str(exc)) from exc


def cmd_demo_norm(config: CliConfig) -> int:
    array = _parse(config)
    for backend in config.backends:
        x = astensor(backend.from_array(array, dtype=config.dtype))
        print(f"{backend.name}: {format_scalar(x.norm().item(), config.dtype)}")
    return EXIT_OK


def cmd_demo_grad(config: CliConfig) -> int:
    array = _parse(config)
    status = EXIT_OK
    for backend in config.backends:
        x = astensor(backend.from_array(array, dtype=config.dtype))
        try:
            value, grad = value_and_grad(lambda t: t.square().sum(), x)
        except NoAutodiffCapability as exc:
            print(f"{backend.name}: {exc}", file=sys.stderr)
            status = EXIT_FAILURE
            continue
        print(f"{backend.name}: value={format_scalar(value.item(), config.dtype)} grad={format_value(grad.numpy())}")
    return status


def cmd_list_ops() -> int:
    for spec in list_op_specs():
        params = ",".join(spec.params) or "-"
        differentiable = "true" if spec.differentiable else "false"
        print(f"{spec.kind:<12} {spec.category:<10} arity={spec.arity} differentiable={differentiable:<5} params={params}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    verbose = getattr(args, "verbose", False)

    # 1. Logging (stderr : stdout est réservé au rapport et aux démos)
    configure_logging(level="DEBUG" if verbose else "WARNING", force=True)

    # 2. Configuration du harnais (defaults packagés + overrides env)
    try:
        harness = ConfigLoader().load()
    except ConfigError as exc:
        logger.error("❌ Configuration invalide : %s", exc)
        return EXIT_USAGE

    log_cfg = harness.logging
    configure_logging(
        level="DEBUG" if verbose else log_cfg.level,
        fmt=log_cfg.format,
        console_enabled=log_cfg.console_enabled,
        file_enabled=log_cfg.file_enabled,
        file_path=log_cfg.file_name,
        force=True,
    )

    # 3. Validation des arguments avant tout calcul
    try:
        config = build_cli_config(args)
        log_phase(logger, "cli.start", f"tensorbridge {__version__} : {config.subcommand}")

        # 4. Dispatch
        if config.subcommand == "check":
            return cmd_check(config, harness)
        if config.subcommand == "demo norm":
            return cmd_demo_norm(config)
        if config.subcommand == "demo grad":
            return cmd_demo_grad(config)
        return cmd_list_ops()
    except UsageError as exc:
        print(f"tensorbridge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.warning("Interrompu par l'utilisateur")
        sys.exit(130)
