"""conformance/mutants.py

Backends volontairement faux : chacun doit provoquer au moins un
enregistrement en échec, sinon le harnais est vert par vacuité.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.builtin.imperative import ImperativeBackend
from tensorbridge.backends.builtin.plain import PlainBackend
from tensorbridge.backends.builtin.tape import TapeBackend
from tensorbridge.backends.kernels import KERNELS
from tensorbridge.backends.vjp import VJP_RULES
from tensorbridge.core.errors import InvalidArgument


@dataclass(frozen=True)
class MutantFixture:
    name: str
    description: str
    factory: Callable[[], BaseBackend]

    def build(self) -> BaseBackend:
        return self.factory()


def _wrong_square_backend() -> BaseBackend:
    kernels = dict(KERNELS)
    kernels["square"] = lambda op, x: np.square(x) + 1
    return PlainBackend(kernels=kernels, name="plain+wrong-square")


def _flipped_square_vjp_backend() -> BaseBackend:
    rules = dict(VJP_RULES)
    rules["square"] = lambda op, inputs, output, cot: [-2 * inputs[0] * cot]
    return TapeBackend(vjp_rules=rules, name="tape+flipped-square-vjp")


def _add_without_unbroadcast_backend() -> BaseBackend:
    rules = dict(VJP_RULES)

    def add_rule(op, inputs, output, cot):
        full = np.broadcast_to(cot, output.shape)
        return [np.array(full) for _ in inputs]

    rules["add"] = add_rule
    return ImperativeBackend(vjp_rules=rules, name="imperative+add-no-unbroadcast")


MUTANTS: Dict[str, MutantFixture] = {
    fixture.name: fixture
    for fixture in (
        MutantFixture("wrong-square-kernel", "square(x) renvoie x*x + 1", _wrong_square_backend),
        MutantFixture("flipped-square-vjp", "VJP de square de signe opposé", _flipped_square_vjp_backend),
        MutantFixture("add-no-unbroadcast", "VJP de add sans réduction des dimensions broadcastées", _add_without_unbroadcast_backend),
    )
}


def list_mutants() -> List[MutantFixture]:
    return list(MUTANTS.values())


def get_mutant(name: str) -> MutantFixture:
    try:
        return MUTANTS[name]
    except KeyError:
        raise InvalidArgument(f"Mutant inconnu : {name!r} (attendus : {', '.join(MUTANTS)})") from None
