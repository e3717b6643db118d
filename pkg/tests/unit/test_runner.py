from pathlib import Path

import numpy as np
import pytest

from tensorbridge.backends import get_backend, get_builtin_backends
from tensorbridge.backends.builtin import PlainBackend
from tensorbridge.backends.kernels import KERNELS
from tensorbridge.conformance.corpus import build_gradient_corpus
from tensorbridge.conformance.generator import ConformanceCase, InputSpec, edge_cases, generate_cases, select_op_specs
from tensorbridge.conformance.report import ERROR, FAIL, FD_ORACLE, PASS
from tensorbridge.conformance.runner import execute_case, run_check, run_differential, run_gradient_case
from tensorbridge.core.config_loader import ConfigLoader
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, ShapeMismatch
from tensorbridge.core.types import DType

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def small_config():
    return ConfigLoader(config_path=FIXTURES / "override_small.yaml").load()


def test_execute_case_value():
    case = ConformanceCase(OpDescriptor("square"), (InputSpec((3,)),), DType.F64, seed=1)
    outcome = execute_case(case, get_backend("tape"))
    assert outcome.error is None
    np.testing.assert_array_equal(outcome.value, np.square(case.arrays()[0]))


def test_one_record_per_backend_pair(builtin_backends):
    case = generate_cases(42, select_op_specs(["exp"]))[3]
    records = run_differential(case, builtin_backends, tol=1e-12)
    assert len(records) == 6
    assert {(r.backend_a, r.backend_b) for r in records} == {
        ("plain", "imperative"),
        ("plain", "tape"),
        ("plain", "functional"),
        ("imperative", "tape"),
        ("imperative", "functional"),
        ("tape", "functional"),
    }
    assert all(r.status == PASS and r.max_abs_err == 0.0 for r in records)
    assert all(r.case_id == case.case_id and r.op == "exp" for r in records)


def test_ieee_edge_cases_pass(builtin_backends):
    for case in edge_cases(42):
        records = run_differential(case, builtin_backends, tol=1e-12)
        assert all(r.status == PASS for r in records), case.label


def test_unanimous_error_is_a_pass(builtin_backends):
    (case,) = [c for c in edge_cases(42) if c.label == "max-empty-axis"]
    records = run_differential(case, builtin_backends, tol=1e-12)
    assert all(r.status == PASS and r.error == "EmptyReduction" for r in records)


def test_error_on_one_side_is_a_failure():
    def failing(op, x):
        raise ShapeMismatch("boom")

    kernels = dict(KERNELS)
    kernels["exp"] = failing
    odd = PlainBackend(kernels=kernels, name="plain+odd")
    case = ConformanceCase(OpDescriptor("exp"), (InputSpec((2,)),), DType.F64, seed=5)
    (record,) = run_differential(case, [get_backend("plain"), odd], tol=1e-12)
    assert record.status == FAIL
    assert record.max_abs_err is None
    assert record.error == "ok vs ShapeMismatch"


def test_foreign_exception_is_an_error():
    kernels = dict(KERNELS)

    def broken(op, x):
        raise ZeroDivisionError("boom")

    kernels["exp"] = broken
    broken_backend = PlainBackend(kernels=kernels, name="plain+broken")
    case = ConformanceCase(OpDescriptor("exp"), (InputSpec((2,)),), DType.F64, seed=5)
    (record,) = run_differential(case, [get_backend("plain"), broken_backend], tol=1e-12)
    assert record.status == ERROR
    assert record.error == "ZeroDivisionError"


def test_run_differential_needs_two_backends():
    case = ConformanceCase(OpDescriptor("exp"), (InputSpec((2,)),), DType.F64, seed=5)
    with pytest.raises(InvalidArgument):
        run_differential(case, [get_backend("plain")], tol=1e-12)


def test_gradient_case_records(builtin_backends):
    (case,) = build_gradient_corpus(42, kinds=["square"])
    records = run_gradient_case(case, builtin_backends, fd_step=1e-6, rel_tol=1e-4, ad_tol=1e-12)
    oracle = [r for r in records if r.backend_b == FD_ORACLE]
    pairs = [r for r in records if r.backend_b != FD_ORACLE]
    assert [r.backend_a for r in oracle] == ["imperative", "tape", "functional"]
    assert len(pairs) == 3
    assert all(r.op == "grad:square" for r in records)
    assert all(r.status == PASS for r in records)


@pytest.mark.parametrize("dtype", [DType.F64, DType.F32])
def test_run_check_all_pass(small_config, builtin_backends, dtype):
    records = run_check(builtin_backends, small_config, dtype=dtype, seed=42)
    failing = [r for r in records if r.status != PASS]
    assert failing == []
    assert any(r.op.startswith("grad:") for r in records)


def test_run_check_op_filter(small_config):
    backends = [get_backend("plain"), get_backend("tape")]
    records = run_check(backends, small_config, ops=["square"], seed=42)
    assert records
    assert {r.op for r in records} == {"square", "grad:square"}


def test_run_check_without_autodiff_has_no_gradient_records(small_config):
    backends = [get_backend("plain"), PlainBackend(name="plain-bis")]
    records = run_check(backends, small_config, ops=["exp"], seed=1)
    assert records and all(not r.op.startswith("grad:") for r in records)


def test_parallel_run_matches_sequential(small_config):
    backends = get_builtin_backends()
    sequential = run_check(backends, small_config, ops=["add", "sum"], seed=9)
    small_config.runner.workers = 4
    parallel = run_check(backends, small_config, ops=["add", "sum"], seed=9)
    assert sequential == parallel


def test_run_check_needs_two_backends(small_config):
    with pytest.raises(InvalidArgument):
        run_check([get_backend("plain")], small_config)
