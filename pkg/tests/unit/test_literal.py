import math

import numpy as np
import pytest

from tensorbridge.core.errors import LiteralParseError
from tensorbridge.core.literal import format_scalar, format_value, parse_literal
from tensorbridge.core.types import DType


def test_parse_nested():
    arr = parse_literal("[[1,2],[3,4]]")
    assert arr.shape == (2, 2)
    assert arr.dtype == np.float64
    assert arr.tolist() == [[1.0, 2.0], [3.0, 4.0]]


def test_parse_scalar_and_empty():
    assert parse_literal("3.5").shape == ()
    assert parse_literal("[]").shape == (0,)


def test_parse_f32():
    assert parse_literal("[1.5]", DType.F32).dtype == np.float32


def test_parse_special_values():
    arr = parse_literal("[NaN, Infinity, -Infinity]")
    assert math.isnan(arr[0])
    assert arr[1] == math.inf and arr[2] == -math.inf


@pytest.mark.parametrize("text", ["[[1,2],[3,", "[[1,2],[3]]", "[1,[2]]", '["a"]', "[true]", "[null]", ""])
def test_parse_errors(text):
    with pytest.raises(LiteralParseError):
        parse_literal(text)


def test_format_scalar_shortest():
    assert format_scalar(14.0) == "14"
    assert format_scalar(math.sqrt(14)) == "3.7416573867739413"
    assert format_scalar(math.sqrt(14), DType.F32) == "3.7416575"
    assert format_scalar(-0.5) == "-0.5"
    assert format_scalar(float("nan")) == "nan"
    assert format_scalar(float("-inf")) == "-inf"


def test_format_value():
    assert format_value(np.array([2.0, 4.0, 6.0])) == "[2,4,6]"
    assert format_value(np.array(14.0)) == "14"
    assert format_value(np.array([[1.0, 0.5]], dtype=np.float32)) == "[[1,0.5]]"
    assert format_value(np.zeros((0,))) == "[]"
