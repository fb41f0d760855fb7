"""
Ops Module - Built-in Element-Wise Operations and Reductions

Arithmetic, trigonometric and comparison operations built as transform
kernels, plus sum/mean reductions and concatenation.

Unit rules:
    add/subtract/compare    units must be equal (scale included)
    multiply/divide         units compose
    sqrt                    every exponent must be even
    sin/cos                 input must be dimensionless (rad accepted)

Variance rules are first-order propagation for independent inputs. Integer
overflow wraps silently, as for raw machine integers.

Example:
    from src import ops
    from src.variable import array

    a = array(["x"], [2.0], unit="m", variances=[0.04])
    b = array(["x"], [3.0], unit="s", variances=[0.09])
    c = ops.multiply(a, b)        # 6.0 m*s, variance 0.72
"""

import builtins
import logging
from typing import Optional, Tuple

import numpy as np

from .dtypes import DType
from .errors import (
    DTypeError,
    IntegerDivisionError,
    ShapeError,
    UnitError,
    UnsupportedError,
)
from .event_storage import EventStorage
from .transform import (
    COMPARABLE_COMBOS_2,
    FLOAT_COMBOS_1,
    NUMERIC_COMBOS_1,
    NUMERIC_COMBOS_2,
    Kernel,
    transform,
    transform_in_place,
)
from .units import Unit, dimensionless, format_unit, unit_div, unit_mul, unit_sqrt
from .variable import Dims, Variable, copy, transpose_to

logger = logging.getLogger(__name__)


def _same_unit(verb: str):
    def unit_fn(a: Unit, b: Unit) -> Unit:
        if a != b:
            raise UnitError(f"cannot {verb} {format_unit(a)} and {format_unit(b)}")
        return a
    return unit_fn


def _dimensionless_input(name: str):
    def unit_fn(a: Unit) -> Unit:
        if not a.is_dimensionless:
            raise UnitError(f"{name} requires a dimensionless input, got {format_unit(a)}")
        return dimensionless
    return unit_fn


def _compare_unit(a: Unit, b: Unit) -> Unit:
    if a != b:
        raise UnitError(f"cannot compare {format_unit(a)} and {format_unit(b)}")
    return dimensionless


def _divide_values(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.issubdtype(np.result_type(a, b), np.integer):
        if np.any(b == 0):
            raise IntegerDivisionError("integer division by zero")
        # Truncate toward zero
        quotient = np.floor_divide(a, b)
        inexact = (np.remainder(a, b) != 0) & ((a < 0) != (b < 0))
        return quotient + inexact
    return np.true_divide(a, b)


def _abs_variance(values, variances):
    return np.abs(values[0]), variances[0]


ADD = Kernel(
    name="add",
    value_fn=np.add,
    unit_fn=_same_unit("add"),
    type_combos=NUMERIC_COMBOS_2,
    partials=lambda a, b: (1.0, 1.0),
)

SUBTRACT = Kernel(
    name="subtract",
    value_fn=np.subtract,
    unit_fn=_same_unit("subtract"),
    type_combos=NUMERIC_COMBOS_2,
    partials=lambda a, b: (1.0, -1.0),
)

MULTIPLY = Kernel(
    name="multiply",
    value_fn=np.multiply,
    unit_fn=unit_mul,
    type_combos=NUMERIC_COMBOS_2,
    partials=lambda a, b: (b, a),
)

DIVIDE = Kernel(
    name="divide",
    value_fn=_divide_values,
    unit_fn=unit_div,
    type_combos=NUMERIC_COMBOS_2,
    partials=lambda a, b: (1.0 / b, -a / (b * b)),
)

SQRT = Kernel(
    name="sqrt",
    value_fn=np.sqrt,
    unit_fn=unit_sqrt,
    type_combos=FLOAT_COMBOS_1,
    partials=lambda a: (0.5 / np.sqrt(a),),
)

ABS = Kernel(
    name="abs",
    value_fn=np.abs,
    unit_fn=lambda a: a,
    type_combos=NUMERIC_COMBOS_1,
    variance_fn=_abs_variance,
)

SIN = Kernel(
    name="sin",
    value_fn=np.sin,
    unit_fn=_dimensionless_input("sin"),
    type_combos=FLOAT_COMBOS_1,
    partials=lambda a: (np.cos(a),),
)

COS = Kernel(
    name="cos",
    value_fn=np.cos,
    unit_fn=_dimensionless_input("cos"),
    type_combos=FLOAT_COMBOS_1,
    partials=lambda a: (-np.sin(a),),
)

NEGATIVE = Kernel(
    name="negative",
    value_fn=np.negative,
    unit_fn=lambda a: a,
    type_combos=NUMERIC_COMBOS_1,
    partials=lambda a: (-1.0,),
)

RECIPROCAL = Kernel(
    name="reciprocal",
    value_fn=lambda a: 1.0 / a,
    unit_fn=lambda a: unit_div(dimensionless, a),
    type_combos=FLOAT_COMBOS_1,
    partials=lambda a: (-1.0 / (a * a),),
)

COMPARE_EQ = Kernel(
    name="compare_eq",
    value_fn=np.equal,
    unit_fn=_compare_unit,
    type_combos=COMPARABLE_COMBOS_2,
    out_dtype=lambda *types: DType.BOOL,
    propagates_variances=False,
)

COMPARE_LT = Kernel(
    name="compare_lt",
    value_fn=np.less,
    unit_fn=_compare_unit,
    type_combos=NUMERIC_COMBOS_2,
    out_dtype=lambda *types: DType.BOOL,
    propagates_variances=False,
)


def add(a: Variable, b: Variable) -> Variable:
    return transform([a, b], ADD)


def subtract(a: Variable, b: Variable) -> Variable:
    return transform([a, b], SUBTRACT)


def multiply(a: Variable, b: Variable) -> Variable:
    return transform([a, b], MULTIPLY)


def divide(a: Variable, b: Variable) -> Variable:
    """
    Element-wise a / b.

    Integer division truncates toward zero; float division by zero gives
    the IEEE result.

    Raises:
        IntegerDivisionError: On integer division by zero
    """
    return transform([a, b], DIVIDE)


def add_in_place(target: Variable, other: Variable) -> None:
    transform_in_place(target, [other], ADD)


def subtract_in_place(target: Variable, other: Variable) -> None:
    transform_in_place(target, [other], SUBTRACT)


def multiply_in_place(target: Variable, other: Variable) -> None:
    transform_in_place(target, [other], MULTIPLY)


def divide_in_place(target: Variable, other: Variable) -> None:
    transform_in_place(target, [other], DIVIDE)


def sqrt(a: Variable) -> Variable:
    return transform([a], SQRT)


def abs(a: Variable) -> Variable:
    return transform([a], ABS)


def sin(a: Variable) -> Variable:
    return transform([a], SIN)


def cos(a: Variable) -> Variable:
    return transform([a], COS)


def negative(a: Variable) -> Variable:
    return transform([a], NEGATIVE)


def reciprocal(a: Variable) -> Variable:
    return transform([a], RECIPROCAL)


def compare_eq(a: Variable, b: Variable) -> Variable:
    return transform([a, b], COMPARE_EQ)


def compare_lt(a: Variable, b: Variable) -> Variable:
    return transform([a, b], COMPARE_LT)


def _reduction_input(v: Variable, dim: str, name: str) -> int:
    axis = v.layout.index(dim)
    if v.is_event:
        raise UnsupportedError(f"{name} over event lists; histogram first")
    if not (v.dtype.is_float or v.dtype.is_int):
        raise DTypeError(f"{name} requires numeric data, got {v.dtype.value}")
    return axis


def _reduced(v: Variable, dim: str, values: np.ndarray, variances: Optional[np.ndarray]) -> Variable:
    layout = v.layout.without(dim)
    dtype = v.dtype.numpy
    return Variable(
        layout,
        v.unit,
        v.dtype,
        np.asarray(values, dtype=dtype).reshape(layout.shape),
        None if variances is None else np.asarray(variances, dtype=dtype).reshape(layout.shape),
    )


def sum(v: Variable, dim: str) -> Variable:
    """
    Sum over one dim; variances add.

    Raises:
        DimensionError: If dim is not a dim of v
    """
    axis = _reduction_input(v, dim, "sum")
    dtype = v.dtype.numpy
    values = np.sum(v.values, axis=axis, dtype=dtype)
    variances = np.sum(v.variances, axis=axis, dtype=dtype) if v.has_variances else None
    return _reduced(v, dim, values, variances)


def mean(v: Variable, dim: str) -> Variable:
    """
    Mean over one dim: sum / N with variance (sum of variances) / N^2.

    A dim of extent 0 gives NaN.

    Raises:
        DimensionError: If dim is not a dim of v
        DTypeError: If the data is not floating point
    """
    axis = _reduction_input(v, dim, "mean")
    if not v.dtype.is_float:
        raise DTypeError(f"mean requires floating-point data, got {v.dtype.value}")
    dtype = v.dtype.numpy
    n = v.shape[axis]
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.sum(v.values, axis=axis, dtype=dtype) / dtype.type(n)
        variances = None
        if v.has_variances:
            variances = np.sum(v.variances, axis=axis, dtype=dtype) / dtype.type(n * n)
    if n == 0:
        values = np.full_like(values, np.nan)
        if variances is not None:
            variances = np.full_like(variances, np.nan)
    return _reduced(v, dim, values, variances)


def _check_concat_operands(a: Variable, b: Variable) -> None:
    if a.unit != b.unit:
        raise UnitError(f"cannot concatenate {format_unit(a.unit)} and {format_unit(b.unit)}")
    if a.dtype != b.dtype:
        raise DTypeError(f"cannot concatenate {a.dtype.value} and {b.dtype.value}")
    if a.has_variances != b.has_variances:
        raise ShapeError("cannot concatenate variables with and without variances")


def _rest_matches(rest: Dims, other: Dims) -> bool:
    return sorted(rest.pairs()) == sorted(other.pairs())


def concatenate(a: Variable, b: Variable, dim: str) -> Variable:
    """
    Join a and b along dim.

    If neither operand has dim, a new outer dim of extent 2 is created. If only
    one has it, the other is treated as extent 1 along it. All other dims
    must agree; b is transposed to a's order.

    Raises:
        UnitError: On unit mismatch
        DTypeError: On element-type mismatch
        ShapeError: On dim or variance mismatch
    """
    _check_concat_operands(a, b)
    in_a, in_b = dim in a.dims, dim in b.dims

    if not in_a and not in_b:
        if not _rest_matches(a.layout, b.layout):
            raise ShapeError(f"cannot concatenate {a.layout} and {b.layout}")
        layout = Dims((dim,) + a.dims, (2,) + a.shape)
        axis = 0
        parts = [(a, a.dims, True), (b, a.dims, True)]
    else:
        ref = a if in_a else b
        rest = ref.layout.without(dim)
        for other in (a, b):
            other_rest = other.layout.without(dim) if dim in other.dims else other.layout
            if not _rest_matches(rest, other_rest):
                raise ShapeError(f"cannot concatenate {a.layout} and {b.layout} along {dim!r}")
        axis = ref.dims.index(dim)
        extent = builtins.sum(v.sizes.get(dim, 1) for v in (a, b))
        layout = ref.layout.with_extent(dim, extent)
        parts = [
            (v, ref.dims, False) if dim in v.dims else (v, rest.labels, True)
            for v in (a, b)
        ]

    if a.is_event:
        return _concatenate_events(parts, axis, layout)

    values = []
    variances = []
    for v, order, expand in parts:
        view = transpose_to(v, order)
        vals, var = view.values, view.variances
        if expand:
            vals = np.expand_dims(vals, axis)
            var = None if var is None else np.expand_dims(var, axis)
        values.append(vals)
        variances.append(var)
    return Variable(
        layout,
        a.unit,
        a.dtype,
        np.concatenate(values, axis=axis),
        np.concatenate(variances, axis=axis) if a.has_variances else None,
    )


def _concatenate_events(parts, axis: int, layout: Dims) -> Variable:
    compact = [copy(transpose_to(v, order)) for v, order, _ in parts]
    storage = EventStorage.concat([c.event_storage for c in compact])
    variances = None
    if compact[0].has_variances:
        variances = storage.with_flat(
            np.concatenate([c.event_variance_storage.flat for c in compact])
        )
    ids = []
    shift = 0
    for c, (_, _, expand) in zip(compact, parts):
        own = c.list_ids + shift
        ids.append(np.expand_dims(own, axis) if expand else own)
        shift += c.event_storage.count
    joined = np.concatenate(ids, axis=axis)
    first = compact[0]
    combined = Variable(
        Dims((layout.labels[0],), (storage.count,)),
        first.unit,
        first.dtype,
        np.arange(storage.count, dtype=np.int64),
        None,
        storage,
        variances,
    )
    return combined.gather_lists(joined.ravel(), layout)
