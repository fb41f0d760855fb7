"""
Transform Module - Generic Element-Wise Application Engine

Applies a Kernel to N input Variables. The engine takes care of everything
that is not the arithmetic itself:

- dispatch on the tuple of input element types
- unit transformation through the kernel's unit function
- first-order variance propagation from registered partial derivatives
- broadcasting into missing dimensions and transposing to a common order
- broadcasting dense operands into the lists of one event-list operand

Kernels are vectorized: value and partial functions receive whole numpy
arrays (already aligned to the output layout) and must be element-wise.

Example:
    from src.transform import Kernel, transform, FLOAT_COMBOS_2

    radius = Kernel(
        name="radius",
        value_fn=lambda x, y: np.sqrt(x * x + y * y),
        unit_fn=lambda ux, uy: ux,
        type_combos=FLOAT_COMBOS_2,
        partials=lambda x, y: (x / np.sqrt(x * x + y * y), y / np.sqrt(x * x + y * y)),
    )
    r = transform([x, y], radius)
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .dtypes import DType, from_numpy
from .errors import DTypeError, ShapeError, UnsupportedError, ViewError
from .event_storage import EventStorage
from .units import Unit
from .variable import Dims, Variable

logger = logging.getLogger(__name__)

FLOATS = (DType.FLOAT64, DType.FLOAT32)
INTS = (DType.INT64, DType.INT32)

FLOAT_COMBOS_1: FrozenSet[Tuple[DType, ...]] = frozenset((t,) for t in FLOATS)
NUMERIC_COMBOS_1: FrozenSet[Tuple[DType, ...]] = frozenset((t,) for t in FLOATS + INTS)
FLOAT_COMBOS_2: FrozenSet[Tuple[DType, ...]] = frozenset(itertools.product(FLOATS, FLOATS))
NUMERIC_COMBOS_2: FrozenSet[Tuple[DType, ...]] = frozenset(
    itertools.chain(itertools.product(FLOATS, FLOATS), itertools.product(INTS, INTS))
)
COMPARABLE_COMBOS_2: FrozenSet[Tuple[DType, ...]] = NUMERIC_COMBOS_2 | frozenset(
    {(DType.BOOL, DType.BOOL)}
)

# (values, variances) -> (value, variance); variances entries are None for exact inputs
VarianceFn = Callable[[Sequence[np.ndarray], Sequence[Optional[np.ndarray]]], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Kernel:
    """
    Element-wise operation description.

    Attributes:
        name: Operation name used in diagnostics
        value_fn: Vectorized function of N value arrays
        unit_fn: Function of N Units returning the output Unit
        type_combos: Allowed N-tuples of scalar element types
        partials: Vectorized partial derivatives, one array per input
        variance_fn: Explicit (value, variance) function; overrides partials
        out_dtype: Output element type from the input types (default: promotion)
        propagates_variances: False for kernels whose output never has variances
    """

    name: str
    value_fn: Callable[..., np.ndarray]
    unit_fn: Callable[..., Unit]
    type_combos: FrozenSet[Tuple[DType, ...]]
    partials: Optional[Callable[..., Tuple[np.ndarray, ...]]] = None
    variance_fn: Optional[VarianceFn] = None
    out_dtype: Optional[Callable[..., DType]] = None
    propagates_variances: bool = True

    def value_and_variance(
        self,
        values: Sequence[np.ndarray],
        variances: Sequence[Optional[np.ndarray]],
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Value and first-order variance of the kernel output.

        Inputs without variances count as exact.
        """
        if self.variance_fn is not None:
            return self.variance_fn(values, variances)
        if self.partials is None:
            raise UnsupportedError(f"{self.name} cannot propagate variances")
        value = self.value_fn(*values)
        derivatives = self.partials(*values)
        variance = np.zeros(np.shape(value), dtype=np.result_type(value))
        for derivative, var in zip(derivatives, variances):
            if var is not None:
                variance = variance + np.square(derivative) * var
        return value, variance


@dataclass
class BroadcastPlan:
    """
    Output layout of a transform and how each input maps into it.

    Attributes:
        dims: Output Dims
        strides: Per input, element stride along every output dim (0 where broadcast)
        inputs: Input Dims in call order
    """

    dims: Dims
    strides: List[Tuple[int, ...]] = field(default_factory=list)
    inputs: List[Dims] = field(default_factory=list)

    def align(self, index: int, arr: np.ndarray) -> np.ndarray:
        """
        Read-only view of an input buffer laid out like the output.

        Args:
            index: Position of the input in the plan
            arr: Buffer with the input's own dim order

        Returns:
            Transposed, expanded and broadcast view of arr
        """
        source = self.inputs[index]
        present = [label for label in self.dims.labels if label in source]
        if present != list(source.labels):
            arr = arr.transpose([source.index(label) for label in present])
        expanded = tuple(
            source.extent(label) if label in source else 1 for label in self.dims.labels
        )
        return np.broadcast_to(arr.reshape(expanded), self.dims.shape)


def _row_major_strides(dims: Dims) -> Tuple[int, ...]:
    strides = []
    step = 1
    for n in reversed(dims.shape):
        strides.append(step)
        step *= n
    return tuple(reversed(strides))


def plan_broadcast(inputs: Sequence[Dims]) -> BroadcastPlan:
    """
    Compute the output layout for a set of input layouts.

    The output holds the first input's dims in order, followed by dims that
    appear only in later inputs, in their own order.

    Raises:
        ShapeError: If a shared dim has different extents
    """
    labels: List[str] = []
    extents = {}
    for dims in inputs:
        for label, extent in dims.pairs():
            if label in extents:
                if extents[label] != extent:
                    raise ShapeError(
                        f"dimension {label!r} has extent {extents[label]} and {extent}"
                    )
                continue
            extents[label] = extent
            labels.append(label)
    out = Dims(tuple(labels), tuple(extents[label] for label in labels))

    strides = []
    for dims in inputs:
        own = dict(zip(dims.labels, _row_major_strides(dims)))
        strides.append(tuple(own.get(label, 0) for label in out.labels))
        if dims.labels != out.labels:
            logger.debug(f"aligning {dims} to {out}")
    return BroadcastPlan(out, strides, list(inputs))


def _promote(elements: Sequence[DType]) -> DType:
    return from_numpy(np.result_type(*[e.numpy for e in elements]))


def _check_combo(inputs: Sequence[Variable], kernel: Kernel) -> Tuple[DType, ...]:
    combo = tuple(v.dtype.element for v in inputs)
    if combo not in kernel.type_combos:
        names = ", ".join(t.value for t in combo)
        raise DTypeError(f"{kernel.name} does not support element types ({names})")
    return combo


def transform(inputs: Sequence[Variable], kernel: Kernel) -> Variable:
    """
    Apply kernel element-wise to inputs.

    Args:
        inputs: Variables or views; at most one may hold event lists
        kernel: Operation to apply

    Returns:
        New Variable over the broadcast output dims. It has variances iff the
        kernel propagates them and any input has them.

    Raises:
        DTypeError: If the element-type combination is not supported
        UnitError: If the kernel's unit function rejects the input units
        ShapeError: If shared dims disagree on extent
    """
    inputs = list(inputs)
    combo = _check_combo(inputs, kernel)
    unit = kernel.unit_fn(*[v.unit for v in inputs])
    plan = plan_broadcast([v.layout for v in inputs])
    out_element = kernel.out_dtype(*combo) if kernel.out_dtype else _promote(combo)
    with_variances = kernel.propagates_variances and any(v.has_variances for v in inputs)

    event_inputs = [i for i, v in enumerate(inputs) if v.is_event]
    if len(event_inputs) > 1:
        raise UnsupportedError(f"{kernel.name} supports at most one event-list input")
    if event_inputs:
        return _transform_events(inputs, kernel, plan, event_inputs[0], unit, out_element, with_variances)

    values = [plan.align(i, v.values) for i, v in enumerate(inputs)]
    variances = [
        plan.align(i, v.variances) if v.has_variances else None for i, v in enumerate(inputs)
    ]
    out_values, out_variances = _evaluate(kernel, values, variances, with_variances)
    return Variable(
        plan.dims,
        unit,
        out_element,
        np.ascontiguousarray(out_values, dtype=out_element.numpy).reshape(plan.dims.shape),
        None
        if out_variances is None
        else np.ascontiguousarray(out_variances, dtype=out_element.numpy).reshape(plan.dims.shape),
    )


def _evaluate(
    kernel: Kernel,
    values: Sequence[np.ndarray],
    variances: Sequence[Optional[np.ndarray]],
    with_variances: bool,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if with_variances:
            return kernel.value_and_variance(values, variances)
        return kernel.value_fn(*values), None


def _transform_events(
    inputs: Sequence[Variable],
    kernel: Kernel,
    plan: BroadcastPlan,
    event_index: int,
    unit: Unit,
    out_element: DType,
    with_variances: bool,
) -> Variable:
    event_input = inputs[event_index]
    storage = event_input.event_storage
    list_ids = np.ascontiguousarray(plan.align(event_index, event_input.list_ids)).ravel()
    lengths = storage.lengths()[list_ids]
    positions = storage.positions(list_ids)

    values = []
    variances = []
    for i, v in enumerate(inputs):
        if i == event_index:
            values.append(storage.flat[positions])
            var_storage = v.event_variance_storage
            variances.append(None if var_storage is None else var_storage.flat[positions])
            continue
        # Dense operand is repeated once per event of the matching list
        values.append(np.repeat(plan.align(i, v.values).ravel(), lengths))
        variances.append(
            np.repeat(plan.align(i, v.variances).ravel(), lengths) if v.has_variances else None
        )

    out_flat, out_var = _evaluate(kernel, values, variances, with_variances)
    out_flat = np.ascontiguousarray(np.broadcast_to(out_flat, positions.shape), dtype=out_element.numpy)
    events = EventStorage.from_lengths(out_flat, lengths)
    event_variances = None
    if out_var is not None:
        out_var = np.ascontiguousarray(np.broadcast_to(out_var, positions.shape), dtype=out_element.numpy)
        event_variances = events.with_flat(out_var)
    ids = np.arange(events.count, dtype=np.int64).reshape(plan.dims.shape)
    return Variable(plan.dims, unit, out_element.event, ids, None, events, event_variances)


def transform_in_place(target: Variable, inputs: Sequence[Variable], kernel: Kernel) -> None:
    """
    Apply kernel to (target, *inputs) and write the result into target.

    The result is computed completely before target is touched, so target
    is unchanged when an error is raised.

    Raises:
        ShapeError: If the result would need dims target does not have
        ViewError: If the unit or variance presence would change through a view
        DTypeError: If the result type cannot be stored in target
    """
    result = transform([target] + list(inputs), kernel)
    if result.layout != target.layout:
        raise ShapeError(f"in-place {kernel.name} would broadcast target {target.layout} to {result.layout}")
    # Same-kind narrowing (float64 into float32) is allowed
    if result.is_event != target.is_event or result.dtype.is_int != target.dtype.is_int:
        raise DTypeError(
            f"cannot store {result.dtype.value} result in {target.dtype.value} target"
        )
    if result.unit != target.unit and target.is_view:
        raise ViewError(f"in-place {kernel.name} would change the unit of a view")
    if result.has_variances and not target.has_variances and target.is_view:
        raise ViewError(f"in-place {kernel.name} would add variances to a view")

    if target.is_event:
        _write_events(target, result)
    else:
        np.copyto(target._raw_values(), result.values, casting="unsafe")
        if result.has_variances:
            if target.has_variances:
                np.copyto(target._raw_variances(), result.variances, casting="unsafe")
            else:
                target._variances = result.variances.astype(target.dtype.numpy)
    if not target.is_view:
        target._unit = result.unit


def _write_events(target: Variable, result: Variable) -> None:
    storage = target.event_storage
    positions = storage.positions(target.list_ids)
    storage.flat[positions] = result.event_storage.flat
    if result.has_variances:
        if target.has_variances:
            target.event_variance_storage.flat[positions] = result.event_variance_storage.flat
        else:
            flat = np.zeros_like(storage.flat)
            flat[positions] = result.event_variance_storage.flat
            target._event_variances = storage.with_flat(flat)
