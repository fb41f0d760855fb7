"""
Serialization Module - Self-Describing JSON Files

Saves and loads DataArrays and Datasets as JSON documents (version 1).

Variable layout:
    {
      "dims": [["x", 3], ["y", 2]],
      "unit": "m/s",
      "dtype": "float64",
      "values": [...],                      # flat, row-major
      "variances": [...]                    # optional
    }

Event-list Variables store {"offsets": [...], "flat": [...]} for values and
variances. Floats are written with their shortest round-trip representation;
NaN and infinities are written as the strings "nan", "inf" and "-inf".

Example:
    from src.serialization import save, load

    save(dataset, "run.json")
    same = load("run.json")
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

import numpy as np

from .dataset import DataArray, Dataset, ds_set
from .dtypes import DType
from .errors import FormatError, LarrError, UnitError, ValidationError
from .event_storage import EventStorage
from .units import format_unit, parse_unit
from .variable import Dims, Variable, copy

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

_SPECIAL_FLOATS = {"nan": math.nan, "inf": math.inf, "-inf": -math.inf}


def _encode_float(x: float) -> Union[float, str]:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _encode_array(arr: np.ndarray, dtype: DType) -> List[Any]:
    items = np.ascontiguousarray(arr).ravel().tolist()
    if dtype.is_float:
        return [_encode_float(x) for x in items]
    return items


def encode_variable(v: Variable) -> Dict[str, Any]:
    """Document form of a Variable or view."""
    v = copy(v) if v.is_view else v
    doc: Dict[str, Any] = {
        "dims": [[label, extent] for label, extent in v.layout.pairs()],
        "unit": format_unit(v.unit),
        "dtype": v.dtype.value,
    }
    element = v.dtype.element
    if v.is_event:
        storage = v.event_storage
        doc["values"] = {
            "offsets": storage.offsets.tolist(),
            "flat": _encode_array(storage.flat, element),
        }
        if v.has_variances:
            doc["variances"] = {
                "offsets": storage.offsets.tolist(),
                "flat": _encode_array(v.event_variance_storage.flat, element),
            }
        return doc
    doc["values"] = _encode_array(v.values, element)
    if v.has_variances:
        doc["variances"] = _encode_array(v.variances, element)
    return doc


def _encode_map(variables: Mapping[str, Variable]) -> Dict[str, Any]:
    return {name: encode_variable(v) for name, v in variables.items()}


def to_document(x: Union[DataArray, Dataset]) -> Dict[str, Any]:
    """Build the JSON-ready document for a DataArray or Dataset."""
    if isinstance(x, DataArray):
        return {
            "version": FORMAT_VERSION,
            "data_array": {
                "name": x.name,
                "data": encode_variable(x.data),
                "coords": _encode_map(x.coords),
                "attrs": _encode_map(x.attrs),
            },
        }
    if isinstance(x, Dataset):
        return {
            "version": FORMAT_VERSION,
            "dataset": {
                "coords": _encode_map(x.coords),
                "attrs": _encode_map(x.attrs),
                "items": {
                    name: {
                        "data": encode_variable(x.item(name).data),
                        "attrs": _encode_map(x.item(name).attrs),
                    }
                    for name in x
                },
            },
        }
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _require(doc: Any, key: str, kind: type, location: str) -> Any:
    if not isinstance(doc, dict):
        raise FormatError("expected an object", location)
    if key not in doc:
        raise FormatError(f"missing field {key!r}", location)
    value = doc[key]
    if not isinstance(value, kind):
        raise FormatError(f"field {key!r} must be {kind.__name__}", f"{location}.{key}")
    return value


def _decode_scalars(items: Any, dtype: DType, location: str) -> np.ndarray:
    if not isinstance(items, list):
        raise FormatError("expected an array", location)
    element = dtype.element
    if element.is_float:
        decoded = []
        for i, x in enumerate(items):
            if isinstance(x, str):
                if x not in _SPECIAL_FLOATS:
                    raise FormatError(f"invalid float {x!r}", f"{location}[{i}]")
                decoded.append(_SPECIAL_FLOATS[x])
            elif isinstance(x, (int, float)) and not isinstance(x, bool):
                decoded.append(float(x))
            else:
                raise FormatError(f"invalid float {x!r}", f"{location}[{i}]")
        return np.array(decoded, dtype=element.numpy)
    if element.is_int:
        for i, x in enumerate(items):
            if not isinstance(x, int) or isinstance(x, bool):
                raise FormatError(f"invalid integer {x!r}", f"{location}[{i}]")
        try:
            return np.array(items, dtype=element.numpy).reshape(-1)
        except OverflowError:
            raise FormatError(f"integer out of range for {element.value}", location) from None
    if element is DType.BOOL:
        for i, x in enumerate(items):
            if not isinstance(x, bool):
                raise FormatError(f"invalid boolean {x!r}", f"{location}[{i}]")
        return np.array(items, dtype=bool).reshape(-1)
    for i, x in enumerate(items):
        if not isinstance(x, str):
            raise FormatError(f"invalid string {x!r}", f"{location}[{i}]")
    out = np.empty(len(items), dtype=object)
    out[:] = items
    return out


def _decode_dims(items: Any, location: str) -> Dims:
    if not isinstance(items, list):
        raise FormatError("dims must be an array", location)
    pairs = []
    for i, pair in enumerate(items):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not isinstance(pair[0], str)
            or not isinstance(pair[1], int)
            or isinstance(pair[1], bool)
        ):
            raise FormatError("dims entries must be [label, extent]", f"{location}[{i}]")
        pairs.append((pair[0], pair[1]))
    return Dims.from_pairs(pairs)


def _decode_events(payload: Any, dtype: DType, location: str) -> EventStorage:
    offsets = _require(payload, "offsets", list, location)
    for i, x in enumerate(offsets):
        if not isinstance(x, int) or isinstance(x, bool):
            raise FormatError(f"invalid offset {x!r}", f"{location}.offsets[{i}]")
    flat = _decode_scalars(_require(payload, "flat", list, location), dtype, f"{location}.flat")
    return EventStorage(flat, np.array(offsets, dtype=np.int64))


def decode_variable(doc: Any, location: str = "variable") -> Variable:
    """
    Variable from its document form.

    Raises:
        FormatError: If the document is malformed
        ValidationError: If the decoded Variable violates an invariant
    """
    dtype_name = _require(doc, "dtype", str, location)
    try:
        dtype = DType(dtype_name)
    except ValueError:
        raise FormatError(f"unknown dtype {dtype_name!r}", f"{location}.dtype") from None
    unit_text = _require(doc, "unit", str, location)
    try:
        unit = parse_unit(unit_text)
    except UnitError as e:
        raise FormatError(str(e), f"{location}.unit") from None
    try:
        layout = _decode_dims(_require(doc, "dims", list, location), f"{location}.dims")
    except LarrError as e:
        if isinstance(e, FormatError):
            raise
        raise ValidationError([str(e)], f"{location}.dims") from None
    if "values" not in doc:
        raise FormatError("missing field 'values'", location)

    try:
        if dtype.is_event:
            storage = _decode_events(doc["values"], dtype, f"{location}.values")
            var_storage = None
            if "variances" in doc:
                var_storage = _decode_events(doc["variances"], dtype, f"{location}.variances")
            if storage.count != layout.volume:
                raise ValidationError(
                    [f"{storage.count} event lists for dims {layout}"], location
                )
            if var_storage is not None and not np.array_equal(var_storage.offsets, storage.offsets):
                raise ValidationError(["variance offsets differ from value offsets"], location)
            ids = np.arange(storage.count, dtype=np.int64).reshape(layout.shape)
            variable = Variable(layout, unit, dtype, ids, None, storage, var_storage)
        else:
            values = _decode_scalars(doc["values"], dtype, f"{location}.values")
            variances = None
            if "variances" in doc:
                variances = _decode_scalars(doc["variances"], dtype, f"{location}.variances")
            for what, arr in (("values", values), ("variances", variances)):
                if arr is not None and arr.size != layout.volume:
                    raise ValidationError(
                        [f"{arr.size} {what} for dims {layout} with {layout.volume} elements"],
                        location,
                    )
            variable = Variable(
                layout,
                unit,
                dtype,
                values.reshape(layout.shape),
                None if variances is None else variances.reshape(layout.shape),
            )
    except ValidationError as e:
        raise ValidationError(e.problems, location) from None
    problems = variable.validate()
    if problems:
        raise ValidationError(problems, location)
    return variable


def _decode_map(doc: Any, location: str) -> Dict[str, Variable]:
    if not isinstance(doc, dict):
        raise FormatError("expected an object", location)
    return {name: decode_variable(v, f"{location}.{name}") for name, v in doc.items()}


def _build(location: str, fn, *args, **kwargs):
    """Run a container constructor, reporting invariant violations as ValidationError."""
    try:
        return fn(*args, **kwargs)
    except (FormatError, ValidationError):
        raise
    except LarrError as e:
        raise ValidationError([str(e)], location) from None


def from_document(doc: Any) -> Union[DataArray, Dataset]:
    """
    Rebuild a DataArray or Dataset from its document.

    Raises:
        FormatError: If the document is malformed
        ValidationError: If a container invariant is violated
    """
    version = _require(doc, "version", int, "document")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported version {version}", "document.version")
    if "data_array" in doc:
        body = _require(doc, "data_array", dict, "document")
        loc = "data_array"
        name = body.get("name", "")
        if not isinstance(name, str):
            raise FormatError("field 'name' must be str", f"{loc}.name")
        data = decode_variable(body.get("data"), f"{loc}.data")
        coords = _decode_map(body.get("coords", {}), f"{loc}.coords")
        attrs = _decode_map(body.get("attrs", {}), f"{loc}.attrs")
        return _build(loc, DataArray, data, coords, attrs, name=name)
    if "dataset" in doc:
        body = _require(doc, "dataset", dict, "document")
        loc = "dataset"
        coords = _decode_map(body.get("coords", {}), f"{loc}.coords")
        attrs = _decode_map(body.get("attrs", {}), f"{loc}.attrs")
        items = _require(body, "items", dict, loc)
        ds = _build(loc, Dataset, coords=coords, attrs=attrs)
        for name, item in items.items():
            item_loc = f"{loc}.items.{name}"
            data = decode_variable(_require(item, "data", dict, item_loc), f"{item_loc}.data")
            item_attrs = _decode_map(item.get("attrs", {}), f"{item_loc}.attrs")
            da = _build(item_loc, DataArray, data, attrs=item_attrs)
            _build(item_loc, ds_set, ds, name, da)
        problems = ds.validate()
        if problems:
            raise ValidationError(problems, loc)
        return ds
    raise FormatError("document holds neither 'data_array' nor 'dataset'", "document")


def save(x: Union[DataArray, Dataset], path: Union[str, Path]) -> None:
    """Write x to path as a JSON document."""
    path = Path(path)
    text = json.dumps(to_document(x), allow_nan=False, separators=(",", ":"))
    path.write_text(text + "\n", encoding="utf-8")
    logger.debug(f"saved {type(x).__name__} to {path}")


def load(path: Union[str, Path]) -> Union[DataArray, Dataset]:
    """
    Read a DataArray or Dataset from path.

    Raises:
        FileNotFoundError: If path does not exist
        FormatError: If the file is not a well-formed document
        ValidationError: If the content violates a container invariant
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, f"line {e.lineno} column {e.colno}") from None
    logger.debug(f"loaded document from {path}")
    return from_document(doc)
