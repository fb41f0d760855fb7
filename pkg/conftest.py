"""
Shared pytest fixtures.

The "mixed rank" dataset has four items of decreasing rank:
    a (x, y, z) with variances, b (y, z) with variances, c (x), d 0-D
with dimension coords x, z, a bin-edge coord y, an auxiliary string coord
"labels" on y and a scalar dataset attr.
"""

import sys
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.dataset import DataArray, Dataset
from src.events import make_event_variable
from src.variable import Variable, array, scalar

NX, NY, NZ = 4, 3, 2


def make_mixed_dataset(seed: int = 1) -> Dataset:
    rng = np.random.default_rng(seed)
    a = array(
        ["x", "y", "z"],
        rng.uniform(1.0, 2.0, (NX, NY, NZ)),
        unit="counts",
        variances=rng.uniform(0.01, 0.1, (NX, NY, NZ)),
    )
    b = array(
        ["y", "z"],
        rng.uniform(0.1, 0.5, (NY, NZ)),
        unit="counts",
        variances=rng.uniform(0.001, 0.01, (NY, NZ)),
    )
    c = array(["x"], rng.uniform(-1.0, 1.0, NX), unit="m")
    d = scalar(1.5, unit="s", variance=0.25)
    coords = {
        "x": array(["x"], np.arange(NX) * 0.5, unit="m"),
        "y": array(["y"], np.linspace(0.0, 3.0, NY + 1), unit="us"),
        "z": array(["z"], np.arange(NZ, dtype=np.int64), unit="dimensionless"),
        "labels": array(["y"], ["low", "mid", "high"]),
    }
    return Dataset(
        {"a": DataArray(a), "b": DataArray(b), "c": DataArray(c), "d": DataArray(d)},
        coords=coords,
        attrs={"attr": scalar(42.0, unit="K")},
    )


def random_layouts(
    rng: np.random.Generator,
    labels: str = "xyz",
    max_rank: int = 3,
    max_extent: int = 4,
) -> Iterator[Tuple[List[str], Tuple[int, ...]]]:
    """Endless stream of (dims, shape) with random label subsets and order."""
    while True:
        rank = int(rng.integers(0, max_rank + 1))
        dims = [str(label) for label in rng.permutation(list(labels))[:rank]]
        shape = tuple(int(n) for n in rng.integers(1, max_extent + 1, rank))
        yield dims, shape


SPECIAL_FLOATS = (np.nan, np.inf, -np.inf, -0.0, 5e-324, 1.7976931348623157e308)
UNITS = ("m", "us", "counts", "dimensionless", "K", "m^2", "angstrom")


def random_floats(rng: np.random.Generator, shape: Tuple[int, ...], special: bool = True) -> np.ndarray:
    """Normal draws over several decades, with special values mixed in."""
    size = int(np.prod(shape))
    flat = rng.normal(size=size) * 10.0 ** rng.integers(-8, 9, size)
    if special:
        picks = rng.random(size) < 0.2
        flat[picks] = rng.choice(SPECIAL_FLOATS, int(picks.sum()))
    return flat.reshape(shape)


def random_variances(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    size = int(np.prod(shape))
    flat = np.abs(rng.normal(size=size))
    picks = rng.random(size) < 0.1
    flat[picks] = rng.choice((np.nan, np.inf, 0.0), int(picks.sum()))
    return flat.reshape(shape)


def random_dense(rng: np.random.Generator, dims: List[str], shape: Tuple[int, ...]) -> Variable:
    """Dense Variable of a random element type, unit and variance presence."""
    kind = str(rng.choice(["float64", "float32", "int64", "bool"]))
    if kind == "int64":
        return array(dims, rng.integers(-(2 ** 62), 2 ** 62, shape), unit=str(rng.choice(UNITS)))
    if kind == "bool":
        return array(dims, rng.random(shape) < 0.5)
    variances = random_variances(rng, shape) if rng.random() < 0.5 else None
    values = random_floats(rng, shape, special=kind == "float64")
    return array(dims, values, unit=str(rng.choice(UNITS)), variances=variances, dtype=kind)


def random_dim_coords(rng: np.random.Generator, dims: List[str], shape: Tuple[int, ...]) -> dict:
    """Point or bin-edge coord for a random subset of dims."""
    coords = {}
    for dim, n in zip(dims, shape):
        if rng.random() < 0.3:
            continue
        extent = n + int(rng.integers(0, 2))
        coords[dim] = array([dim], np.sort(rng.normal(size=extent)), unit=str(rng.choice(UNITS)))
    if dims and rng.random() < 0.3:
        coords["label"] = array([dims[0]], [f"l\u00e4bel {i}" for i in range(shape[0])])
    return coords


def random_attrs(rng: np.random.Generator) -> dict:
    return {
        f"attr{i}": scalar(float(random_floats(rng, ())), unit=str(rng.choice(UNITS)))
        for i in range(int(rng.integers(0, 3)))
    }


def random_data_array(rng: np.random.Generator) -> DataArray:
    """Dense DataArray with random layout, coords, edges and attrs."""
    dims, shape = next(random_layouts(rng))
    return DataArray(
        random_dense(rng, dims, shape),
        coords=random_dim_coords(rng, dims, shape),
        attrs=random_attrs(rng),
        name=str(rng.choice(["", "sample", "d-spacing \u00c5"])),
    )


def random_event_data_array(rng: np.random.Generator) -> DataArray:
    """Event DataArray with weights carrying variances and a matching tof coord."""
    dims, shape = next(random_layouts(rng, labels="xy", max_rank=2, max_extent=3))
    if not dims:
        dims, shape = ["x"], (1,)
    lengths = [int(n) for n in rng.integers(0, 5, int(np.prod(shape)))]
    weights = make_event_variable(
        list(zip(dims, shape)),
        "counts",
        [random_floats(rng, (n,), special=False) for n in lengths],
        variances=[random_variances(rng, (n,)) for n in lengths],
    )
    tof = make_event_variable(list(zip(dims, shape)), "us", [random_floats(rng, (n,)) for n in lengths])
    coords = {"tof": tof, **random_dim_coords(rng, dims, shape)}
    return DataArray(weights, coords=coords, attrs=random_attrs(rng), name="events")


def random_dataset(rng: np.random.Generator) -> Dataset:
    """Dataset of dense items over shared, consistently sized dims."""
    sizes = {d: int(n) for d, n in zip("xyz", rng.integers(1, 4, 3))}
    items = {}
    for name in ["a", "b", "c"][: int(rng.integers(0, 4))]:
        rank = int(rng.integers(0, 4))
        dims = [str(d) for d in rng.permutation(list(sizes))[:rank]]
        items[name] = DataArray(random_dense(rng, dims, tuple(sizes[d] for d in dims)), attrs=random_attrs(rng))
    dims = sorted(sizes)
    return Dataset(
        items,
        coords=random_dim_coords(rng, dims, tuple(sizes[d] for d in dims)),
        attrs=random_attrs(rng),
    )


@pytest.fixture
def mixed_dataset() -> Dataset:
    return make_mixed_dataset()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def plain_output() -> Iterator[None]:
    """Render without ANSI codes, restoring the previous setting afterwards."""
    from lib.terminal_utils import color_enabled, set_color_enabled

    previous = color_enabled()
    set_color_enabled(False)
    yield
    set_color_enabled(previous)
