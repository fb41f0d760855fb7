"""
Reduction Demo - Synthetic Event Reduction Pipeline

Generates two seeded sets of detector events and runs a complete reduction:

    1. sample and vanadium events: per-pixel Poisson event counts, tof drawn
       from a theta-dependent Gaussian mixture (sample) or a broad incident
       profile truncated to the tof range (vanadium)
    2. per-pixel linear tof correction (scale, then offset) on the events
    3. histogram over fixed tof edges
    4. Dataset {sample, vanadium}, summed over spectrum
    5. normalization: sample / vanadium (dimensionless)
    6. sample events grouped into theta bins, flattened and histogrammed

Every intermediate container is saved as JSON; the normalized spectrum and
the theta-tof map are exported as plots. Output is a pure function of the
configuration, so repeated runs write byte-identical files.

Usage:
    from apps.reduction_demo import ReductionDemo
    from src.config import DemoConfig

    result = ReductionDemo(DemoConfig(pixels=100, events=10000, seed=7)).run()
    print(result.normalized.unit)
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from lib.plot_export import emit_plot
from src.config import DemoConfig
from src.dataset import DataArray, Dataset, ds_sum
from src.events import event_dense_op, event_variable_from_flat, histogram, make_event_data_array
from src.groupby import gb_flatten, groupby
from src.serialization import save
from src.units import dimensionless, rad, us
from src.variable import Variable, array

logger = logging.getLogger(__name__)

# Relative positions of the sample peaks inside the tof range
PEAK_CENTERS = (0.3, 0.6)
PEAK_WIDTH = 0.03
PEAK_WEIGHT = 0.6
# Peak positions grow by this fraction across the theta range
THETA_SHIFT = 0.4
# Incident spectrum seen by vanadium, relative to the tof range
VANADIUM_CENTER = 0.4
VANADIUM_WIDTH = 0.35

SCALE_SPREAD = 0.05
OFFSET_SPREAD = 50.0  # us


@dataclass
class DemoResult:
    """
    Outputs of one pipeline run.

    Attributes:
        normalized: sample / vanadium summed over spectrum, over tof
        theta_histogram: sample counts over (theta, tof)
        files: Every written file in order
    """
    normalized: DataArray
    theta_histogram: DataArray
    files: List[Path] = field(default_factory=list)


class ReductionDemo:
    """
    Seeded synthetic reduction pipeline.

    Args:
        config: Pipeline settings
        on_file: Optional callback invoked with every written path
    """

    def __init__(self, config: DemoConfig, on_file: Optional[Callable[[Path], None]] = None):
        self.config = config
        self.on_file = on_file
        self.out_dir = Path(config.out_dir)
        self._files: List[Path] = []

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------

    def theta_values(self) -> np.ndarray:
        """Scattering angle at the centre of every pixel."""
        c = self.config
        step = (c.theta_max - c.theta_min) / c.pixels
        return c.theta_min + (np.arange(c.pixels) + 0.5) * step

    def tof_edges(self) -> Variable:
        c = self.config
        return array(["tof"], np.linspace(c.tof_min, c.tof_max, c.tof_bins + 1), unit=us)

    def theta_edges(self) -> Variable:
        c = self.config
        return array(["theta"], np.linspace(c.theta_min, c.theta_max, c.theta_bins + 1), unit=rad)

    def _pixel_fraction(self) -> np.ndarray:
        n = self.config.pixels
        return np.arange(n, dtype=np.float64) / max(n - 1, 1)

    # ------------------------------------------------------------------
    # Event generation
    # ------------------------------------------------------------------

    def generate(self, name: str, seed: int, vanadium: bool) -> DataArray:
        """
        Generate one set of events.

        Args:
            name: Name of the DataArray
            seed: Random seed
            vanadium: Draw tof from the smooth incident profile instead of
                the peak mixture
        """
        c = self.config
        rng = np.random.default_rng(seed)
        lengths = rng.poisson(c.events / c.pixels, size=c.pixels).astype(np.int64)
        total = int(lengths.sum())
        span = c.tof_max - c.tof_min

        if vanadium:
            tof = self._incident_profile(rng, total)
        else:
            theta = self.theta_values()
            relative = (theta - c.theta_min) / (c.theta_max - c.theta_min)
            shift = np.repeat(1.0 + THETA_SHIFT * relative, lengths)
            first = rng.random(total) < PEAK_WEIGHT
            centers = np.where(first, PEAK_CENTERS[0], PEAK_CENTERS[1]) * shift
            tof = c.tof_min + span * (centers + PEAK_WIDTH * rng.standard_normal(total))

        events = event_variable_from_flat([("spectrum", c.pixels)], us, tof.astype(np.float64), lengths)
        dense = {
            "spectrum": array(["spectrum"], np.arange(c.pixels, dtype=np.int64)),
            "theta": array(["spectrum"], self.theta_values(), unit=rad),
        }
        logger.debug(f"generated {total} {name} events over {c.pixels} pixels")
        return make_event_data_array({"tof": events}, dense, name=name)

    def _incident_profile(self, rng: np.random.Generator, total: int) -> np.ndarray:
        """Broad Gaussian over the tof range; draws outside the range are redrawn."""
        c = self.config
        span = c.tof_max - c.tof_min
        tof = np.empty(total, dtype=np.float64)
        pending = np.arange(total)
        while pending.size:
            draws = c.tof_min + span * (VANADIUM_CENTER + VANADIUM_WIDTH * rng.standard_normal(pending.size))
            tof[pending] = draws
            pending = pending[(draws < c.tof_min) | (draws >= c.tof_max)]
        return tof

    def correct_tof(self, da: DataArray) -> DataArray:
        """Per-pixel linear tof correction: tof * scale + offset."""
        fraction = self._pixel_fraction()
        scale = array(["spectrum"], 1.0 - SCALE_SPREAD * fraction, unit=dimensionless)
        offset = array(["spectrum"], OFFSET_SPREAD * fraction, unit=us)
        scaled = event_dense_op(da, scale, "multiply", target="tof")
        return event_dense_op(scaled, offset, "add", target="tof")

    # ------------------------------------------------------------------
    # Pipeline
    # ------------------------------------------------------------------

    def _save(self, x, stem: str) -> None:
        path = self.out_dir / f"{stem}.json"
        save(x, path)
        self._record(path)

    def _record(self, path: Path) -> None:
        self._files.append(path)
        if self.on_file is not None:
            self.on_file(path)

    def run(self) -> DemoResult:
        """
        Run the full pipeline and write all outputs.

        Returns:
            DemoResult with the two final containers and the written files
        """
        c = self.config
        self._files = []
        self.out_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            f"demo: {c.pixels} pixels, ~{c.events} events, seed {c.seed}, output {self.out_dir}"
        )

        sample = self.generate("sample", c.seed, vanadium=False)
        vanadium = self.generate("vanadium", c.seed + c.vanadium_seed_offset, vanadium=True)
        self._save(sample, "sample_events")
        self._save(vanadium, "vanadium_events")

        sample = self.correct_tof(sample)
        vanadium = self.correct_tof(vanadium)
        self._save(sample, "sample_corrected")
        self._save(vanadium, "vanadium_corrected")

        tof_edges = self.tof_edges()
        histograms = Dataset({
            "sample": histogram(sample, tof_edges),
            "vanadium": histogram(vanadium, tof_edges),
        })
        self._save(histograms, "histograms")

        summed = ds_sum(histograms, "spectrum")
        self._save(summed, "summed")

        normalized = summed["sample"] / summed["vanadium"]
        normalized.name = "normalized"
        self._save(normalized, "normalized")

        grouped = gb_flatten(groupby(sample, "theta", bins=self.theta_edges()))
        self._save(grouped, "theta_events")

        theta_histogram = histogram(grouped, tof_edges)
        theta_histogram.name = "theta_histogram"
        self._save(theta_histogram, "theta_histogram")

        for path in emit_plot(normalized, self.out_dir):
            self._record(path)
        for path in emit_plot(theta_histogram, self.out_dir):
            self._record(path)

        logger.info(f"demo: wrote {len(self._files)} files")
        return DemoResult(normalized, theta_histogram, list(self._files))
