"""Behavioral model of the fully pipelined coordinate-to-pixel accelerator.

Datapath per affine layer: a parallel lane multiplier bank (one product per
input feature), an adjacent-pair adder tree over lanes padded to a power of
two, a bias add and an omega0 scale, then the activation module for every
layer but the last. All value-producing arithmetic is binary32; outputs are
bit-identical to ``nets.forward_strict32`` run with the same activation
plan, by construction of the shared operation order.

Cycle accounting is an additive pipeline-depth model: every component
contributes its depth to the fill latency, and one coordinate enters per
clock afterwards (initiation interval 1), so

    total_cycles = fill_cycles + pixels.

Published figures for the VCU128 reference design are echoed next to the
model's own numbers in reports and are never recomputed; note that the
reference design's activation row was measured with sine modules, while
this model accounts whichever family is configured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, nets, pipeline, taylor
from .activations import Family
from .nets import MlpModel


@dataclass(frozen=True)
class ActivationPlan:
    """Binary32 activation recipe for one layer crossing."""

    family: Family
    degrees: tuple[int, ...]
    coeffs: tuple[float, ...]
    wrap: bool
    stage_cycles: int

    def make_fn(self, kernels):
        degrees = np.asarray(self.degrees, dtype=np.int64)
        coeffs = np.asarray(self.coeffs, dtype=np.float32)
        fam = self.family.value

        def fn(u: np.ndarray) -> np.ndarray:
            return kernels.af32(fam, u, degrees, coeffs, self.wrap)

        return fn


def activation_plan(family: Family, with_wrap: bool = True,
                    range_half_width: float = 2.0) -> ActivationPlan:
    """Plan from the family's accepted minimal series; the quadratic takes
    the optional range-reduction stage (needed whenever pre-activations can
    leave (-2, 2])."""
    series = taylor.min_terms(family, range_half_width)
    wrap = with_wrap and family is Family.QUAD
    schedule = pipeline.build_schedule(series, with_wrap=wrap)
    return ActivationPlan(family, series.degrees, series.values, wrap, len(schedule))


@dataclass(frozen=True)
class AcceleratorConfig:
    af_plan: ActivationPlan
    mac_width: int = 256
    adder_tree_inputs: int = 256
    clock_mhz: float = 100.0

    def __post_init__(self):
        if self.mac_width != self.adder_tree_inputs:
            raise ValueError("MAC width and adder tree inputs must match")
        if self.clock_mhz <= 0:
            raise ValueError("clock must be positive")


@dataclass
class MemoryMap:
    dims: tuple[int, ...]
    family: Family
    omega0_first: float
    omega0_hidden: float
    weight_rom: list[np.ndarray]
    bias_rom: list[np.ndarray]
    intermediate_ram: list[np.ndarray | None]
    result_ram: np.ndarray | None

    @property
    def n_layers(self) -> int:
        return len(self.weight_rom)

    @property
    def n_af_crossings(self) -> int:
        return self.n_layers - 1

    def as_model(self) -> MlpModel:
        return MlpModel(self.dims, self.weight_rom, self.bias_rom, self.family,
                        self.omega0_first, self.omega0_hidden)


def load_model(path, mac_width: int = 256) -> MemoryMap:
    """Read a model container into ROM images, checking lane capacity."""
    model = nets.load_model(path)
    if model.family not in (f for f in Family if f is not Family.RELU):
        raise ValueError(f"no activation module for family {model.family.value}")
    for i, d in enumerate(model.dims[:-1]):
        if d > mac_width:
            raise ValueError(
                f"layer {i} fan-in {d} exceeds the {mac_width}-lane MAC array")
    return MemoryMap(
        dims=model.dims,
        family=model.family,
        omega0_first=model.omega0_first,
        omega0_hidden=model.omega0_hidden,
        weight_rom=[np.ascontiguousarray(W, dtype=np.float32) for W in model.weights],
        bias_rom=[np.ascontiguousarray(b, dtype=np.float32) for b in model.biases],
        intermediate_ram=[None, None],
        result_ram=None,
    )


@dataclass(frozen=True)
class CycleReport:
    clock_mhz: float
    pixels: int
    initiation_interval: int
    fill_cycles: int
    total_cycles: int
    components: dict
    af_stages_per_crossing: int
    af_crossings: int

    @property
    def total_ns(self) -> float:
        return self.total_cycles * 1000.0 / self.clock_mhz

    def component_ns(self, name: str) -> float:
        return self.components[name] * 1000.0 / self.clock_mhz


def _tree_depth(fan_in: int, full_tree: int | None) -> int:
    width = full_tree if full_tree is not None else fan_in
    return max(1, math.ceil(math.log2(max(width, 2))))


def _cycle_components(cfg: AcceleratorConfig, mem: MemoryMap) -> dict:
    mac = 0
    for i, fan_in in enumerate(mem.dims[:-1]):
        # the input layer uses a reduced MAC array sized to the coordinate
        # dimensionality; linear layers always traverse the full tree
        depth = _tree_depth(fan_in, None if i == 0 else cfg.mac_width)
        mac += 1 + depth + 1          # lane multiply + tree + bias add
        if i < mem.n_layers - 1:
            mac += 1                  # omega0 scale feeding the AF module
    return {
        "mac_array": mac,
        "af": cfg.af_plan.stage_cycles * mem.n_af_crossings,
        "storage": mem.n_layers - 1,  # double-buffered intermediate writes
        "memory_control": 2,          # coordinate fetch + result store
        "others": 0,
    }


def run_inference(cfg: AcceleratorConfig, mem: MemoryMap, coords: np.ndarray):
    """Stream coordinates through the pipeline; returns (pixels, report)."""
    coords = np.asarray(coords)
    if coords.ndim != 2 or coords.shape[1] != mem.dims[0]:
        raise ValueError(f"coords must be (N, {mem.dims[0]})")
    if mem.family is not cfg.af_plan.family:
        raise ValueError("configured activation module does not match the model")
    af_fn = cfg.af_plan.make_fn(backend.kernels)
    h = np.ascontiguousarray(coords, dtype=np.float32)
    for i in range(mem.n_layers):
        acc = backend.kernels.linear_strict32(h, mem.weight_rom[i], mem.bias_rom[i])
        if i < mem.n_layers - 1:
            w0 = np.float32(mem.omega0_first if i == 0 else mem.omega0_hidden)
            u = (w0 * acc).astype(np.float32)
            h = np.asarray(af_fn(u), dtype=np.float32)
            mem.intermediate_ram[i % 2] = h
        else:
            h = acc
    mem.result_ram = h
    components = _cycle_components(cfg, mem)
    fill = sum(components.values())
    pixels = coords.shape[0]
    report = CycleReport(
        clock_mhz=cfg.clock_mhz,
        pixels=pixels,
        initiation_interval=1,
        fill_cycles=fill,
        # an empty run never fills the pipeline, so it costs nothing
        total_cycles=0 if pixels == 0 else fill + pixels,
        components=components,
        af_stages_per_crossing=cfg.af_plan.stage_cycles,
        af_crossings=mem.n_af_crossings,
    )
    return h, report


def cycle_report_summary(report: CycleReport) -> dict:
    """Component table with modeled cycles/ns next to the published
    reference breakdown (measured on the sine-activated instance)."""
    from .reference import ACCEL_BREAKDOWN_NS

    scale = 1000.0 / report.clock_mhz
    rows = []
    for name, cycles in report.components.items():
        rows.append({
            "component": name,
            "cycles": cycles,
            "ns": cycles * scale,
            "reference_ns": ACCEL_BREAKDOWN_NS.get(name),
        })
    return {
        "clock_mhz": report.clock_mhz,
        "pixels": report.pixels,
        "initiation_interval": report.initiation_interval,
        "fill_cycles": report.fill_cycles,
        "total_cycles": report.total_cycles,
        "total_ns": report.total_ns,
        "af_stages_per_crossing": report.af_stages_per_crossing,
        "af_crossings": report.af_crossings,
        "rows": rows,
        "reference_total_ns": ACCEL_BREAKDOWN_NS.get("total"),
        "reference_note": (
            "reference breakdown measured on the sine-activated VCU128 "
            "instance; modeled numbers use the configured activation"
        ),
    }
