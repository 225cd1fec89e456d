"""Published reference figures for the VCU128 / 28nm activation designs.

These constants are echoed in reports for side-by-side comparison and are
never computed by this package. Synthesis-dependent columns (LUT, FF,
power, area, energy) are outside what a behavioral model can predict;
expansion term counts and pipeline latencies are the cells the model is
expected to reproduce or approach.
"""

from __future__ import annotations

from .activations import Family

# Expansion table: family -> range half-width -> (terms, max polynomial
# degree, variable). The wavelet row counts the composite polynomial's
# coefficient slots.
EXPANSION_TABLE = {
    Family.SINE: {2.0: (4, 7, "x"), 1.0: (2, 3, "x")},
    Family.GAUSSIAN: {2.0: (16, 30, "x"), 1.0: (6, 10, "x")},
    Family.WIRE: {2.0: (31, 60, "x"), 1.0: (7, 12, "x")},
    Family.FINER: {2.0: (10, 19, "z"), 1.0: (4, 7, "z")},
    Family.SINC: {2.0: (4, 6, "x"), 1.0: (3, 4, "x")},
    Family.QUAD: {2.0: (2, 2, "x"), 1.0: (2, 2, "x")},
}

# Activation module implementations on the VCU128 at 100 MHz:
# family -> range -> dict of published columns.
AF_FPGA_TABLE = {
    Family.SINE: {
        2.0: {"lut": 3868, "ff": 477, "dsp": 14, "power_mw": 112, "latency_ns": 60},
        1.0: {"lut": 1312, "ff": 223, "dsp": 6, "power_mw": 35, "latency_ns": 40},
    },
    Family.GAUSSIAN: {
        2.0: {"lut": 18520, "ff": 1790, "dsp": 58, "power_mw": 520, "latency_ns": 170},
        1.0: {"lut": 5835, "ff": 535, "dsp": 18, "power_mw": 153, "latency_ns": 70},
    },
    Family.WIRE: {
        2.0: {"lut": 37069, "ff": 3682, "dsp": 120, "power_mw": 1055, "latency_ns": 320},
        1.0: {"lut": 7158, "ff": 691, "dsp": 24, "power_mw": 196, "latency_ns": 80},
    },
    Family.FINER: {
        2.0: {"lut": 12150, "ff": 1334, "dsp": 40, "power_mw": 365, "latency_ns": 140},
        1.0: {"lut": 4487, "ff": 572, "dsp": 16, "power_mw": 127, "latency_ns": 80},
    },
    Family.SINC: {
        2.0: {"lut": 3433, "ff": 314, "dsp": 12, "power_mw": 85, "latency_ns": 50},
        1.0: {"lut": 2206, "ff": 189, "dsp": 8, "power_mw": 49, "latency_ns": 50},
    },
    Family.QUAD: {
        2.0: {"lut": 1258, "ff": 97, "dsp": 2, "power_mw": 28, "latency_ns": 20},
        1.0: {"lut": 1258, "ff": 97, "dsp": 2, "power_mw": 28, "latency_ns": 20},
    },
}

# 28nm synthesis at 1 GHz, processing one 768x512 image:
# family -> range -> published area/power/energy columns.
AF_ASIC_TABLE = {
    Family.SINE: {
        2.0: {"area_um2": 8415, "static_mw": 6.83, "dynamic_mw": 23.30, "energy_uj": 36.79},
        1.0: {"area_um2": 3421, "static_mw": 3.25, "dynamic_mw": 8.97, "energy_uj": 14.16},
    },
    Family.GAUSSIAN: {
        2.0: {"area_um2": 37099, "static_mw": 20.60, "dynamic_mw": 112.25, "energy_uj": 177.30},
        1.0: {"area_um2": 11274, "static_mw": 8.10, "dynamic_mw": 31.48, "energy_uj": 49.72},
    },
    Family.WIRE: {
        2.0: {"area_um2": 74536, "static_mw": 32.00, "dynamic_mw": 228.75, "energy_uj": 362.19},
        1.0: {"area_um2": 14287, "static_mw": 10.10, "dynamic_mw": 40.45, "energy_uj": 63.89},
    },
    Family.FINER: {
        2.0: {"area_um2": 25765, "static_mw": 15.34, "dynamic_mw": 69.45, "energy_uj": 109.60},
        1.0: {"area_um2": 9918, "static_mw": 7.19, "dynamic_mw": 27.25, "energy_uj": 43.04},
    },
    Family.SINC: {
        2.0: {"area_um2": 6582, "static_mw": 5.12, "dynamic_mw": 16.55, "energy_uj": 26.10},
        1.0: {"area_um2": 4092, "static_mw": 3.23, "dynamic_mw": 9.50, "energy_uj": 15.00},
    },
    Family.QUAD: {
        2.0: {"area_um2": 1914, "static_mw": 1.54, "dynamic_mw": 6.14, "energy_uj": 9.69},
        1.0: {"area_um2": 1914, "static_mw": 1.54, "dynamic_mw": 6.14, "energy_uj": 9.69},
    },
}

# Accelerator cost breakdown (five-layer sine-activated instance, VCU128 at
# 100 MHz); latency column in ns.
ACCEL_BREAKDOWN_NS = {
    "mac_array": 3760,
    "memory_control": 80,
    "storage": 40,
    "af": 80,
    "others": 10280,
    "total": 14240,
}

ACCEL_BREAKDOWN_RESOURCES = {
    "mac_array": {"lut": 244759, "ff": 442268, "dsp": 5130, "lutram": 14394, "bram": 0, "power_mw": 6350},
    "memory_control": {"lut": 60, "ff": 55, "dsp": 0, "lutram": 0, "bram": 0, "power_mw": 10},
    "storage": {"lut": 0, "ff": 0, "dsp": 0, "lutram": 0, "bram": 231, "power_mw": 615},
    "af": {"lut": 5032, "ff": 388, "dsp": 8, "lutram": 0, "bram": 0, "power_mw": 112},
    "others": {"lut": 525, "ff": 99015, "dsp": 0, "lutram": 396, "bram": 0, "power_mw": 455},
    "total": {"lut": 250376, "ff": 541726, "dsp": 5138, "lutram": 14790, "bram": 231, "power_mw": 7542},
}

# Published Kodak reconstruction quality (PSNR, dB) for full-scale training;
# reference-only, not a target this desk-scale trainer reproduces.
KODAK_PSNR_DB = {
    "siren": {"kodak01": 30.52, "kodak02": 35.21, "kodak03": 36.26, "kodak04": 34.52},
    "wire": {"kodak01": 30.95, "kodak02": 35.61, "kodak03": 37.96, "kodak04": 35.78},
    "finer": {"kodak01": 35.17, "kodak02": 37.90, "kodak03": 40.87, "kodak04": 38.65},
    "gaussian": {"kodak01": 29.94, "kodak02": 34.20, "kodak03": 37.91, "kodak04": 34.36},
    "quad": {"kodak01": 32.58, "kodak02": 36.21, "kodak03": 38.86, "kodak04": 36.32},
}

# Rounded leading Fourier coefficient as published (b_1 = 32/pi**3). The
# published third-harmonic value 0.129 disagrees with the closed form
# 32/(27*pi**3) ~= 0.0382 (0.129 is b_1/8, an n**3 slip); the quadrature
# oracle sides with the closed form, so reports carry both.
FOURIER_B1_PUBLISHED = 1.032
FOURIER_B3_PUBLISHED = 0.129


def latency_cycles_reference(family: Family, range_half_width: float) -> int:
    """Published activation latency expressed in cycles at 100 MHz."""
    return AF_FPGA_TABLE[family][range_half_width]["latency_ns"] // 10
