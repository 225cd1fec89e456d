"""Stage schedules and resource estimates for the activation datapath.

A schedule is a list of pipeline stages, each holding at most one power
multiply, one coefficient multiply, and one two-input add. Stage counts
follow the unified layout:

* even-parity series with N terms: N+1 stages (coefficient multiplies start
  in stage S1, where the first power x**2 is already available);
* odd-parity series with N terms: N+2 stages (S1 extends the power chain to
  x**3 instead, so every later stage has its power one cycle early);
* the variable-period sine prepends two preprocessing stages (|x|+1, then
  multiply by x) to its odd schedule;
* the piecewise quadratic needs exactly two stages: x**2 together with 2x,
  then one branch-selected add. An optional range-reduction stage
  (w = x - 4*round(x/4)) can be prepended for inputs beyond (-2, 2].

Multiplications by coefficients equal to +-1 cost nothing in hardware (a
sign flip at most) and are left out of the schedule; the stage count is
unchanged because those stages still carry power multiplies or adds.
Latency is one clock per stage. The DSP estimate is
dsp_per_multiplier * (power + coefficient + preprocessing multiplies); the
raw multiplier count is always reported alongside it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .activations import Family
from .taylor import Parity, TaylorSeries, series_eval


class OpKind(enum.Enum):
    POWER_MUL = "power_mul"
    COEFF_MUL = "coeff_mul"
    PRE_MUL = "pre_mul"
    ABS_ADD = "abs_add"
    POLY_ADD = "poly_add"


@dataclass(frozen=True)
class StageOp:
    """One hardware operation: dst = fn(a, b) over named registers.

    fn is the executable semantic: mul, cmul (b is the constant), add, sub,
    branchadd (quadratic branch select), abs1 (|a|+1), wrapmul
    (4*round(a/4)).
    """

    kind: OpKind
    fn: str
    dst: str
    a: str
    b: str | float | None = None


@dataclass(frozen=True)
class PipelineStage:
    index: int
    ops: tuple[StageOp, ...]
    produces: str


@dataclass(frozen=True)
class ResourceEstimate:
    stages: int
    latency_cycles: int
    latency_ns: float
    fp_multipliers: int
    fp_adders: int
    dsp_estimate: int
    exact: bool
    clock_mhz: float
    dsp_per_multiplier: int


def _coeff_op(reg_in: str, dst: str, value: float) -> StageOp | None:
    if value == 1.0 or value == -1.0:
        return None  # sign flip only; the term register aliases the power
    return StageOp(OpKind.COEFF_MUL, "cmul", dst, reg_in, value)


def build_schedule(series: TaylorSeries, with_wrap: bool = False) -> list[PipelineStage]:
    """Build the stage list for an accepted (or exact) series."""
    if not series.coeffs:
        raise ValueError("empty series")
    if series.family is Family.QUAD:
        return _quad_schedule(with_wrap)
    if with_wrap:
        raise ValueError("range reduction applies to the quadratic only")
    if series.parity is Parity.EVEN:
        stages = _even_schedule(series)
    elif series.parity is Parity.ODD:
        stages = _odd_schedule(series)
    else:
        raise ValueError("mixed-parity schedules exist only for the quadratic")
    if series.family is Family.FINER:
        pre = [
            PipelineStage(-2, (StageOp(OpKind.ABS_ADD, "abs1", "a", "x"),), "|x| + 1"),
            PipelineStage(-1, (StageOp(OpKind.PRE_MUL, "mul", "z", "a", "x"),),
                          "z = (|x| + 1) * x"),
        ]
        return pre + stages
    return stages


def _term_reg(series: TaylorSeries, idx: int, pow_reg: str) -> tuple[str, list[StageOp]]:
    """Register holding term idx, plus the op that fills it (if any)."""
    d, c = series.coeffs[idx]
    if d == 0:
        return f"c{idx}", []  # constant, wired directly into the adder
    op = _coeff_op(pow_reg, f"t{idx}", c)
    if op is None:
        reg = pow_reg if c == 1.0 else f"-{pow_reg}"
        return reg, []
    return f"t{idx}", [op]


def _even_schedule(series: TaylorSeries) -> list[PipelineStage]:
    if series.coeffs[0][0] != 0:
        raise ValueError("even schedules expect a constant leading term")
    base = "z" if series.variable.value == "z" else "x"
    n = len(series.coeffs)
    maxd = series.max_degree
    stages = [PipelineStage(0, (StageOp(OpKind.POWER_MUL, "mul", "p2", base, base),),
                            f"{base}^2")]
    term_regs: dict[int, str] = {}
    term_regs[0], _ = _term_reg(series, 0, "")  # degree-0 constant
    for k in range(1, n + 1):
        ops: list[StageOp] = []
        made = []
        nxt = 2 * k + 2
        if k <= n - 1 and nxt <= maxd:
            ops.append(StageOp(OpKind.POWER_MUL, "mul", f"p{nxt}", f"p{nxt - 2}", "p2"))
            made.append(f"{base}^{nxt}")
        if k <= n - 1:
            reg, cops = _term_reg(series, k, f"p{2 * k}")
            term_regs[k] = reg
            ops.extend(cops)
            made.append(f"term {k} (degree {2 * k})")
        if k >= 2:
            src = "acc" if k > 2 else term_regs[0]
            ops.append(StageOp(OpKind.POLY_ADD, "add", "acc", src, term_regs[k - 1]))
            made.append(f"partial sum through degree {2 * (k - 1)}")
        stages.append(PipelineStage(k, tuple(ops), "; ".join(made) or "pass"))
    return stages


def _odd_schedule(series: TaylorSeries) -> list[PipelineStage]:
    base = "z" if series.variable.value == "z" else "x"
    n = len(series.coeffs)
    maxd = series.max_degree
    term_regs: dict[int, str] = {}
    s0_ops = [StageOp(OpKind.POWER_MUL, "mul", "p2", base, base)]
    reg, cops = _term_reg(series, 0, base)
    term_regs[0] = reg
    s0_ops.extend(cops)
    stages = [PipelineStage(0, tuple(s0_ops), f"{base}^2")]
    if maxd >= 3:
        stages.append(PipelineStage(
            1, (StageOp(OpKind.POWER_MUL, "mul", "p3", "p2", base),), f"{base}^3"))
    else:
        stages.append(PipelineStage(1, (), "pass"))
    for k in range(2, n + 2):
        ops: list[StageOp] = []
        made = []
        nxt = 2 * k + 1
        if k <= n - 1 and nxt <= maxd:
            ops.append(StageOp(OpKind.POWER_MUL, "mul", f"p{nxt}", f"p{nxt - 2}", "p2"))
            made.append(f"{base}^{nxt}")
        if 1 <= k - 1 <= n - 1:
            reg, cops = _term_reg(series, k - 1, f"p{2 * k - 1}")
            term_regs[k - 1] = reg
            ops.extend(cops)
            made.append(f"term {k - 1} (degree {2 * k - 1})")
        if k >= 3:
            src = "acc" if k > 3 else term_regs[0]
            ops.append(StageOp(OpKind.POLY_ADD, "add", "acc", src, term_regs[k - 2]))
            made.append(f"partial sum through degree {2 * k - 3}")
        stages.append(PipelineStage(k, tuple(ops), "; ".join(made) or "pass"))
    return stages


def _quad_schedule(with_wrap: bool) -> list[PipelineStage]:
    stages = []
    base = "x"
    if with_wrap:
        stages.append(PipelineStage(
            -1,
            (StageOp(OpKind.PRE_MUL, "wrapmul", "k4", "x"),
             StageOp(OpKind.POLY_ADD, "sub", "w", "x", "k4")),
            "range-reduced w = x - 4*round(x/4)",
        ))
        base = "w"
    stages.append(PipelineStage(
        0,
        (StageOp(OpKind.POWER_MUL, "mul", "p2", base, base),
         StageOp(OpKind.COEFF_MUL, "cmul", "d", base, 2.0)),
        f"{base}^2 and 2*{base}",
    ))
    stages.append(PipelineStage(
        1, (StageOp(OpKind.POLY_ADD, "branchadd", "acc", "p2", "d"),),
        "branch-selected sum",
    ))
    return stages


def estimate_resources(schedule: list[PipelineStage], clock_mhz: float = 100.0,
                       dsp_per_multiplier: int = 2) -> ResourceEstimate:
    if clock_mhz <= 0:
        raise ValueError("clock_mhz must be positive")
    muls = adders = 0
    exact = False
    for st in schedule:
        for op in st.ops:
            if op.kind in (OpKind.POWER_MUL, OpKind.COEFF_MUL, OpKind.PRE_MUL):
                muls += 1
            else:
                adders += 1
            if op.fn == "branchadd":
                exact = True
    stages = len(schedule)
    return ResourceEstimate(
        stages=stages,
        latency_cycles=stages,
        latency_ns=stages * (1000.0 / clock_mhz),
        fp_multipliers=muls,
        fp_adders=adders,
        dsp_estimate=dsp_per_multiplier * muls,
        exact=exact,
        clock_mhz=clock_mhz,
        dsp_per_multiplier=dsp_per_multiplier,
    )


def _read(regs: dict, name):
    if isinstance(name, str) and name.startswith("-"):
        return (-regs[name[1:]]).astype(np.float32)
    return regs[name]


def _exec_op(op: StageOp, regs: dict):
    f32 = np.float32
    a = _read(regs, op.a)
    if op.fn == "mul":
        regs[op.dst] = (a * _read(regs, op.b)).astype(f32)
    elif op.fn == "cmul":
        regs[op.dst] = (f32(op.b) * a).astype(f32)
    elif op.fn == "add":
        regs[op.dst] = (a + _read(regs, op.b)).astype(f32)
    elif op.fn == "sub":
        regs[op.dst] = (a - _read(regs, op.b)).astype(f32)
    elif op.fn == "branchadd":
        w = regs["w"] if "w" in regs else regs["x"]
        b = _read(regs, op.b)
        left = (a + b).astype(f32)   # w <= 0: w**2 + 2w
        right = (b - a).astype(f32)  # w > 0: 2w - w**2
        regs[op.dst] = np.where(w <= f32(0.0), left, right)
    elif op.fn == "abs1":
        regs[op.dst] = (np.abs(a) + f32(1.0)).astype(f32)
    elif op.fn == "wrapmul":
        k = np.rint(a * f32(0.25)).astype(f32)
        regs[op.dst] = (f32(4.0) * k).astype(f32)
    else:
        raise ValueError(f"unknown op semantic {op.fn!r}")


def simulate_schedule(series: TaylorSeries, schedule: list[PipelineStage],
                      inputs) -> np.ndarray:
    """Walk the schedule stage by stage in binary32 and return its outputs."""
    x = np.asarray(inputs, dtype=np.float32)
    regs: dict = {"x": x}
    for idx, (d, c) in enumerate(series.coeffs):
        if d == 0:
            regs[f"c{idx}"] = np.full_like(x, np.float32(c))
    for st in schedule:
        for op in st.ops:
            _exec_op(op, regs)
    if "acc" in regs:
        out = regs["acc"]
    else:  # single-term series: the lone term is the result
        d, c = series.coeffs[0]
        base = "z" if series.variable.value == "z" else "x"
        if d == 0:
            reg = "c0"
        elif c in (1.0, -1.0):
            pow_reg = base if d == 1 else f"p{d}"
            reg = pow_reg if c == 1.0 else f"-{pow_reg}"
        else:
            reg = "t0"
        out = _read(regs, reg)
    return np.asarray(out, dtype=np.float32)


def functional_check(series: TaylorSeries, schedule: list[PipelineStage],
                     inputs) -> float:
    """Max deviation of the binary32 schedule walk from the float64
    polynomial, normalized by max(1, max |exact|)."""
    x = np.asarray(inputs, dtype=np.float64)
    got = simulate_schedule(series, schedule, x.astype(np.float32)).astype(np.float64)
    want = series_eval(series, x)
    scale = max(1.0, float(np.max(np.abs(want))))
    return float(np.max(np.abs(got - want))) / scale
