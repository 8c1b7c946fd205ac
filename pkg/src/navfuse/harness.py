"""Seeded trial runner and success-rate aggregation.

A trial loops sense -> perceive -> fuse -> step -> check at 15 Hz until
the drone reaches the goal, collides, or times out. The suite runs N
seeded trials per (scenario x pipeline mode) cell and aggregates success
rates per corridor section: the turn section only counts attempts for
trials that made it through the straight section first.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import CONTROL_DT, step_dynamics
from .fusion import ControlParams, PipelineMode, pipeline_step_trace
from .sensor import TofModel, sense_tof
from .vision import OracleParams, forced_percept, lane_oracle
from .world import Section, Status, World, check_status

TELEMETRY_COLUMNS = ("tick", "x", "y", "heading", "agree", "yaw_rate",
                     "v_f", "d_C", "x_dmax", "theta_cnn")
REPORT_COLUMNS = ("scenario", "mode", "section", "successes", "attempts", "rate")


@dataclass(frozen=True)
class TrialParams:
    control: ControlParams
    tof: TofModel = TofModel()
    oracle: OracleParams = OracleParams()
    t_max: float = 120.0
    dt: float = CONTROL_DT
    telemetry_stride: int = 1


@dataclass
class TrialRecord:
    scenario: str
    mode: PipelineMode
    index: int
    seed: int
    outcome: Status = Status.RUNNING
    failed_section: Optional[Section] = None
    ticks: int = 0
    straight_completed: bool = False
    telemetry: list = field(default_factory=list)  # rows per TELEMETRY_COLUMNS


def trial_seed(global_seed: int, scenario: str, mode: PipelineMode, index: int) -> int:
    """Stable 64-bit per-trial seed from the suite coordinates."""
    key = f"{global_seed}:{scenario}:{mode.value}:{index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


def run_trial(world: World, mode: PipelineMode, seed: int, params: TrialParams,
              scenario: str = "custom", index: int = 0) -> TrialRecord:
    """One closed-loop flight; telemetry is recorded every stride ticks."""
    rec = TrialRecord(scenario=scenario, mode=mode, index=index, seed=seed)
    rng = np.random.default_rng(seed)
    pose = world.start_pose
    tick = 0
    while True:
        frame = sense_tof(world, pose, params.tof, rng, tick)
        if mode is PipelineMode.LOCAL_ONLY:
            percept = forced_percept()
        else:
            percept = lane_oracle(pose, world.lane, params.oracle)
        trace = pipeline_step_trace(mode, frame, percept, params.control)
        if tick % params.telemetry_stride == 0:
            rec.telemetry.append((tick, pose.x, pose.y, pose.heading,
                                  trace.command.agree, trace.command.yaw_rate,
                                  trace.command.v_f, trace.local.d_c,
                                  trace.local.x_dmax, trace.glob.theta))
        pose = step_dynamics(pose, trace.command, params.dt)
        tick += 1
        if not rec.straight_completed and world.section_at(pose) is Section.TURN:
            rec.straight_completed = True
        status = check_status(world, pose, tick, params.t_max, params.dt)
        if status is not Status.RUNNING:
            rec.outcome = status
            rec.ticks = tick
            if status is not Status.SUCCESS:
                rec.failed_section = world.section_at(pose)
            return rec


class SuccessMatrix:
    """successes/attempts per (scenario, mode, section)."""

    def __init__(self) -> None:
        self.cells: dict = {}

    def add(self, rec: TrialRecord) -> None:
        s_key = (rec.scenario, rec.mode, Section.STRAIGHT)
        t_key = (rec.scenario, rec.mode, Section.TURN)
        succ, att = self.cells.get(s_key, (0, 0))
        self.cells[s_key] = (succ + int(rec.straight_completed), att + 1)
        succ, att = self.cells.get(t_key, (0, 0))
        if rec.straight_completed:
            self.cells[t_key] = (succ + int(rec.outcome is Status.SUCCESS), att + 1)
        else:
            self.cells[t_key] = (succ, att)

    def rate(self, scenario: str, mode: PipelineMode, section: Section) -> Optional[float]:
        succ, att = self.cells.get((scenario, mode, section), (0, 0))
        return succ / att if att else None

    def counts(self, scenario: str, mode: PipelineMode, section: Section) -> tuple:
        return self.cells.get((scenario, mode, section), (0, 0))


def worker_count() -> int:
    env = os.environ.get("NAVFUSE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run_grid(worlds: dict, modes, trials: int, global_seed: int,
             params: TrialParams) -> list:
    """All (scenario x mode x trial) runs; order and seeds are deterministic."""
    jobs = []
    for scenario in sorted(worlds):
        for mode in modes:
            for i in range(trials):
                jobs.append((scenario, mode, i))

    def one(job):
        scenario, mode, i = job
        seed = trial_seed(global_seed, scenario, mode, i)
        return run_trial(worlds[scenario], mode, seed, params,
                         scenario=scenario, index=i)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        records = list(pool.map(one, jobs))
    return records


def aggregate(records) -> SuccessMatrix:
    matrix = SuccessMatrix()
    for rec in records:
        matrix.add(rec)
    return matrix


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

_MODE_TITLES = ((PipelineMode.GLOBAL_ONLY, "Global"),
                (PipelineMode.LOCAL_ONLY, "Local"),
                (PipelineMode.FUSED, "Global+Local"))
_SCENARIO_TITLES = {"S1": "Scenario 1", "S2": "Scenario 2", "S3": "Scenario 3"}


def _pct(rate: Optional[float]) -> str:
    return "N/A" if rate is None else f"{round(rate * 100):.0f}%"


def render_report(matrix: SuccessMatrix, scenarios=("S1", "S2", "S3")) -> tuple[str, str]:
    """Fixed-layout text table plus machine-readable CSV, as strings."""
    lines = ["Success rate per corridor section"]
    header1 = f"{'Pipeline':<12}"
    header2 = f"{'Section':<12}"
    for _, title in _MODE_TITLES:
        header1 += f"{title:<22}"
        header2 += f"{'Straight':<11}{'Turn':<11}"
    lines.append(header1.rstrip())
    lines.append(header2.rstrip())
    for scenario in scenarios:
        row = f"{_SCENARIO_TITLES.get(scenario, scenario):<12}"
        for mode, _ in _MODE_TITLES:
            row += f"{_pct(matrix.rate(scenario, mode, Section.STRAIGHT)):<11}"
            row += f"{_pct(matrix.rate(scenario, mode, Section.TURN)):<11}"
        lines.append(row.rstrip())
    text = "\n".join(lines) + "\n"

    csv_lines = [",".join(REPORT_COLUMNS)]
    for scenario in scenarios:
        for mode, _ in _MODE_TITLES:
            for section in (Section.STRAIGHT, Section.TURN):
                succ, att = matrix.counts(scenario, mode, section)
                rate = "N/A" if att == 0 else f"{succ / att:.4f}"
                csv_lines.append(f"{scenario},{mode.value},{section.value},{succ},{att},{rate}")
    return text, "\n".join(csv_lines) + "\n"


# ---------------------------------------------------------------------------
# telemetry files
# ---------------------------------------------------------------------------

def _lut_echo(params: TrialParams) -> str:
    cells = []
    for sc, zone, agree, yaw in params.control.table.rows():
        cells.append(f"{sc.value}/{zone}={agree}:{yaw * params.control.yaw_t:+.1f}")
    return " ".join(cells)


def _schedule_echo(params: TrialParams) -> str:
    return " ".join(f"{b:.0f}:{f:.2f}" for b, f in params.control.schedule.steps)


def telemetry_text(rec: TrialRecord, params: TrialParams) -> str:
    """Telemetry CSV with an audit header; byte-stable for a given run."""
    c = params.control
    head = [
        "# navfuse telemetry v1",
        f"# scenario: {rec.scenario}  mode: {rec.mode.value}  trial: {rec.index}  seed: {rec.seed}",
        f"# v_t: {c.v_t:.3f}  yaw_t: {c.yaw_t:.3f}  eta: {c.eta:.3f}"
        f"  noise_sigma: {params.tof.noise_sigma_mm:.3f}  t_max: {params.t_max:.3f}",
        f"# lut: {_lut_echo(params)}",
        f"# schedule: {_schedule_echo(params)}",
        f"# outcome: {rec.outcome.value}  failed_section: "
        f"{rec.failed_section.value if rec.failed_section else 'none'}  ticks: {rec.ticks}",
        ",".join(TELEMETRY_COLUMNS),
    ]
    rows = [f"{t},{x:.6f},{y:.6f},{h:.6f},{agree},{yaw:.3f},{v:.3f},{dc:.2f},{xd},{theta:.6f}"
            for t, x, y, h, agree, yaw, v, dc, xd, theta in rec.telemetry]
    return "\n".join(head + rows) + "\n"


def write_outputs(out_dir: str, matrix: SuccessMatrix, records, params: TrialParams,
                  scenarios=("S1", "S2", "S3")) -> None:
    """Write report.txt, report.csv and one telemetry CSV per trial."""
    tel_dir = os.path.join(out_dir, "telemetry")
    os.makedirs(tel_dir, exist_ok=True)
    text, csv_text = render_report(matrix, scenarios)
    _write(os.path.join(out_dir, "report.txt"), text)
    _write(os.path.join(out_dir, "report.csv"), csv_text)
    for rec in records:
        name = f"{rec.scenario}_{rec.mode.value}_t{rec.index:02d}.csv"
        _write(os.path.join(tel_dir, name), telemetry_text(rec, params))


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# telemetry replay verification
# ---------------------------------------------------------------------------

def verify_telemetry(text: str) -> list[str]:
    """Re-check recorded commands against the command invariants.

    Returns a list of problems; empty means the file is sound.
    """
    problems: list[str] = []
    meta: dict = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split("  "):
                token = token.strip()
                if ": " in token:
                    key, _, val = token.partition(": ")
                    meta.setdefault(key.strip(), val.strip())
            continue
        if not header_seen:
            if tuple(line.split(",")) != TELEMETRY_COLUMNS:
                problems.append(f"line {lineno}: bad column header")
                return problems
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != len(TELEMETRY_COLUMNS):
            problems.append(f"line {lineno}: expected {len(TELEMETRY_COLUMNS)} fields")
            continue
        rows.append((lineno, parts))

    try:
        v_t = float(meta["v_t"])
        yaw_t = float(meta["yaw_t"])
        mode = meta["mode"]
    except KeyError as exc:
        return [f"missing header field {exc}"]

    lut_yaws = {0.0, yaw_t, -yaw_t, yaw_t / 2.0, -yaw_t / 2.0}
    prev_tick = None
    for lineno, parts in rows:
        tick = int(parts[0])
        agree = int(parts[4])
        yaw = float(parts[5])
        v_f = float(parts[6])
        d_c = float(parts[7])
        x_dmax = int(parts[8])
        theta = float(parts[9])
        if prev_tick is not None and tick <= prev_tick:
            problems.append(f"line {lineno}: tick not increasing")
        prev_tick = tick
        if agree not in (0, 1):
            problems.append(f"line {lineno}: agree must be 0 or 1")
        if agree == 0 and v_f != 0.0:
            problems.append(f"line {lineno}: disagreement must gate speed to zero")
        if not 0.0 <= v_f <= v_t + 1e-9:
            problems.append(f"line {lineno}: v_f outside [0, v_t]")
        if mode == PipelineMode.GLOBAL_ONLY.value:
            if abs(yaw) > yaw_t + 1e-9:
                problems.append(f"line {lineno}: |yaw| exceeds yaw_t")
        elif not any(abs(yaw - ref) <= 1e-9 for ref in lut_yaws):
            problems.append(f"line {lineno}: yaw not in the five-value set")
        if not 200.0 <= d_c <= 4000.0:
            problems.append(f"line {lineno}: d_C outside sensor range")
        if not 0 <= x_dmax <= 7:
            problems.append(f"line {lineno}: x_dmax outside 0..7")
        if not -1.0 <= theta <= 1.0:
            problems.append(f"line {lineno}: theta outside [-1, 1]")
    if not header_seen:
        problems.append("no column header found")
    return problems
