"""navfuse: depth + vision fused corridor navigation for nano-drones.

Local perception turns 8x8 range-sensor frames into a steering zone and a
central obstacle distance; global perception supplies a lane-following
steering signal; a lookup table fuses the two into yaw and speed commands.
A deterministic planar simulator and a seeded trial harness benchmark the
three pipeline variants over three corridor scenarios.
"""

from ._kernels import BACKEND
from .depth import (DepthFrame, LocalPercept, SmoothedFrame, Zone,
                    extract_percept, gaussian_kernel, smooth_depth)
from .dynamics import CONTROL_DT, step_dynamics
from .fusion import (ControlParams, FusionCommand, FusionTable, PipelineMode,
                     SpeedSchedule, fuse, pipeline_step, pipeline_step_trace,
                     speed_command)
from .harness import (SuccessMatrix, TrialParams, TrialRecord, aggregate,
                      render_report, run_grid, run_trial, trial_seed,
                      verify_telemetry, write_outputs)
from .sensor import TofModel, ray_angles, sense_tof
from .vision import (GlobalPercept, LanePath, OracleParams, SteeringClass,
                     discretize_steering, forced_percept, lane_oracle,
                     vision_speed, vision_yaw)
from .world import (DronePose, Rect, ScenarioParams, Section, Status, World,
                    build_scenario, check_status)

__version__ = "0.1.0"
