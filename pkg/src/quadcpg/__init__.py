"""quadcpg: coupled-oscillator gait engine and tele-operation service for a
two-link-legged quadruped."""

from .cpg import (
    CpgConfig,
    CpgState,
    default_coupling,
    phase_rates,
    step_endpoint_filter,
    step_frequency,
    step_offset_filter,
    step_phases,
    wrap_phase,
    wrap_signed,
)
from .errors import (
    CommandError,
    ConfigurationError,
    FitError,
    GaitEngineError,
    InvalidInputError,
    SessionError,
    SingularInputError,
    WorkspaceError,
)
from .gaits import GAIT_NAMES, ReferencePath, build_gait, default_library, load_library, save_library
from .kinematics import (
    JointAngles,
    JointCalibration,
    JointLimits,
    LegGeometry,
    clamp_joint_command,
    forward_kinematics,
    inverse_kinematics,
    joints_to_motor,
    motor_to_joints,
    motor_to_pwm,
    workspace_contains,
)
from .runtime import GaitRuntime, RuntimeConfig, TelemetryFrame, estimate_body_speed
from .trajectory import (
    GaitDefinition,
    TurnState,
    apply_turning,
    eval_basis,
    eval_endpoint,
    eval_endpoint_derivative,
    fit_weights,
    step_turn_filter,
)

__version__ = "0.1.0"
