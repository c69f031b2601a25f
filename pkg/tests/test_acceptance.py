"""Acceptance suite: one test per release criterion, each printing a PASS line
with its measured margin.  Run with `pytest -s tests/test_acceptance.py` to see
the lines; tolerances are fixed here, not tuned elsewhere.
"""

import json
import math
import time

import numpy as np
import pytest

from quadcpg.cpg import (
    TAU,
    default_coupling,
    step_endpoint_filter,
    step_frequency,
    step_offset_filter,
    step_phases,
    wrap_signed,
)
from quadcpg.errors import WorkspaceError
from quadcpg.kinematics import LegGeometry, forward_kinematics, inverse_kinematics
from quadcpg.runtime import GaitRuntime, RuntimeConfig, estimate_body_speed
from quadcpg.session import SessionWriter, read_session, replay, run_script
from quadcpg.trajectory import TurnState, step_turn_filter

TROT_OFFSETS = np.array([0.0, math.pi, math.pi, 0.0])

# 60 s scripted session: all six gaits, both turns, three frequencies.
SESSION_SCRIPT = [
    (round(1.0 * 50), {"type": "set_frequency", "hz": 0.5}),
    (round(4.0 * 50), {"type": "set_gait", "gait": "walk"}),
    (round(9.0 * 50), {"type": "set_gait", "gait": "bound"}),
    (round(14.0 * 50), {"type": "set_frequency", "hz": 1.5}),
    (round(17.0 * 50), {"type": "set_gait", "gait": "gallop"}),
    (round(22.0 * 50), {"type": "set_gait", "gait": "modified_trot_1"}),
    (round(27.0 * 50), {"type": "set_turn", "direction": "left"}),
    (round(32.0 * 50), {"type": "set_turn", "direction": "none"}),
    (round(34.0 * 50), {"type": "set_gait", "gait": "modified_trot_2"}),
    (round(39.0 * 50), {"type": "set_turn", "direction": "right"}),
    (round(44.0 * 50), {"type": "set_turn", "direction": "none"}),
    (round(46.0 * 50), {"type": "set_gait", "gait": "trot"}),
    (round(50.0 * 50), {"type": "set_frequency", "hz": 3.0}),
    (round(55.0 * 50), {"type": "set_frequency", "hz": 0.5}),
    (round(57.0 * 50), {"type": "stop"}),
]


def test_phase_locking_from_1000_random_starts():
    # Eq.-2 coupling with the shipped sign convention drives every random
    # start to the trot offset pattern within 10 simulated seconds
    rng = np.random.default_rng(2024)
    phases = rng.uniform(0.0, TAU, (1000, 4))
    coupling = default_coupling()
    dt = 0.002
    started = time.perf_counter()
    for _ in range(5000):  # 10 s
        phases = step_phases(phases, TAU * 1.5, coupling, TROT_OFFSETS, dt)
    elapsed = time.perf_counter() - started
    pair_error = np.abs(wrap_signed(
        (phases[:, :, None] - phases[:, None, :])
        + (TROT_OFFSETS[None, :, None] - TROT_OFFSETS[None, None, :])))
    worst = float(pair_error.max())
    assert worst < 1e-3
    assert elapsed < 30.0
    print(f"\nACCEPTANCE PASS phase locking: worst pairwise error "
          f"{worst:.2e} rad < 1e-3 after 10 s x 1000 starts ({elapsed:.1f} s wall)")


def test_filter_step_responses_match_closed_forms():
    dt = 0.002
    config = RuntimeConfig()

    # frequency filter: 0 -> 3*pi rad/s at the shipped gain
    gain = config.cpg.alpha_omega
    target = TAU * 1.5
    steps = round(5.0 / gain / dt)
    omega = 0.0
    worst_rel = 0.0
    for k in range(steps):
        omega = step_frequency(omega, target, gain, dt)
        closed = target * -math.expm1(-gain * (k + 1) * dt)
        worst_rel = max(worst_rel, abs(omega - closed) / target)
    assert abs(omega - target) < 0.01 * target
    assert worst_rel < 1e-3

    # turn coefficient: 1 -> 0 at the shipped gain
    gain = config.turn_gain
    steps = round(5.0 / gain / dt)
    turn = TurnState(coefficients=np.ones(4), target="left")
    worst_turn = 0.0
    for k in range(steps):
        turn = step_turn_filter(turn, dt, gain)
        closed = math.exp(-gain * (k + 1) * dt)
        worst_turn = max(worst_turn, abs(turn.coefficients[1] - closed))
    assert turn.coefficients[1] < 0.01
    assert worst_turn < 1e-3

    # phase offset: 0 -> pi at the shipped gain
    gain = config.cpg.alpha_offset
    steps = round(5.0 / gain / dt)
    offsets = np.zeros(4)
    worst_off = 0.0
    for k in range(steps):
        offsets = step_offset_filter(offsets, TROT_OFFSETS, gain, dt)
        closed = math.pi * -math.expm1(-gain * (k + 1) * dt)
        worst_off = max(worst_off, abs(offsets[1] - closed) / math.pi)
    assert abs(wrap_signed(offsets[1] - math.pi)) < 0.01 * math.pi
    assert worst_off < 1e-3
    print(f"\nACCEPTANCE PASS filter step responses: closed-form deviations "
          f"(omega {worst_rel:.1e}, turn {worst_turn:.1e}, offset {worst_off:.1e}) < 1e-3")


def test_endpoint_filter_tracking_and_attenuation():
    started = time.perf_counter()
    # tracking through the full pipeline at 1.5 Hz with alpha_X = 25/s
    runtime = GaitRuntime(RuntimeConfig())
    assert runtime.config.cpg.alpha_endpoint == 25.0
    runtime.set_frequency(1.5)
    for _ in range(200):  # settle 4 s
        runtime.tick()
    worst = 0.0
    desired = []
    for _ in range(100):  # one measurement window of 2 s
        frame = runtime.tick()
        worst = max(worst, float(np.max(np.hypot(
            *(frame.feet - frame.feet_desired).T))))
        desired.append(frame.feet_desired.copy())
    desired = np.array(desired)
    amplitude = float(np.max(np.hypot(
        (desired[:, :, 0].max(0) - desired[:, :, 0].min(0)) / 2,
        (desired[:, :, 1].max(0) - desired[:, :, 1].min(0)) / 2)))
    ratio = worst / amplitude
    assert ratio < 0.05

    # a 50 Hz additive disturbance is attenuated >= 10x more than a 1 Hz one
    dt = 0.002
    alpha = 25.0
    gains = {}
    for hz in (1.0, 50.0):
        x = np.zeros((1, 2))
        t = 0.0
        peak = 0.0
        for k in range(round(6.0 / dt)):
            disturbed = np.array([[math.sin(TAU * hz * t), 0.0]])
            x = step_endpoint_filter(x, disturbed, np.zeros((1, 2)), np.zeros(1),
                                     alpha, np.zeros((1, 2)), dt)
            t += dt
            if k > round(4.0 / dt):
                peak = max(peak, abs(x[0, 0]))
        gains[hz] = peak
    attenuation = gains[1.0] / gains[50.0]
    assert attenuation >= 10.0
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    print(f"\nACCEPTANCE PASS endpoint tracking: error {ratio * 100:.2f}% of amplitude "
          f"< 5%; 50 Hz attenuated {attenuation:.1f}x vs 1 Hz (>= 10x)")


def test_ik_fk_round_trip_ten_thousand_points():
    geom = LegGeometry()
    rng = np.random.default_rng(99)
    count = 10_000
    radii = rng.uniform(geom.inner_radius + 1e-3, geom.outer_radius - 1e-3, count)
    thetas = rng.uniform(-math.pi, math.pi, count)
    started = time.perf_counter()
    worst = 0.0
    for r, theta in zip(radii, thetas):
        x, y = r * math.cos(theta), r * math.sin(theta)
        joints = inverse_kinematics(x, y, geom)
        fx, fy = forward_kinematics(joints.q_hip, joints.q_knee, geom)
        worst = max(worst, math.hypot(fx - x, fy - y))
    elapsed = time.perf_counter() - started
    assert worst < 1e-9
    assert elapsed < 1.0
    for bad in ((0.0, 0.30), (0.25, 0.0), (0.0, -0.2401)):
        with pytest.raises(WorkspaceError):
            inverse_kinematics(*bad, geom)
    print(f"\nACCEPTANCE PASS IK/FK round trip: max error {worst:.2e} m "
          f"< 1e-9 over 10^4 points ({elapsed:.2f} s)")


def test_table_limits_hold_through_60s_scripted_session():
    config = RuntimeConfig()
    runtime = GaitRuntime(config)
    limits = config.limits
    frame_dt = config.frame_dt
    hip_budget = limits.hip_speed_max * frame_dt
    knee_budget = limits.knee_speed_max * frame_dt
    schedule = dict()
    for tick, command in SESSION_SCRIPT:
        schedule.setdefault(tick, []).append(command)
    previous = None
    worst_margin = 0.0
    started = time.perf_counter()
    for tick in range(1, 3001):  # 60 s
        for command in schedule.get(tick, ()):
            runtime.apply_command(command)
        frame = runtime.tick()
        assert np.all(np.abs(frame.motors[:, 0]) <= limits.hip_range + 1e-12)
        assert np.all(np.abs(frame.motors[:, 1]) <= limits.knee_range + 1e-12)
        if previous is not None:
            delta = np.abs(frame.motors - previous)
            assert np.all(delta[:, 0] <= hip_budget + 1e-12)
            assert np.all(delta[:, 1] <= knee_budget + 1e-12)
            worst_margin = max(worst_margin, float(delta.max() / hip_budget))
        previous = frame.motors
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(f"\nACCEPTANCE PASS table limits: 60 s scripted session legal "
          f"(peak rate use {worst_margin * 100:.0f}% of budget, {elapsed:.2f} s wall)")


def test_transition_continuity_under_five_millimetres():
    started = time.perf_counter()

    def worst_step(command):
        runtime = GaitRuntime(RuntimeConfig())
        runtime.set_frequency(0.4)
        previous = None
        worst = 0.0
        for tick in range(1, 501):  # 10 s around the command
            if tick == 250:
                command(runtime)
            frame = runtime.tick()
            if previous is not None:
                worst = max(worst, float(np.max(np.hypot(
                    frame.feet[:, 0] - previous[:, 0],
                    frame.feet[:, 1] - previous[:, 1]))))
            previous = frame.feet
        return worst

    gait_step = worst_step(lambda r: r.set_gait("bound"))
    turn_step = worst_step(lambda r: r.set_turn("left"))
    assert gait_step < 0.005
    assert turn_step < 0.005
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    print(f"\nACCEPTANCE PASS transition continuity: max frame motion "
          f"trot->bound {gait_step * 1000:.2f} mm, trot->turn {turn_step * 1000:.2f} mm < 5 mm")


def test_turning_semantics_after_settling():
    def run(turn):
        runtime = GaitRuntime(RuntimeConfig())
        runtime.set_frequency(1.0)
        x_cmd, ys = [], []
        for tick in range(1, 751):  # 15 s
            if tick == 100 and turn:
                runtime.set_turn("left")
            frame = runtime.tick()
            if tick > 550:  # >= 9 s after the command: e^-22 settled
                x_cmd.append(frame.turn * frame.feet[:, 0])
            ys.append(frame.feet[:, 1].copy())
        return np.array(x_cmd), np.array(ys)

    turned_x, turned_y = run(True)
    straight_x, straight_y = run(False)
    nominal = np.abs(straight_x).max(axis=0)
    suppressed = np.abs(turned_x[:, [1, 2]]).max(axis=0)
    assert np.all(suppressed < 1e-3 * nominal[[1, 2]])
    assert np.all(np.abs(turned_x[:, [0, 3]]).max(axis=0) > 0.5 * nominal[[0, 3]])
    y_deviation = float(np.max(np.abs(turned_y - straight_y)))
    assert y_deviation <= 1e-12
    print(f"\nACCEPTANCE PASS turning semantics: suppressed x-amplitude "
          f"{float(suppressed.max() / nominal[1]):.1e} of nominal < 1e-3; "
          f"y deviation {y_deviation:.1e} <= 1e-12")


def test_record_replay_determinism(tmp_path):
    config = RuntimeConfig()
    first = tmp_path / "first.jsonl"
    second = tmp_path / "second.jsonl"
    with SessionWriter(first, config) as writer:
        run_script(config, SESSION_SCRIPT, 3000, writer)
    with SessionWriter(second, config) as writer:
        run_script(config, SESSION_SCRIPT, 3000, writer)
    assert first.read_bytes() == second.read_bytes()
    lines, matched = replay(first, config)
    assert matched
    _, _, recorded = read_session(first)
    assert lines == recorded
    print(f"\nACCEPTANCE PASS determinism: two 60 s runs byte-identical "
          f"({first.stat().st_size} bytes); replay regenerated {len(lines)} "
          f"frames byte-for-byte")


def test_speed_estimator_sanity_anchor():
    # idealized square-wave stance, stride 0.12 m at 5 Hz: the kinematic
    # treadmill estimate must sit at stride x frequency = 0.6 m/s
    frames_per_cycle = 10  # 5 Hz at the 50 Hz frame rate
    stride = 0.12
    feet = []
    for k in range(201):
        i = k % frames_per_cycle
        x = stride / 2 - stride * i / frames_per_cycle
        y = 0.22 if i != 0 else 0.20  # foot lifted during the snap-back
        feet.append([[x, y]] * 4)
    estimate = estimate_body_speed(np.array(feet), 0.02)
    assert estimate == pytest.approx(0.6, rel=0.1)
    print(f"\nACCEPTANCE PASS speed anchor: estimate {estimate:.3f} m/s "
          f"within 10% of 0.6 m/s")
