import math

import numpy as np
import pytest

from quadcpg.cpg import (
    TAU,
    CpgConfig,
    phase_rates,
    step_endpoint_filter,
    step_frequency,
    step_offset_filter,
    step_phases,
    wrap_signed,
)
from quadcpg.errors import CommandError, ConfigurationError, InvalidInputError
from quadcpg.runtime import GaitRuntime, RuntimeConfig, estimate_body_speed
from quadcpg.trajectory import TurnState, eval_endpoints, step_turn_filter


def make_runtime(**kwargs):
    return GaitRuntime(RuntimeConfig(**kwargs))


def run_ticks(runtime, count):
    frames = []
    for _ in range(count):
        frames.append(runtime.tick())
    return frames


class TestConfigValidation:
    def test_dt_must_divide_frame(self):
        with pytest.raises(ConfigurationError):
            RuntimeConfig(internal_dt=0.003)

    def test_empty_library_rejected(self):
        with pytest.raises(ConfigurationError):
            RuntimeConfig(gait_library={})

    def test_unknown_initial_gait(self):
        with pytest.raises(ConfigurationError):
            RuntimeConfig(initial_gait="prance")

    def test_default_substeps(self):
        config = RuntimeConfig()
        assert config.substeps == 10
        assert config.frame_dt == pytest.approx(0.02)


class TestStationary:
    def test_frames_identical_at_zero_frequency(self):
        runtime = make_runtime()
        runtime.stop()
        frames = run_ticks(runtime, 60)
        a, b = frames[-2], frames[-1]
        assert np.array_equal(a.phases, b.phases)
        assert np.array_equal(a.feet, b.feet)
        assert np.array_equal(a.joints, b.joints)
        assert np.array_equal(a.pwm, b.pwm)
        assert a.omega == b.omega == 0.0
        assert a.speed == b.speed == 0.0


class TestFusedLoopEquivalence:
    def test_substeps_match_composed_operations(self):
        # the scalar inner loop must advance exactly like the published
        # cpg-core operations composed in the documented order
        runtime = make_runtime()
        runtime.set_frequency(1.2)
        runtime.set_turn("left")
        run_ticks(runtime, 7)
        runtime.set_gait("walk")  # leaves a weight cross-fade in progress
        run_ticks(runtime, 3)

        config = runtime.config
        cpg = config.cpg
        dt = config.internal_dt
        phases = runtime.state.phases.copy()
        offsets = runtime.state.current_offsets.copy()
        endpoints = runtime.state.endpoints.copy()
        omega = runtime.state.omega
        turn = TurnState(runtime.turn.coefficients.copy(), runtime.turn.target)
        fade_elapsed = runtime._fade_elapsed
        fade_duration = runtime._fade_duration
        weights_from, weights_to = runtime._weights_from, runtime._weights_to
        targets = runtime._target_offsets.copy()

        for _ in range(config.substeps):
            if fade_elapsed < fade_duration:
                u = min(1.0, fade_elapsed / fade_duration)
                wx = (1 - u) * weights_from[0] + u * weights_to[0]
                wy = (1 - u) * weights_from[1] + u * weights_to[1]
                fade_elapsed += dt
            else:
                wx, wy = weights_to
            desired, desired_dphi = eval_endpoints(wx, wy, phases)
            rates = phase_rates(phases, omega, cpg.coupling, offsets, cpg.coupling_sign)
            endpoints = step_endpoint_filter(endpoints, desired, desired_dphi, rates,
                                             cpg.alpha_endpoint,
                                             runtime.state.delta_input, dt)
            phases = step_phases(phases, omega, cpg.coupling, offsets, dt,
                                 cpg.coupling_sign)
            omega = step_frequency(omega, runtime.omega_target, cpg.alpha_omega, dt)
            offsets = step_offset_filter(offsets, targets, cpg.alpha_offset, dt)
            turn = step_turn_filter(turn, dt, config.turn_gain)

        runtime.tick()
        assert np.allclose(runtime.state.phases, phases, atol=1e-12)
        assert runtime.state.omega == pytest.approx(omega, abs=1e-14)
        assert np.allclose(runtime.state.current_offsets, offsets, atol=1e-12)
        assert np.allclose(runtime.state.endpoints, endpoints, atol=1e-12)
        assert np.allclose(runtime.turn.coefficients, turn.coefficients, atol=1e-12)


class TestTrotCoordination:
    def test_diagonal_legs_share_phase(self):
        runtime = make_runtime()
        runtime.set_frequency(1.5)
        frames = run_ticks(runtime, 250)  # 5 s
        last = frames[-1]
        assert abs(wrap_signed(last.phases[0] - last.phases[3])) < 1e-3
        assert abs(wrap_signed(last.phases[1] - last.phases[2])) < 1e-3
        assert abs(wrap_signed(last.phases[0] - last.phases[1] - math.pi)) < 1e-3

    def test_frame_fields_shape(self):
        runtime = make_runtime()
        frame = runtime.tick()
        assert frame.tick == 1
        assert frame.t == pytest.approx(0.02)
        assert frame.phases.shape == (4,)
        assert frame.feet.shape == (4, 2)
        assert frame.pwm.shape == (4, 2)
        assert frame.gait == "trot"


class TestSafety:
    def test_motor_commands_always_legal(self):
        runtime = make_runtime()
        runtime.set_frequency(3.0)  # cap frequency, worst case
        limits = runtime.config.limits
        frame_dt = runtime.config.frame_dt
        prev = None
        for frame in run_ticks(runtime, 500):
            assert np.all(np.abs(frame.motors[:, 0]) <= limits.hip_range + 1e-12)
            assert np.all(np.abs(frame.motors[:, 1]) <= limits.knee_range + 1e-12)
            if prev is not None:
                deltas = np.abs(frame.motors - prev)
                assert np.all(deltas[:, 0] <= limits.hip_speed_max * frame_dt + 1e-12)
                assert np.all(deltas[:, 1] <= limits.knee_speed_max * frame_dt + 1e-12)
            prev = frame.motors


class TestGaitCommands:
    def test_unknown_gait_rejected_without_state_change(self):
        runtime = make_runtime()
        before = runtime.state.phases.copy()
        with pytest.raises(CommandError):
            runtime.set_gait("prance")
        assert runtime.gait_name == "trot"
        assert np.array_equal(runtime.state.phases, before)

    def test_same_gait_is_noop(self):
        runtime = make_runtime()
        runtime.set_frequency(1.0)
        run_ticks(runtime, 10)
        runtime.set_gait("bound")
        run_ticks(runtime, 5)
        fade_before = runtime._fade_elapsed
        runtime.set_gait("bound")  # mid-fade repeat must not restart the fade
        assert runtime._fade_elapsed == fade_before
        assert runtime.gait_name == "bound"

    def test_offsets_settle_within_window_at_gain_five(self):
        # at 5/s the pi swing decays to e^-7.5 * pi < 0.01 rad inside 1.5 s
        runtime = make_runtime(cpg=CpgConfig(alpha_offset=5.0))
        runtime.set_frequency(1.0)
        run_ticks(runtime, 25)
        runtime.set_gait("bound")
        run_ticks(runtime, 75)  # 1.5 s
        target = runtime.config.gait_library["bound"].target_offsets
        error = np.abs(wrap_signed(runtime.state.current_offsets - target))
        assert np.all(error < 0.01)

    def test_offsets_mid_transition_are_filter_state_not_target(self):
        runtime = make_runtime()
        runtime.set_frequency(1.0)
        run_ticks(runtime, 10)
        runtime.set_gait("bound")
        frame = runtime.tick()
        target = runtime.config.gait_library["bound"].target_offsets
        trot = runtime.config.gait_library["trot"].target_offsets
        moving = ~np.isclose(wrap_signed(target - trot), 0.0)
        assert np.any(np.abs(wrap_signed(frame.offsets - target)[moving]) > 0.5)
        # and the phase dynamics consume exactly the filter state
        assert np.array_equal(frame.offsets, runtime.state.current_offsets)

    def test_nominal_frequency_not_retargeted_by_gait_change(self):
        runtime = make_runtime()
        runtime.set_frequency(0.8)
        runtime.set_gait("gallop")
        assert runtime.omega_target == pytest.approx(TAU * 0.8)


class TestFrequencyCommands:
    def test_cap_enforced(self):
        runtime = make_runtime()
        with pytest.raises(CommandError):
            runtime.set_frequency(5.0)
        with pytest.raises(CommandError):
            runtime.set_frequency(-0.1)
        with pytest.raises(CommandError):
            runtime.set_frequency(math.nan)

    def test_settles_within_one_percent_after_half_second(self):
        # alpha_omega = 10/s: e^-5 < 1% after 0.5 s
        runtime = make_runtime()
        runtime.set_frequency(1.5)
        run_ticks(runtime, 25)
        assert abs(runtime.state.omega - 3 * math.pi) < 0.01 * 3 * math.pi

    def test_zero_halts_smoothly(self):
        runtime = make_runtime()
        runtime.set_frequency(1.5)
        run_ticks(runtime, 50)
        omega_before = runtime.state.omega
        runtime.set_frequency(0.0)
        run_ticks(runtime, 50)  # 1 s at alpha 10/s: e^-10
        assert runtime.state.omega < omega_before * 1e-4
        trace = [runtime.tick().omega for _ in range(20)]
        assert all(b <= a for a, b in zip(trace, trace[1:]))


class TestTurning:
    def test_left_turn_targets(self):
        runtime = make_runtime()
        runtime.set_turn("left")
        assert np.array_equal(runtime.turn.target_vector, [1, 0, 0, 1])
        runtime.set_turn("none")
        assert np.array_equal(runtime.turn.target_vector, [1, 1, 1, 1])
        with pytest.raises(CommandError):
            runtime.set_turn("around")

    def test_suppressed_legs_lose_x_amplitude(self):
        runtime = make_runtime()
        runtime.set_frequency(1.0)
        run_ticks(runtime, 50)
        nominal = max(abs(f.feet[1, 0] - 0.0) for f in run_ticks(runtime, 100))
        runtime.set_turn("left")
        run_ticks(runtime, 250)  # 5 s >> ln(1000)/turn_gain
        frames = run_ticks(runtime, 100)
        x_cmd_amplitude = max(abs(f.turn[1] * f.feet[1, 0]) for f in frames)
        assert x_cmd_amplitude < 1e-3 * nominal

    def test_y_stream_bit_identical_under_turn(self):
        def run(turn):
            runtime = make_runtime()
            runtime.set_frequency(1.0)
            ys = []
            for k in range(150):
                if k == 50 and turn:
                    runtime.set_turn("left")
                ys.append(runtime.tick().feet[:, 1].copy())
            return np.array(ys)

        assert np.array_equal(run(True), run(False))

    def test_return_to_none_monotone(self):
        runtime = make_runtime()
        runtime.set_turn("left")
        run_ticks(runtime, 100)
        runtime.set_turn("none")
        values = [runtime.tick().turn[1] for _ in range(100)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] > 0.99


class TestDeltaInjection:
    def test_delta_shifts_endpoints_for_one_tick(self):
        runtime = make_runtime()
        runtime.stop()
        run_ticks(runtime, 5)
        resting = runtime.state.endpoints.copy()
        runtime.inject_delta(np.tile([0.05, 0.0], (4, 1)))
        frame = runtime.tick()
        # one tick of 0.05 m/s against the alpha_X pull moves x forward
        assert np.all(frame.feet[:, 0] > resting[:, 0])
        assert np.array_equal(runtime.state.delta_input, np.zeros((4, 2)))
        faded = run_ticks(runtime, 50)[-1]
        assert np.allclose(faded.feet[:, 0], resting[:, 0], atol=1e-6)

    def test_bad_delta_rejected(self):
        runtime = make_runtime()
        with pytest.raises(CommandError):
            runtime.inject_delta([[0.1, 0.0]])
        with pytest.raises(CommandError):
            runtime.inject_delta(np.full((4, 2), math.nan))


class TestContinuityThroughCommands:
    @staticmethod
    def max_frame_step(runtime, ticks, command_at=None, command=None):
        worst = 0.0
        previous = None
        for k in range(1, ticks + 1):
            if command_at is not None and k == command_at:
                command(runtime)
            frame = runtime.tick()
            if previous is not None:
                worst = max(worst, float(np.max(np.hypot(
                    frame.feet[:, 0] - previous[:, 0],
                    frame.feet[:, 1] - previous[:, 1]))))
            previous = frame.feet
        return worst

    def test_gait_switch_stays_under_five_millimetres(self):
        runtime = make_runtime()
        runtime.set_frequency(0.4)
        step = self.max_frame_step(runtime, 500, 250, lambda r: r.set_gait("bound"))
        assert step < 0.005

    def test_turn_stays_under_five_millimetres(self):
        runtime = make_runtime()
        runtime.set_frequency(0.4)
        step = self.max_frame_step(runtime, 400, 200, lambda r: r.set_turn("left"))
        assert step < 0.005

    def test_frequency_step_stays_under_five_millimetres(self):
        runtime = make_runtime()
        runtime.set_frequency(0.2)
        step = self.max_frame_step(runtime, 400, 200, lambda r: r.set_frequency(0.5))
        assert step < 0.005


class TestSpeedEstimator:
    def test_sawtooth_anchor(self):
        # stride 0.12 m at 5 Hz with square-wave stance: 0.6 m/s by
        # stride x frequency arithmetic
        frames_per_cycle = 10
        stride = 0.12
        feet = []
        for k in range(101):
            i = k % frames_per_cycle
            x = stride / 2 - stride * i / frames_per_cycle
            y = 0.22 if i != 0 else 0.20  # lifted during the snap-back
            feet.append([[x, y]] * 4)
        estimate = estimate_body_speed(np.array(feet), 0.02)
        assert estimate == pytest.approx(0.6, rel=1e-9)

    def test_zero_frequency_zero_speed(self):
        feet = np.tile([[0.01, 0.22]], (60, 4, 1))
        assert estimate_body_speed(feet, 0.02) == 0.0

    def test_window_shorter_than_cycle_rejected(self):
        feet = np.tile([[0.01, 0.22]], (10, 4, 1))
        with pytest.raises(InvalidInputError):
            estimate_body_speed(feet, 0.02, cycle_s=1.0)

    def test_scales_linearly_with_frequency(self):
        ratios = []
        for hz in (1.0, 1.5, 2.0):
            runtime = make_runtime()
            runtime.set_frequency(hz)
            last = run_ticks(runtime, 300)[-1]
            ratios.append(last.speed / hz)
        center = sum(ratios) / len(ratios)
        for ratio in ratios:
            assert abs(ratio - center) <= 0.1 * center


class TestDeterminism:
    def test_identical_runs_bit_identical(self):
        def run():
            runtime = make_runtime()
            script = {10: lambda r: r.set_frequency(1.2),
                      40: lambda r: r.set_gait("walk"),
                      80: lambda r: r.set_turn("right"),
                      120: lambda r: r.set_frequency(0.6)}
            outputs = []
            for k in range(1, 151):
                if k in script:
                    script[k](runtime)
                frame = runtime.tick()
                outputs.append((frame.phases.copy(), frame.feet.copy(),
                                frame.motors.copy(), frame.speed))
            return outputs

        for a, b in zip(run(), run()):
            assert np.array_equal(a[0], b[0])
            assert np.array_equal(a[1], b[1])
            assert np.array_equal(a[2], b[2])
            assert a[3] == b[3]


class TestWorkspaceProjection:
    def test_endpoint_pushed_outside_is_projected_and_flagged(self):
        runtime = make_runtime()
        runtime.stop()
        run_ticks(runtime, 5)
        geom = runtime.config.geometry
        # a hard outward shove: 40 m/s for one tick drives the filtered
        # endpoint past the outer radius
        runtime.inject_delta(np.tile([0.0, 40.0], (4, 1)))
        frame = runtime.tick()
        assert np.all(frame.workspace_projected)
        radii = np.hypot(frame.feet[:, 0], frame.feet[:, 1])
        assert np.all(radii > geom.outer_radius)  # raw filter state overshot
        # the commanded pose was pulled back to the annulus boundary
        for leg in range(4):
            x, y = frame.feet[leg]
            from quadcpg.kinematics import project_to_workspace
            px, py, projected = project_to_workspace(float(x), float(y), geom)
            assert projected
        # runtime recovers once the shove is gone
        settled = run_ticks(runtime, 100)[-1]
        assert not settled.workspace_projected.any()
