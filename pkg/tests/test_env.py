import numpy as np
import pytest

from conftest import bars_from_closes, random_walk_series
from stockrl import (
    Action,
    ConfigError,
    DataError,
    MovementEnv,
    PriceSeries,
    RewardConfig,
    WindowEnv,
    make_windows,
)


def series_from_closes(closes, company="T"):
    return PriceSeries(company, bars_from_closes(closes))


def window_env(closes, h=0, forced_penalty=0.0):
    series = series_from_closes(closes)
    window = make_windows(series, len(closes))[0]
    config = RewardConfig.window_mode(forced_penalty=forced_penalty)
    return WindowEnv(window, series, h, config)


def test_reward_config_bounds():
    with pytest.raises(ConfigError):
        RewardConfig.movement_mode(r=0.0)
    with pytest.raises(ConfigError):
        RewardConfig.movement_mode(c=-0.1)
    with pytest.raises(ConfigError):
        RewardConfig.window_mode(forced_penalty=-1.0)
    with pytest.raises(ConfigError):
        RewardConfig.window_mode(gamma=1.5)


def test_window_buy_below_anchor_gains():
    env = window_env([10.0, 9.0, 11.0])
    state = env.reset()
    assert state.day_in_window == 0
    transition = env.step(Action.WAIT)
    assert transition.reward == 0.0 and not transition.done
    transition = env.step(Action.BUY)  # buy at close 9, anchor 10
    assert transition.reward == pytest.approx(1.0)
    assert transition.done and not transition.forced


def test_window_buy_day_zero_is_free():
    for closes in ([10.0, 9.0, 11.0], [55.0, 56.0], [3.0, 2.0, 4.0, 5.0]):
        env = window_env(closes)
        env.reset()
        transition = env.step(Action.BUY)
        assert transition.reward == 0.0
        assert transition.done


def test_window_forced_buy_on_last_day():
    env = window_env([10.0, 11.0, 12.0], forced_penalty=0.5)
    env.reset()
    assert not env.step(Action.WAIT).done  # day 0 -> 1
    assert not env.step(Action.WAIT).done  # day 1 -> 2
    transition = env.step(Action.WAIT)  # waiting on the last day forces the buy
    assert transition.done and transition.forced
    assert transition.reward == pytest.approx(10.0 - 12.0 - 0.5)


def test_window_episode_length_bound():
    for seed in range(10):
        series = random_walk_series(n=30, seed=seed)
        window = make_windows(series, 6)[2]
        env = WindowEnv(window, series, 2, RewardConfig.window_mode())
        env.reset()
        steps = 0
        done = False
        while not done:
            done = env.step(Action.WAIT).done
            steps += 1
        assert steps == 6  # at most w steps, waiting forever forces the last day


def test_window_reward_equals_anchor_minus_buy_close():
    # brute force over every buy day of random windows
    for seed in range(10):
        series = random_walk_series(n=40, seed=100 + seed)
        window = make_windows(series, 8)[1]
        closes = window.closes
        for buy_day in range(8):
            env = WindowEnv(window, series, 0, RewardConfig.window_mode())
            state = env.reset()
            for _ in range(buy_day):
                state = env.step(Action.WAIT).next_state
            transition = env.step(Action.BUY)
            assert transition.reward == pytest.approx(window.anchor - closes[buy_day])
            assert transition.done


def test_window_history_crosses_window_boundary():
    series = random_walk_series(n=30, seed=5)
    window = make_windows(series, 5)[1]  # starts at index 5
    env = WindowEnv(window, series, 2, RewardConfig.window_mode())
    state = env.reset()
    assert state.history.shape == (3, 4)
    expected = [series[3].close, series[4].close, series[5].close]
    assert list(state.history[:, 3]) == pytest.approx(expected)


def test_window_without_enough_history_is_setup_error():
    series = random_walk_series(n=30, seed=5)
    window = make_windows(series, 5)[0]  # starts at index 0
    with pytest.raises(DataError):
        WindowEnv(window, series, 3, RewardConfig.window_mode())


def test_window_h0_state_has_only_current_day():
    env = window_env([10.0, 9.0, 11.0], h=0)
    state = env.reset()
    assert state.history.shape == (1, 4)
    assert state.close == 10.0


def test_step_after_done_raises():
    env = window_env([10.0, 11.0])
    env.reset()
    env.step(Action.BUY)
    with pytest.raises(RuntimeError):
        env.step(Action.WAIT)


def test_price_state_is_read_only():
    env = window_env([10.0, 11.0])
    state = env.reset()
    with pytest.raises(ValueError):
        state.history[0, 0] = 1.0


def test_movement_mode_rewards():
    # closes 10 -> 10.5: buying pays +r; waiting always costs c
    series = series_from_closes([10.0, 10.5, 10.0, 9.5])
    config = RewardConfig.movement_mode(r=1.0, c=0.1)
    env = MovementEnv(series, 0, config)
    env.reset()
    assert env.step(Action.BUY).reward == pytest.approx(1.0)

    env.reset()
    assert env.step(Action.WAIT).reward == pytest.approx(-0.1)


def test_movement_mode_buy_before_drop_loses():
    series = series_from_closes([10.0, 9.0, 8.0])
    env = MovementEnv(series, 0, RewardConfig.movement_mode(r=2.0))
    env.reset()
    assert env.step(Action.BUY).reward == pytest.approx(-2.0)


def test_movement_mode_flat_next_close_counts_as_drop():
    series = series_from_closes([10.0, 10.0, 11.0], )
    env = MovementEnv(series, 0, RewardConfig.movement_mode(r=1.0))
    env.reset()
    assert env.step(Action.BUY).reward == pytest.approx(-1.0)


def test_movement_mode_reward_magnitudes():
    series = random_walk_series(n=60, seed=3)
    config = RewardConfig.movement_mode(r=1.5, c=0.2)
    env = MovementEnv(series, 1, config)
    rng = np.random.default_rng(0)
    state = env.reset()
    done = False
    while not done:
        action = Action.BUY if rng.random() < 0.5 else Action.WAIT
        transition = env.step(action)
        assert abs(transition.reward) in (1.5, 0.2)
        done = transition.done
        state = transition.next_state
    assert state is None


def test_movement_mode_states_track_trailing_movements():
    series = random_walk_series(n=20, seed=11)
    trends = series.movements()
    env = MovementEnv(series, 2, RewardConfig.movement_mode())
    state = env.reset()
    assert state.trends == trends[0:3]
    state = env.step(Action.WAIT).next_state
    assert state.trends == trends[1:4]


def test_movement_mode_needs_enough_bars():
    with pytest.raises(DataError):
        MovementEnv(series_from_closes([10.0, 11.0]), 1, RewardConfig.movement_mode())


def test_forced_flag_only_on_last_day_wait():
    series = random_walk_series(n=30, seed=8)
    window = make_windows(series, 5)[2]
    # voluntary buy on the last day is not a forced purchase
    env = WindowEnv(window, series, 0, RewardConfig.window_mode())
    env.reset()
    for _ in range(4):
        env.step(Action.WAIT)
    transition = env.step(Action.BUY)
    assert transition.done and not transition.forced
