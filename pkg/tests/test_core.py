import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlchallenges.core import (
    Box,
    Discrete,
    Discretizer,
    Environment,
    InvalidActionError,
    MultiDiscrete,
    ParameterError,
    ProtocolError,
    RngStream,
    StepOutcome,
    UnsupportedError,
    discounted_return,
    framestack_wrap,
    mixed_radix,
    state_key,
)
from rlchallenges.envs import ENVIRONMENTS, make


class Counter(Environment):
    """Observation counts steps; terminates when action 1 is taken."""

    def __init__(self, max_steps=5, seed=0):
        super().__init__(max_steps, seed)
        self.observation_space = Discrete(10)
        self.action_space = Discrete(2)

    def _reset(self):
        self.t = 0
        return 0

    def _transition(self, action):
        self.t += 1
        return min(self.t, 9), 1.0, action == 1, {}


# -- discounted return -------------------------------------------------------


def test_discounted_return_examples():
    assert discounted_return([1, 1, 1], 0.0) == 1.0
    assert discounted_return([0, 0, 1], 0.9) == pytest.approx(0.81, abs=1e-15)
    assert discounted_return([], 0.5) == 0.0
    assert discounted_return([3.5], 0.3) == 3.5


def test_discounted_return_rejects_bad_gamma():
    with pytest.raises(ParameterError):
        discounted_return([1.0], 1.5)


finite = st.floats(-100, 100, allow_nan=False)


@given(st.lists(finite, max_size=20), st.floats(0, 1))
def test_discounted_return_recursion(rewards, gamma):
    if not rewards:
        assert discounted_return(rewards, gamma) == 0.0
        return
    lhs = discounted_return(rewards, gamma)
    rhs = rewards[0] + gamma * discounted_return(rewards[1:], gamma)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


@given(st.lists(finite, max_size=20), st.floats(0, 1))
def test_discounted_return_matches_power_sum(rewards, gamma):
    direct = sum(r * gamma**i for i, r in enumerate(rewards))
    assert discounted_return(rewards, gamma) == pytest.approx(direct, rel=1e-9, abs=1e-9)


# -- spaces ------------------------------------------------------------------


def test_space_validation():
    with pytest.raises(ParameterError):
        Discrete(0)
    with pytest.raises(ParameterError):
        MultiDiscrete([3, 0])
    with pytest.raises(ParameterError):
        Box([1.0], [0.0])


@given(st.integers(1, 50), st.integers(0, 2**32))
def test_discrete_samples_are_contained(n, seed):
    space, rng = Discrete(n), RngStream(seed)
    for _ in range(20):
        assert space.contains(space.sample(rng))
    assert not space.contains(n)
    assert not space.contains(-1)
    assert not space.contains(1.5)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(0, 2**32))
def test_multidiscrete_samples_are_contained(dims, seed):
    space, rng = MultiDiscrete(dims), RngStream(seed)
    for _ in range(20):
        assert space.contains(space.sample(rng))
    assert not space.contains(tuple(dims))
    assert space.size == int(np.prod(dims))


@given(st.integers(0, 2**32))
def test_box_samples_are_contained(seed):
    space = Box([-1.0, 0.0], [1.0, 5.0])
    rng = RngStream(seed)
    for _ in range(20):
        assert space.contains(space.sample(rng))
    assert not space.contains(np.array([2.0, 1.0]))


# -- rng ---------------------------------------------------------------------


def test_rng_reproducible_and_children_independent():
    a, b = RngStream(42), RngStream(42)
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    x = RngStream(7).child("x")
    y = RngStream(7).child("y")
    xs = [x.random() for _ in range(5)]
    assert xs != [y.random() for _ in range(5)]
    x_again = RngStream(7).child("x")
    assert xs == [x_again.random() for _ in range(5)]


def test_rng_sequence_is_frozen():
    value = RngStream(123).random()
    assert value == pytest.approx(np.random.Generator(np.random.PCG64(np.random.SeedSequence([123]))).random())


# -- protocol ----------------------------------------------------------------


def test_step_before_reset_is_protocol_error():
    with pytest.raises(ProtocolError):
        Counter().step(0)


def test_step_after_termination_is_protocol_error():
    env = Counter()
    env.reset()
    assert env.step(1).terminated
    with pytest.raises(ProtocolError):
        env.step(0)


def test_invalid_action():
    env = Counter()
    env.reset()
    with pytest.raises(InvalidActionError):
        env.step(2)


def test_truncation_at_max_steps():
    env = Counter(max_steps=3)
    env.reset()
    outs = [env.step(0) for _ in range(3)]
    assert [o.truncated for o in outs] == [False, False, True]
    assert not any(o.terminated for o in outs)


def test_termination_on_last_step_is_not_truncation():
    env = Counter(max_steps=2)
    env.reset()
    env.step(0)
    out = env.step(1)
    assert out.terminated and not out.truncated


def test_step_outcome_unpacks():
    obs, r, term, trunc, info = StepOutcome(1, 2.0, True)
    assert (obs, r, term, trunc, info) == (1, 2.0, True, False, {})


# -- state keys --------------------------------------------------------------


def test_state_key_examples():
    assert state_key(7, Discrete(10)) == 7
    assert state_key((1, 2, 3), MultiDiscrete([5, 5, 10])) == 86


def test_state_key_injective_on_full_enumeration():
    dims = [5, 5, 10]
    space = MultiDiscrete(dims)
    keys = {state_key(v, space) for v in itertools.product(*map(range, dims))}
    assert keys == set(range(250))


def test_state_key_needs_discretizer_for_box():
    space = Box([0.0], [1.0])
    with pytest.raises(UnsupportedError):
        state_key(np.array([0.5]), space)
    assert state_key(np.array([0.5]), space, Discretizer.for_space(space, 4)) == 2


@given(st.lists(st.integers(1, 7), min_size=1, max_size=4), st.data())
def test_mixed_radix_roundtrip(radices, data):
    digits = [data.draw(st.integers(0, r - 1)) for r in radices]
    key = mixed_radix(digits, radices)
    decoded = []
    for r in radices:
        decoded.append(key % r)
        key //= r
    assert decoded == digits and key == 0


@given(st.floats(-10, 10), st.integers(1, 20))
def test_discretizer_indices_in_range(x, bins):
    d = Discretizer([-1.0], [1.0], bins)
    idx = d.indices([x])[0]
    assert 0 <= idx < bins


# -- framestack --------------------------------------------------------------


def test_framestack_rejects_bad_k():
    with pytest.raises(ParameterError):
        framestack_wrap(make("boulder"), 0)


def test_framestack_rejects_continuous_base():
    with pytest.raises(UnsupportedError):
        framestack_wrap(make("trashbot"), 2)


def test_framestack_pads_at_episode_start():
    env = make("memory_corridor", num_doors=3, seed=3)
    wrapped = framestack_wrap(make("memory_corridor", num_doors=3, seed=3), 2)
    o0 = env.reset()
    assert wrapped.observation_space == MultiDiscrete([5, 5])
    assert wrapped.reset() == (4, o0)


def test_framestack_cardinality_k25():
    wrapped = framestack_wrap(make("memory_corridor", num_doors=3), 25)
    assert wrapped.observation_space.size == 5**25
    assert wrapped.observation_space.size > 10**15


@given(st.integers(0, 1000), st.lists(st.integers(0, 2), min_size=1, max_size=30))
@settings(max_examples=30)
def test_framestack_k1_is_identity(seed, actions):
    base = make("memory_corridor", num_doors=3, seed=seed)
    wrapped = framestack_wrap(make("memory_corridor", num_doors=3, seed=seed), 1)
    assert wrapped.reset() == (state_key(base.reset(), base.observation_space),)
    for a in actions:
        b, w = base.step(a), wrapped.step(a)
        assert w.observation == (state_key(b.observation, base.observation_space),)
        assert (w.reward, w.terminated, w.truncated) == (b.reward, b.terminated, b.truncated)
        if b.done:
            break


@given(st.integers(1, 5), st.lists(st.integers(0, 2), min_size=1, max_size=12))
@settings(max_examples=30)
def test_framestack_holds_last_k_frames(k, actions):
    base = make("boulder", height=4, num_grips=3, seed=1)
    wrapped = framestack_wrap(make("boulder", height=4, num_grips=3, seed=1), k)
    history = [5] * k + [base.reset()]
    assert wrapped.reset() == tuple(history[-k:])
    for a in actions:
        b, w = base.step(a), wrapped.step(a)
        history.append(b.observation)
        assert w.observation == tuple(history[-k:])
        if b.done:
            break


# -- invariants over every environment ---------------------------------------


def _random_rollout(env, rng, steps):
    env.reset()
    for _ in range(steps):
        out = env.step(env.action_space.sample(rng))
        yield out
        if out.done:
            env.reset()


@pytest.mark.parametrize("name", list(ENVIRONMENTS))
def test_space_soundness(name):
    env = make(name, seed=5)
    lo, hi = env.reward_range
    rng = RngStream(11)
    assert env.observation_space.contains(env.reset())
    for out in _random_rollout(env, rng, 10_000 if name != "supermarket" else 3_000):
        assert env.observation_space.contains(out.observation)
        assert lo - 1e-9 <= out.reward <= hi + 1e-9
        assert not (out.terminated and out.truncated)


@pytest.mark.parametrize("name", list(ENVIRONMENTS))
def test_determinism_same_seed_same_actions(name):
    rng = RngStream(3)
    space = make(name).action_space
    actions = [space.sample(rng) for _ in range(300)]

    def trace():
        env = make(name, seed=17)
        env.reset()
        out = []
        for a in actions:
            step = env.step(a)
            out.append((np.asarray(step.observation).tobytes(), step.reward, step.terminated, step.truncated))
            if step.done:
                env.reset()
        return out

    assert trace() == trace()


@pytest.mark.parametrize("name", list(ENVIRONMENTS))
def test_reset_seed_reseeds_dynamics_only(name):
    env = make(name, seed=4)
    first = np.asarray(env.reset(seed=8)).tobytes()
    again = np.asarray(env.reset(seed=8)).tobytes()
    assert first == again
