import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlchallenges.agents import (
    AGENTS,
    GoExploreArchive,
    LearnerConfig,
    LinearGaussianPolicy,
    PriorityQueue,
    RunningMean,
    SoftmaxPolicy,
    TabularMDP,
    TabularModel,
    ValueTable,
    count_bonus_reward,
    dyna_learn_step,
    epsilon_greedy,
    go_explore_step,
    greedy_return,
    make_agent,
    nstep_sarsa_episode_update,
    prioritized_sweeping_step,
    q_learning_update,
    reinforce_episode_update,
    replay,
    risk_sensitive_q_update,
    sarsa_update,
    trashbot_features,
    value_iteration,
)
from rlchallenges.core import (
    ConfigError,
    ContractViolation,
    Discrete,
    Environment,
    ModelError,
    ParameterError,
    RngStream,
    state_key,
)
from rlchallenges.envs import make


class Chain(Environment):
    """States 0..n-1 on a line; action 1 moves right, 0 moves left; reward 1 at the end."""

    deterministic = True

    def __init__(self, n=5, max_steps=100, seed=0):
        super().__init__(max_steps, seed)
        self.n = n
        self.observation_space = Discrete(n)
        self.action_space = Discrete(2)

    def _reset(self):
        self.pos = 0
        return 0

    def _transition(self, action):
        self.pos = max(0, self.pos + (1 if action == 1 else -1))
        if self.pos == self.n - 1:
            return self.pos, 1.0, True, {}
        return self.pos, 0.0, False, {}


class CoinStart(Environment):
    """Start state is a coin flip: replays cannot be trusted."""

    def __init__(self, seed=0):
        super().__init__(10, seed)
        self.observation_space = Discrete(2)
        self.action_space = Discrete(1)

    def _reset(self):
        self.s = self.rng.integers(2)
        return self.s

    def _transition(self, action):
        return self.s, 0.0, False, {}


class StepCounter:
    def __init__(self, env):
        self.env = env
        self.count = 0

    def step(self, action):
        self.count += 1
        return self.env.step(action)

    def __getattr__(self, name):
        return getattr(self.env, name)


# -- action selection --------------------------------------------------------


def test_epsilon_zero_is_greedy():
    q = ValueTable(3)
    q.row(0)[:] = [0.0, 1.0, 0.0]
    rng = RngStream(0)
    assert {epsilon_greedy(q, 0, 0.0, rng) for _ in range(100)} == {1}


def _within_binomial(counts, n, p):
    sigma = math.sqrt(n * p * (1 - p))
    return all(abs(c - n * p) <= 3 * sigma for c in counts)


def test_epsilon_one_is_uniform():
    q = ValueTable(4)
    q.row(0)[:] = [5.0, 0.0, 0.0, 0.0]
    rng = RngStream(1)
    draws = [epsilon_greedy(q, 0, 1.0, rng) for _ in range(10_000)]
    assert _within_binomial(np.bincount(draws, minlength=4), 10_000, 0.25)


def test_ties_broken_uniformly():
    q = ValueTable(3)
    rng = RngStream(2)
    draws = [epsilon_greedy(q, 7, 0.0, rng) for _ in range(10_000)]
    assert _within_binomial(np.bincount(draws, minlength=3), 10_000, 1 / 3)


def test_epsilon_validation():
    with pytest.raises(ParameterError):
        epsilon_greedy(ValueTable(2), 0, 1.5, RngStream(0))


def test_learner_config_validation():
    with pytest.raises(ParameterError):
        LearnerConfig(alpha=0.0)
    with pytest.raises(ParameterError):
        LearnerConfig(kappa=1.0)
    with pytest.raises(ParameterError):
        LearnerConfig(n=0)


def test_value_table_csv_roundtrip(tmp_path):
    q = ValueTable(2, q0=0.5)
    q.set(3, 1, -1.25)
    q.set(0, 0, 1 / 3)
    path = tmp_path / "q.csv"
    q.to_csv(path)
    assert ValueTable.from_csv(path, 2, 0.5) == q
    assert path.read_text().splitlines()[0] == "state,action,value"


# -- one-step updates --------------------------------------------------------


def test_q_learning_examples():
    q = ValueTable(2)
    q_learning_update(q, 0, 0, 1.0, 1, True, 0.5, 0.9)
    assert q.get(0, 0) == 0.5
    before = q.copy()
    q_learning_update(q, 0, 1, 3.0, 1, False, 0.0, 0.9)
    assert q == before
    q.set(2, 0, 1.0)
    q_learning_update(q, 2, 0, 1.0, 5, True, 0.7, 0.9)
    assert q.get(2, 0) == 1.0


def test_sarsa_examples():
    q = ValueTable(2)
    q.set(1, 0, -2.0)
    sarsa_update(q, 0, 0, -1.0, 1, 0, False, 0.5, 1.0)
    assert q.get(0, 0) == -1.5
    q2 = ValueTable(2)
    q2.set(1, 0, 100.0)
    sarsa_update(q2, 0, 0, 1.0, 1, 0, True, 1.0, 1.0)
    assert q2.get(0, 0) == 1.0


transitions = st.lists(
    st.tuples(
        st.integers(0, 4),
        st.integers(0, 2),
        st.floats(-5, 5, allow_nan=False),
        st.integers(0, 4),
        st.booleans(),
    ),
    min_size=1,
    max_size=30,
)


@given(transitions, st.floats(0.01, 1), st.floats(0, 1))
def test_sarsa_with_greedy_next_action_equals_q_learning(steps, alpha, gamma):
    q1, q2 = ValueTable(3), ValueTable(3)
    rng = RngStream(0)
    for s, a, r, s2, term in steps:
        # make the greedy next action unique
        q1.row(s2)[rng.integers(3)] += 1.0
        q2.row(s2)[:] = q1.row(s2)
        a2 = q1.greedy_actions(s2)[0]
        q_learning_update(q1, s, a, r, s2, term, alpha, gamma)
        sarsa_update(q2, s, a, r, s2, a2, term, alpha, gamma)
        assert q1 == q2


@given(transitions, st.floats(0.01, 1), st.floats(0, 1))
def test_risk_neutral_equals_q_learning(steps, alpha, gamma):
    q1, q2 = ValueTable(3), ValueTable(3)
    for s, a, r, s2, term in steps:
        q_learning_update(q1, s, a, r, s2, term, alpha, gamma)
        risk_sensitive_q_update(q2, s, a, r, s2, term, alpha, gamma, 0.0)
    assert q1 == q2


def test_risk_sensitive_asymmetry():
    q = ValueTable(1)
    risk_sensitive_q_update(q, 0, 0, 1.0, 0, True, 1.0, 1.0, 0.5)
    assert q.get(0, 0) == 0.5
    q = ValueTable(1)
    risk_sensitive_q_update(q, 0, 0, -1.0, 0, True, 1.0, 1.0, 0.5)
    assert q.get(0, 0) == -1.5
    q = ValueTable(1)
    q.set(0, 0, 2.0)
    risk_sensitive_q_update(q, 0, 0, 2.0, 0, True, 1.0, 1.0, 0.5)
    assert q.get(0, 0) == 2.0


def test_count_bonus():
    assert count_bonus_reward(0.3, 5, 0.0) == 0.3
    assert count_bonus_reward(0.0, 4, 1.0) == 0.5


@given(st.floats(0.01, 10), st.integers(1, 10_000))
def test_count_bonus_decreasing(beta, n):
    assert count_bonus_reward(0.0, n + 1, beta) < count_bonus_reward(0.0, n, beta)


# -- n-step ------------------------------------------------------------------


def test_monte_carlo_example():
    q = ValueTable(1)
    nstep_sarsa_episode_update(q, [(0, 0, 0.0), (1, 0, 0.0), (2, 0, 1.0)], None, 1.0, 1.0)
    assert [q.get(s, 0) for s in range(3)] == [1.0, 1.0, 1.0]


def test_empty_trajectory_is_noop():
    q = ValueTable(2)
    nstep_sarsa_episode_update(q, [], 3, 0.5, 1.0)
    assert len(q) == 0


episodes = st.lists(
    st.tuples(st.integers(0, 3), st.integers(0, 1), st.floats(-3, 3, allow_nan=False)),
    min_size=1,
    max_size=12,
)


@given(episodes, st.floats(0.05, 1), st.floats(0, 1))
def test_nstep_one_equals_sequential_sarsa(episode, alpha, gamma):
    q1, q2 = ValueTable(2, q0=0.3), ValueTable(2, q0=0.3)
    nstep_sarsa_episode_update(q1, episode, 1, alpha, gamma)
    for t, (s, a, r) in enumerate(episode):
        if t + 1 < len(episode):
            s2, a2, _ = episode[t + 1]
            sarsa_update(q2, s, a, r, s2, a2, False, alpha, gamma)
        else:
            sarsa_update(q2, s, a, r, 0, 0, True, alpha, gamma)
    assert q1 == q2


@given(episodes, st.integers(0, 5), st.floats(0.05, 1), st.floats(0, 1))
def test_long_backup_equals_monte_carlo(episode, extra, alpha, gamma):
    q1, q2 = ValueTable(2, q0=-0.2), ValueTable(2, q0=-0.2)
    nstep_sarsa_episode_update(q1, episode, len(episode) + extra, alpha, gamma)
    nstep_sarsa_episode_update(q2, episode, None, alpha, gamma)
    assert q1 == q2


# -- learned model, Dyna, Prioritised Sweeping -------------------------------


@given(transitions)
def test_tabular_model_counts(steps):
    model = TabularModel()
    for s, a, r, s2, term in steps:
        model.update(s, a, r, s2, term)
        assert model.check_counts()
    for s, a in model.visited_pairs:
        assert sum(model.distribution(s, a).values()) == pytest.approx(1.0, abs=1e-12)


def test_single_observation_gives_unit_mass():
    model = TabularModel()
    model.update(0, 1, 2.0, 5, False)
    assert model.distribution(0, 1) == {5: 1.0}
    assert model.sample(0, 1, RngStream(0)) == (5, 2.0, False)


@given(transitions, st.integers(0, 1000))
@settings(max_examples=40)
def test_dyna_zero_budget_is_q_learning(steps, seed):
    cfg = LearnerConfig(alpha=0.3, gamma=0.9, planning_budget=0)
    q1, q2 = ValueTable(3), ValueTable(3)
    model = TabularModel()
    for s, a, r, s2, term in steps:
        dyna_learn_step(q1, model, s, a, r, s2, term, cfg, RngStream(seed))
        q_learning_update(q2, s, a, r, s2, term, cfg.alpha, cfg.gamma)
    assert q1 == q2 and model.calls == 0


def _swap_rng(agent, name, seed):
    agent.rng = RngStream(seed).child(f"agent/{name}")
    return agent


@pytest.mark.parametrize("name,options", [("dyna", {}), ("risk_q", {})])
def test_agent_reductions_to_q_learning(name, options):
    env_a, env_b = make("roadrunner", width=6, seed=3), make("roadrunner", width=6, seed=3)
    base = make_agent("q_learning", env_a, LearnerConfig(epsilon=0.2), seed=3)
    other = make_agent(name, env_b, LearnerConfig(epsilon=0.2, planning_budget=0, kappa=0.0), seed=3, **options)
    _swap_rng(other, "q_learning", 3)
    base.learn(env_a, 3000)
    other.learn(env_b, 3000)
    assert base.q == other.q


def test_dyna_propagates_faster_than_q_learning():
    def right_only(agent, episodes):
        env = Chain(5)
        for _ in range(episodes):
            s = env.reset()
            while True:
                out = env.step(1)
                agent.update(s, 1, out.reward, out.observation, out.terminated)
                s = out.observation
                if out.done:
                    break
        return sum(1 for _, _, v in agent.q.items() if v != 0.0)

    cfg = LearnerConfig(alpha=1.0, gamma=0.9, planning_budget=10)
    dyna = make_agent("dyna", Chain(5), cfg, seed=0)
    plain = make_agent("q_learning", Chain(5), cfg, seed=0)
    assert right_only(plain, 2) == 2
    assert right_only(dyna, 1) >= 2


def test_prioritized_sweeping_queue_rules():
    cfg = LearnerConfig(alpha=1.0, gamma=1.0, planning_budget=0)
    q, model, pq = ValueTable(2), TabularModel(), PriorityQueue()
    prioritized_sweeping_step(q, model, pq, 0, 1, 0.0, 1, False, cfg)
    assert len(pq) == 0  # zero TD error
    prioritized_sweeping_step(q, model, pq, 1, 1, 5.0, 2, True, cfg)
    assert len(pq) == 1 and pq.priority((1, 1)) == 5.0
    before = q.copy()
    prioritized_sweeping_step(q, model, PriorityQueue(), 0, 1, 0.0, 1, False, cfg)
    assert q == before  # empty queue: no planning


def test_prioritized_sweeping_backward_sweep_matches_dp():
    gamma = 0.9
    cfg = LearnerConfig(alpha=1.0, gamma=gamma, planning_budget=3)
    agent = make_agent("prioritized_sweeping", Chain(4), cfg, seed=0)
    env = Chain(4)
    s = env.reset()
    while True:
        out = env.step(1)
        agent.update(s, 1, out.reward, out.observation, out.terminated)
        s = out.observation
        if out.done:
            break
    # dynamic-programming values of moving right along the chain
    expected = {2: 1.0, 1: gamma, 0: gamma**2}
    for state, value in expected.items():
        assert agent.q.get(state, 1) == pytest.approx(value)


@given(st.lists(st.tuples(st.integers(0, 5), st.floats(0, 10)), min_size=1, max_size=30))
def test_priority_queue_pops_descending_and_keeps_max(pushes):
    pq = PriorityQueue()
    best = {}
    for item, p in pushes:
        pq.push(item, p)
        best[item] = max(best.get(item, -1.0), p)
    popped = []
    while pq:
        popped.append(pq.pop())
    assert dict(popped) == best
    prios = [p for _, p in popped]
    assert prios == sorted(prios, reverse=True)
    with pytest.raises(IndexError):
        pq.pop()


@pytest.mark.parametrize("name", ["dyna", "prioritized_sweeping"])
def test_planning_budget_counted(name):
    env = make("supermarket")
    agent = make_agent(name, env, LearnerConfig(alpha=0.5, planning_budget=5), seed=0)
    last = 0
    counter = StepCounter(env)
    env_steps = 0
    while env_steps < 500:
        agent.run_episode(counter, agent.steps + 1)
        env_steps = counter.count
        assert agent.model_calls - last <= 5
        last = agent.model_calls


# -- value iteration ---------------------------------------------------------


def test_value_iteration_examples():
    single = TabularMDP([0], 1, {(0, 0): [(1.0, 0, 0.0, False)]})
    assert value_iteration(single, 0.9).get(0, 0) == 0.0
    chain = TabularMDP([0, 1], 1, {(0, 0): [(1.0, 1, 1.0, True)]}, frozenset({1}))
    assert value_iteration(chain, 0.9).get(0, 0) == 1.0


def test_value_iteration_errors():
    bad = TabularMDP([0], 1, {(0, 0): [(0.5, 0, 0.0, False)]})
    with pytest.raises(ModelError):
        value_iteration(bad, 0.9)
    ok = TabularMDP([0], 1, {(0, 0): [(1.0, 0, 0.0, False)]})
    with pytest.raises(ValueError):
        value_iteration(ok, 0.9, tol=0.0)


def _exact_mdp(env, states, place, gamma_terminal=None):
    """Descriptive model of a deterministic env by placing it in every state."""
    n = env.action_space.n
    transitions = {}
    for s in states:
        for a in range(n):
            place(s)
            out = env.step(a)
            transitions[(s, a)] = [(1.0, state_key(out.observation, env.observation_space), out.reward, out.terminated)]
    return TabularMDP(states, n, transitions)


def _boulder_mdp(env):
    def place(h):
        env.reset()
        env.h = h

    return _exact_mdp(env, list(range(env.height)), place)


def _roadrunner_mdp(env):
    space = env.observation_space
    states = [state_key((x, dx), space) for x in range(env.target) for dx in range(env.max_speed + 1)]

    def place(key):
        env.set_state(key % env.width, key // env.width)

    return _exact_mdp(env, states, place)


@pytest.mark.parametrize(
    "name,params,gamma,build",
    [
        ("boulder", {"height": 4, "num_grips": 2}, 0.9, _boulder_mdp),
        ("roadrunner", {"width": 6, "max_speed": 2}, 1.0, _roadrunner_mdp),
    ],
)
def test_q_learning_matches_value_iteration_on_small_envs(name, params, gamma, build):
    env = make(name, seed=1, **params)
    optimal_q = value_iteration(build(make(name, seed=1, **params)), gamma)

    class Oracle:
        def greedy_action(self, obs):
            return optimal_q.greedy_actions(state_key(obs, env.observation_space))[0]

    best = greedy_return(Oracle(), make(name, seed=1, **params))
    cfg = LearnerConfig(alpha=1.0, gamma=gamma, epsilon=0.2, alpha_schedule="visits")
    agent = make_agent("q_learning", env, cfg, seed=1)
    agent.learn(env, 100_000)
    got = greedy_return(agent, make(name, seed=1, **params))
    assert abs(got - best) <= 0.05 * abs(best) + 1e-12


# -- Go-Explore --------------------------------------------------------------


def test_go_explore_first_iteration_archives_reset_state():
    env = make("boulder", height=3, num_grips=2)
    archive = go_explore_step(GoExploreArchive(), env, RngStream(0), 3)
    assert list(archive.cells) == [0] and archive.cells[0].actions == []


def test_go_explore_reaches_every_height_and_goal():
    env = make("boulder", height=3, num_grips=2, seed=5)
    archive = GoExploreArchive()
    rng = RngStream(0)
    for _ in range(200):
        go_explore_step(archive, env, rng, 3)
        if archive.best_goal() is not None and len(archive.cells) == 4:
            break
    assert set(archive.cells) == {0, 1, 2, 3}
    assert archive.best_goal().actions == list(env.correct_grip)


@given(st.integers(0, 500), st.integers(1, 5))
@settings(max_examples=20, deadline=None)
def test_go_explore_replay_invariant(seed, explore_steps):
    env = make("roadrunner", width=8, seed=seed)
    archive = GoExploreArchive()
    rng = RngStream(seed)
    for _ in range(30):
        go_explore_step(archive, env, rng, explore_steps)
        for key, entry in archive.cells.items():
            obs, _, _ = replay(env, entry.actions)
            assert state_key(obs, env.observation_space) == key


def test_go_explore_divergence_is_contract_violation():
    env = CoinStart(seed=0)
    archive = GoExploreArchive()
    rng = RngStream(1)
    with pytest.raises(ContractViolation):
        for _ in range(50):
            go_explore_step(archive, env, rng, 1)


def test_go_explore_selection_weights():
    archive = GoExploreArchive()
    archive.offer(0, [], 0.0, False)
    archive.offer(1, [0], 0.0, False)
    for _ in range(15):
        archive.offer(0, [], 0.0, False)  # visits 16 vs 1
    rng = RngStream(0)
    picks = [archive.select(rng) for _ in range(20_000)]
    share = picks.count(1) / len(picks)
    w0, w1 = 1 / math.sqrt(17), 1 / math.sqrt(2)
    assert share == pytest.approx(w1 / (w0 + w1), abs=0.015)


def test_go_explore_needs_deterministic_env():
    with pytest.raises(ConfigError):
        make_agent("go_explore", make("catch"))


# -- REINFORCE ---------------------------------------------------------------


def _fd_check(policy, phi, action, rng, eps=1e-6):
    grads = policy.grad_log_prob(phi, action)
    worst = 0.0
    for name, param in policy.params().items():
        flat = param.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + eps
            up = policy.log_prob(phi, action)
            flat[i] = old - eps
            down = policy.log_prob(phi, action)
            flat[i] = old
            fd = (up - down) / (2 * eps)
            an = grads[name].reshape(-1)[i]
            worst = max(worst, abs(an - fd) / max(1.0, abs(fd), abs(an)))
    return worst


@given(st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_gaussian_gradient_matches_finite_differences(seed):
    rng = RngStream(seed)
    policy = LinearGaussianPolicy(4, [-1, -1], [1, 1], init_std=0.5)
    policy.weights[:] = rng.generator.normal(size=policy.weights.shape)
    policy.log_std[:] = rng.generator.uniform(-1, 0.5, size=2)
    phi = rng.generator.normal(size=4)
    raw, _ = policy.sample(phi, rng)
    assert _fd_check(policy, phi, raw, rng) < 1e-5


@given(st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_softmax_gradient_matches_finite_differences(seed):
    rng = RngStream(seed)
    policy = SoftmaxPolicy(3, 4)
    policy.weights[:] = rng.generator.normal(size=policy.weights.shape)
    phi = rng.generator.normal(size=3)
    assert _fd_check(policy, phi, rng.integers(4), rng) < 1e-5


def test_zero_advantage_leaves_policy_unchanged():
    policy = LinearGaussianPolicy(3, [-1], [1], lr=0.1)
    baseline = RunningMean(value=2.0, count=1)
    before = {k: v.copy() for k, v in policy.params().items()}
    reinforce_episode_update(policy, [(np.ones(3), np.array([0.3]), 2.0)], 1.0, baseline)
    for k, v in policy.params().items():
        assert np.array_equal(v, before[k])


def test_softmax_bandit_probability_increases_monotonically():
    policy = SoftmaxPolicy(1, 2, lr=0.1)
    baseline = RunningMean()
    rng = RngStream(4)
    phi = np.ones(1)
    probs = [policy.probabilities(phi)[1]]
    for _ in range(200):
        a, _ = policy.sample(phi, rng)
        reinforce_episode_update(policy, [(phi, a, float(a == 1))], 1.0, baseline)
        probs.append(policy.probabilities(phi)[1])
    assert all(b >= a for a, b in zip(probs, probs[1:]))
    assert probs[-1] > 0.9


def test_std_clamp_is_logged(caplog):
    policy = LinearGaussianPolicy(1, [-1], [1])
    policy.apply({"weights": np.zeros((1, 1)), "log_std": np.array([-100.0])}, 1.0)
    assert policy.std[0] == pytest.approx(1e-6)
    assert policy.clamp_events == 1
    assert "clamped" in caplog.text


def test_trashbot_features():
    env = make("trashbot")
    phi = trashbot_features(env.reset())
    assert phi.shape == (12,) and np.all(np.abs(phi) <= 1.0 + 1e-12)
    # zero pose: both joint angles 0
    assert phi[7:11].tolist() == [0.0, 1.0, 0.0, 1.0]


# -- agents as a whole -------------------------------------------------------


AGENT_ENVS = {
    "q_learning": ("boulder", {}, {}),
    "sarsa": ("roadrunner", {}, {}),
    "nstep_sarsa": ("study", {}, {}),
    "count_bonus": ("boulder", {}, {}),
    "go_explore": ("boulder", {}, {}),
    "risk_q": ("golf", {}, {}),
    "dyna": ("supermarket", {}, {}),
    "prioritized_sweeping": ("supermarket", {}, {}),
    "value_iteration": ("supermarket", {}, {}),
    "reinforce": ("trashbot", {}, {}),
}


def test_every_agent_is_covered():
    assert set(AGENT_ENVS) == set(AGENTS)


@pytest.mark.parametrize("name", sorted(AGENT_ENVS))
@pytest.mark.parametrize("budget", [1, 37, 400])
def test_learn_uses_exact_step_budget(name, budget):
    env_name, params, options = AGENT_ENVS[name]
    env = StepCounter(make(env_name, seed=0, **params))
    agent = make_agent(name, env, LearnerConfig(planning_budget=2), seed=0, **options)
    agent.learn(env, budget)
    assert env.count == budget


def test_make_agent_errors():
    with pytest.raises(ConfigError):
        make_agent("dqn", make("boulder"))
    with pytest.raises(ConfigError):
        make_agent("q_learning", make("boulder"), frobnicate=1)
    with pytest.raises(ConfigError):
        make_agent("q_learning", make("trashbot"))  # continuous actions
    with pytest.raises(ConfigError):
        make_agent("q_learning", make("trashbot", action_mode="discrete"))  # needs obs_bins


def test_seeded_learning_is_reproducible():
    def run():
        env = make("golf", seed=2)
        agent = make_agent("q_learning", env, seed=9)
        agent.learn(env, 2000)
        return agent.q

    assert run() == run()
