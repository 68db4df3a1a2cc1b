"""Trashbot: a planar two-link arm that carries a box into a container.

Kinematic model only: joint angles change by the commanded deltas, the
magnet picks the box up when it passes close enough, and the box drops as
soon as the magnet is inside the container opening. Collisions are
segment-intersection tests between the arm links (and the held box) and
the floor or container walls.
"""

from __future__ import annotations

import math

import numpy as np

from rlchallenges.core import Box, Discrete, Environment, InvalidActionError, ParameterError

LINK = 1.0
PICKUP_RADIUS = 0.1
BOX_HALF = 0.05
VALID_BINS = (3, 5, 7, 9, 11)


def wrap_angle(theta: float) -> float:
    return (theta + math.pi) % (2 * math.pi) - math.pi


def forward_kinematics(theta1: float, theta2: float) -> tuple[tuple[float, float], tuple[float, float]]:
    p1 = (LINK * math.cos(theta1), LINK * math.sin(theta1))
    p2 = (p1[0] + LINK * math.cos(theta1 + theta2), p1[1] + LINK * math.sin(theta1 + theta2))
    return p1, p2


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) - 1e-12 <= p[0] <= max(a[0], b[0]) + 1e-12 and min(a[1], b[1]) - 1e-12 <= p[1] <= max(
        a[1], b[1]
    ) + 1e-12


def segments_intersect(p, q, r, s) -> bool:
    """Closed-segment intersection test for pq and rs."""
    d1, d2 = _orient(r, s, p), _orient(r, s, q)
    d3, d4 = _orient(p, q, r), _orient(p, q, s)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(r, s, p):
        return True
    if d2 == 0 and _on_segment(r, s, q):
        return True
    if d3 == 0 and _on_segment(p, q, r):
        return True
    if d4 == 0 and _on_segment(p, q, s):
        return True
    return False


class Trashbot(Environment):
    """Pick up the red box and drop it in the container, as centred as possible.

    Observation: ``(p1x, p1y, p2x, p2y, magnet_x, magnet_y, holding)`` with
    the magnet at the arm tip. Continuous actions are two joint-angle deltas
    in radians, clipped to ``[-1, 1]``. Discrete actions index a
    ``num_bins x num_bins`` grid of delta pairs (first joint varies fastest).
    """

    name = "trashbot"
    challenge = "State/action: Discrete -- continuous"
    default_max_steps = 150
    reward_range = (-2.0, 4.0)

    def __init__(
        self,
        action_mode: str = "continuous",
        num_bins: int = 3,
        container_width: float = 0.6,
        container_center: float = -1.3,
        container_height: float = 0.6,
        floor_y: float = -1.6,
        box_position: tuple[float, float] | None = None,
        max_steps: int | None = None,
        seed: int = 0,
    ):
        if action_mode not in ("continuous", "discrete"):
            raise ParameterError("action_mode must be 'continuous' or 'discrete'")
        if num_bins not in VALID_BINS:
            raise ParameterError(f"num_bins must be one of {VALID_BINS}")
        if container_width <= 2 * BOX_HALF:
            raise ParameterError("container must be wider than the box")
        super().__init__(max_steps, seed)
        self.action_mode = action_mode
        self.num_bins = int(num_bins)
        self.bin_values = np.linspace(-1.0, 1.0, self.num_bins)
        self.container_width = float(container_width)
        self.container_center = float(container_center)
        self.container_height = float(container_height)
        self.floor_y = float(floor_y)
        if box_position is None:
            # the magnet position of joint pose (-1, 1) rad
            box_position = forward_kinematics(-1.0, 1.0)[1]
        self.box_home = (float(box_position[0]), float(box_position[1]))
        half = self.container_width / 2
        left, right = self.container_center - half, self.container_center + half
        top = self.floor_y + self.container_height
        self.obstacles = [
            ((-10.0, self.floor_y), (10.0, self.floor_y)),
            ((left, self.floor_y), (left, top)),
            ((right, self.floor_y), (right, top)),
        ]
        if self.action_mode == "continuous":
            self.action_space = Box(-1.0, 1.0, (2,))
        else:
            self.action_space = Discrete(self.num_bins**2)
        low = np.array([-2.0] * 6 + [0.0])
        high = np.array([2.0] * 6 + [1.0])
        self.observation_space = Box(low, high)
        self.theta = [0.0, 0.0]
        self.holding = False
        self.box = self.box_home

    # -- helpers ----------------------------------------------------------

    def decode_action(self, action) -> tuple[float, float]:
        if self.action_mode == "discrete":
            a = int(action)
            return float(self.bin_values[a % self.num_bins]), float(self.bin_values[a // self.num_bins])
        return float(action[0]), float(action[1])

    def _check_action(self, action):
        if self.action_mode == "discrete":
            return super()._check_action(action)
        arr = np.asarray(action, dtype=float)
        if arr.shape != (2,) or not np.all(np.isfinite(arr)):
            raise InvalidActionError(f"continuous action must be two finite numbers, got {action!r}")
        return arr

    @property
    def joints(self):
        return forward_kinematics(*self.theta)

    def observe(self) -> np.ndarray:
        p1, p2 = self.joints
        return np.array([p1[0], p1[1], p2[0], p2[1], p2[0], p2[1], float(self.holding)])

    def _collides(self, p1, p2) -> bool:
        segments = [((0.0, 0.0), p1), (p1, p2)]
        if self.holding:
            x, y = p2
            h = BOX_HALF
            corners = [(x - h, y - h), (x + h, y - h), (x + h, y + h), (x - h, y + h)]
            segments += [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
        return any(segments_intersect(a, b, c, d) for a, b in segments for c, d in self.obstacles)

    def _inside_container(self, point) -> bool:
        half = self.container_width / 2
        x, y = point
        return (
            abs(x - self.container_center) < half
            and self.floor_y < y < self.floor_y + self.container_height
        )

    def set_pose(self, theta1: float, theta2: float, holding: bool) -> None:
        """Place the arm directly, e.g. for exhaustive search over poses."""
        self.theta = [float(theta1), float(theta2)]
        self.holding = bool(holding)
        self.box = self.joints[1] if self.holding else self.box_home
        self.steps = 0
        self._active = True

    def drop_reward(self, x: float) -> float:
        half = self.container_width / 2
        return 2.0 + 2.0 * (1.0 - abs(x - self.container_center) / half)

    # -- protocol ---------------------------------------------------------

    def _reset(self):
        self.theta = [0.0, 0.0]
        self.holding = False
        self.box = self.box_home
        return self.observe()

    def _transition(self, action):
        d1, d2 = self.decode_action(action)
        info = {}
        if self.action_mode == "continuous" and (abs(d1) > 1.0 or abs(d2) > 1.0):
            info["clipped"] = True
            d1, d2 = float(np.clip(d1, -1, 1)), float(np.clip(d2, -1, 1))
        self.theta = [wrap_angle(self.theta[0] + d1), wrap_angle(self.theta[1] + d2)]
        p1, p2 = self.joints
        if self.holding:
            self.box = p2
        if self._collides(p1, p2):
            return self.observe(), -2.0, True, dict(info, event="collision")
        reward = 0.0
        if not self.holding and math.dist(p2, self.box) <= PICKUP_RADIUS:
            self.holding = True
            self.box = p2
            reward += 1.0
            info["event"] = "pickup"
        elif self.holding and self._inside_container(p2):
            self.holding = False
            drop = self.drop_reward(p2[0])
            info.update(event="drop", drop_reward=drop, drop_x=p2[0])
            return self.observe(), reward + drop, True, info
        if self.steps + 1 >= self.max_steps:
            reward -= 1.0
            info["event"] = "timeout"
        return self.observe(), reward, False, info

    def render(self) -> str:
        width, height = 41, 21
        canvas = [[" "] * width for _ in range(height)]

        def plot(x, y, ch):
            col = int(round((x + 2.5) / 5.0 * (width - 1)))
            row = int(round((1.5 - y) / 3.5 * (height - 1)))
            if 0 <= row < height and 0 <= col < width:
                canvas[row][col] = ch

        for (a, b) in self.obstacles:
            for t in np.linspace(0, 1, 40):
                plot(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), "#")
        p1, p2 = self.joints
        for (a, b) in (((0.0, 0.0), p1), (p1, p2)):
            for t in np.linspace(0, 1, 20):
                plot(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), "-")
        plot(0.0, 0.0, "O")
        plot(*self.box, "B")
        plot(*p2, "M")
        return "\n".join("".join(r) for r in canvas)

    def key_map(self) -> dict:
        if self.action_mode == "continuous":
            return {"e": (1.0, 0.0), "d": (-1.0, 0.0), "r": (0.0, 1.0), "f": (0.0, -1.0), "x": (0.0, 0.0)}
        mid = self.num_bins // 2
        idx = lambda i, j: i + self.num_bins * j  # noqa: E731
        last = self.num_bins - 1
        return {"e": idx(last, mid), "d": idx(0, mid), "r": idx(mid, last), "f": idx(mid, 0), "x": idx(mid, mid)}
