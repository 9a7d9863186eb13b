"""Driving-scene domain model and the versioned scene JSON format.

A scene is always expressed in the ego frame: the current ego position
is the origin and the vehicle points along +y (heading pi/2). Loading
re-normalizes the data into that frame, so files written in any rigid
placement of the same scene load identically.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import FORWARD_HEADING, polygon_boundary_distance, polygon_is_simple, wrap_angle

SCENE_FORMAT = "envloss-scene/1"
HORIZON = 6               # future points, 3 s at 2 Hz
HISTORY_LEN = 7           # 6 past samples plus current
SAMPLE_DT = 0.5           # seconds between samples (2 Hz)

ACTOR_CLASSES = ("vehicle", "pedestrian", "motorcycle")

# Renault Zoe footprint used for the ego vehicle throughout.
EGO_LENGTH = 4.17
EGO_WIDTH = 1.73


class SceneError(ValueError):
    """Scene file failed to parse."""


class SceneValidationError(ValueError):
    """A scene invariant does not hold."""


class GenerationError(RuntimeError):
    """Synthetic generation could not satisfy its constraints."""


@dataclass(frozen=True)
class Pose2:
    """Planar pose; heading is wrapped into (-pi, pi] on construction."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", float(wrap_angle(self.heading)))


@dataclass(frozen=True)
class Actor:
    length: float
    width: float
    history: tuple  # ((Pose2, speed), ...) oldest -> newest, 1..7 entries
    actor_class: str = "vehicle"

    def __post_init__(self):
        if self.actor_class not in ACTOR_CLASSES:
            raise SceneValidationError(
                f"unknown actor class {self.actor_class!r}, expected one of {ACTOR_CLASSES}"
            )
        if not self.length > 0 or not self.width > 0:
            raise SceneValidationError("actor dimensions must be positive")
        if self.actor_class == "vehicle" and self.length < self.width:
            raise SceneValidationError("vehicle length must be >= width")
        n = len(self.history)
        if not 1 <= n <= HISTORY_LEN:
            raise SceneValidationError(
                f"actor history length must be in [1, {HISTORY_LEN}], got {n}"
            )
        object.__setattr__(self, "history", tuple(self.history))

    @property
    def pose(self):
        """Current pose (newest history entry)."""
        return self.history[-1][0]

    @property
    def speed(self):
        return self.history[-1][1]


@dataclass(frozen=True)
class EgoState:
    history: tuple  # exactly 7 (Pose2, speed) samples, oldest -> newest
    acceleration: float = 0.0
    heading_rate: float = 0.0

    def __post_init__(self):
        if len(self.history) != HISTORY_LEN:
            raise SceneValidationError(
                f"expected {HISTORY_LEN} ego history samples, got {len(self.history)}"
            )
        object.__setattr__(self, "history", tuple(self.history))
        cur = self.history[-1][0]
        if abs(cur.x) > 1e-9 or abs(cur.y) > 1e-9 or abs(cur.heading - FORWARD_HEADING) > 1e-9:
            raise SceneValidationError(
                "current ego pose must be the frame origin with heading +y"
            )

    @property
    def speed(self):
        return self.history[-1][1]


@dataclass(frozen=True)
class Trajectory:
    """H=6 future (x, y) points in the ego frame, 0.5 s apart."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (HORIZON, 2):
            raise SceneValidationError(
                f"expected {HORIZON} trajectory points, got {pts.shape[0] if pts.ndim == 2 else pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise SceneValidationError("trajectory points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __eq__(self, other):
        return isinstance(other, Trajectory) and np.array_equal(self.points, other.points)


@dataclass(frozen=True)
class Scene:
    id: str
    road_polygons: tuple  # tuple of (n_i, 2) float arrays, ego frame
    actors: tuple
    ego: EgoState
    expert_future: Trajectory
    _validate_geometry: bool = field(default=True, repr=False)

    def __post_init__(self):
        polys = []
        for i, poly in enumerate(self.road_polygons):
            p = np.asarray(poly, dtype=float)
            if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 3:
                raise SceneValidationError(f"road polygon {i} must be an (n>=3, 2) array")
            if self._validate_geometry and not polygon_is_simple(p):
                raise SceneValidationError(f"road polygon {i} is self-intersecting")
            p.setflags(write=False)
            polys.append(p)
        if not polys:
            raise SceneValidationError("scene needs at least one road polygon")
        object.__setattr__(self, "road_polygons", tuple(polys))
        object.__setattr__(self, "actors", tuple(self.actors))

    @property
    def n_actors(self):
        return len(self.actors)


def _transform_pose(pose, origin, rot_angle, cos_r, sin_r):
    dx = pose.x - origin[0]
    dy = pose.y - origin[1]
    return Pose2(
        cos_r * dx - sin_r * dy,
        sin_r * dx + cos_r * dy,
        pose.heading + rot_angle,
    )


def normalize_frame(road_polygons, actors, ego_history, expert_points):
    """Re-express everything in the frame of the current ego pose.

    Returns (road_polygons, actors, ego_history, expert_points) with the
    current ego pose mapped exactly to (0, 0, pi/2).
    """
    cur, _ = ego_history[-1]
    rot_angle = FORWARD_HEADING - cur.heading
    cos_r, sin_r = math.cos(rot_angle), math.sin(rot_angle)
    origin = (cur.x, cur.y)

    def xf_points(pts):
        pts = np.asarray(pts, dtype=float)
        d = pts - np.array(origin)
        return np.stack(
            [cos_r * d[:, 0] - sin_r * d[:, 1], sin_r * d[:, 0] + cos_r * d[:, 1]], axis=1
        )

    polys = tuple(xf_points(p) for p in road_polygons)
    new_actors = []
    for a in actors:
        hist = tuple(
            (_transform_pose(p, origin, rot_angle, cos_r, sin_r), s) for p, s in a.history
        )
        new_actors.append(Actor(a.length, a.width, hist, a.actor_class))
    new_hist = [
        (_transform_pose(p, origin, rot_angle, cos_r, sin_r), s) for p, s in ego_history
    ]
    # snap the current pose exactly onto the frame definition
    new_hist[-1] = (Pose2(0.0, 0.0, FORWARD_HEADING), new_hist[-1][1])
    expert = xf_points(expert_points)
    return polys, tuple(new_actors), tuple(new_hist), expert


def _require(cond, msg):
    if not cond:
        raise SceneValidationError(msg)


def _pose_sample_from_json(obj, where):
    _require(isinstance(obj, dict), f"{where}: history sample must be an object")
    for key in ("x", "y", "heading", "speed"):
        _require(key in obj, f"{where}: history sample missing field {key!r}")
    return Pose2(obj["x"], obj["y"], obj["heading"]), float(obj["speed"])


def scene_from_dict(doc, fallback_id="scene"):
    """Build a validated, frame-normalized Scene from parsed JSON."""
    _require(isinstance(doc, dict), "scene document must be a JSON object")
    fmt = doc.get("format")
    _require(
        fmt == SCENE_FORMAT,
        f"unsupported scene format {fmt!r}, expected {SCENE_FORMAT!r}",
    )
    scene_id = str(doc.get("id", fallback_id))

    raw_polys = doc.get("road_polygons")
    _require(isinstance(raw_polys, list) and raw_polys, "road_polygons must be a non-empty list")

    actors = []
    for i, a in enumerate(doc.get("actors", [])):
        _require(isinstance(a, dict), f"actor {i} must be an object")
        hist = [
            _pose_sample_from_json(h, f"actor {i}") for h in a.get("history", [])
        ]
        actors.append(
            Actor(
                float(a.get("length", 0.0)),
                float(a.get("width", 0.0)),
                tuple(hist),
                a.get("class", "vehicle"),
            )
        )

    ego_doc = doc.get("ego")
    _require(isinstance(ego_doc, dict), "missing ego object")
    ego_hist = [
        _pose_sample_from_json(h, "ego") for h in ego_doc.get("history", [])
    ]
    _require(
        len(ego_hist) == HISTORY_LEN,
        f"expected {HISTORY_LEN} ego history samples, got {len(ego_hist)}",
    )

    future = doc.get("expert_future")
    _require(isinstance(future, list), "expert_future must be a list")
    _require(
        len(future) == HORIZON,
        f"expected {HORIZON} trajectory points, got {len(future)}",
    )

    polys, actors, ego_hist, expert = normalize_frame(
        raw_polys, actors, ego_hist, np.asarray(future, dtype=float)
    )
    ego = EgoState(
        tuple(ego_hist),
        float(ego_doc.get("acceleration", 0.0)),
        float(ego_doc.get("heading_rate", 0.0)),
    )
    return Scene(scene_id, polys, actors, ego, Trajectory(expert))


def load_scene(path):
    """Load one scene JSON file; raises SceneError / SceneValidationError."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError(f"{path}: parse error at line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        return scene_from_dict(doc, fallback_id=str(path))
    except SceneValidationError as e:
        raise SceneValidationError(f"{path}: {e}") from e


def scene_to_dict(scene):
    def sample(p, s):
        return {"x": p.x, "y": p.y, "heading": p.heading, "speed": s}

    return {
        "format": SCENE_FORMAT,
        "id": scene.id,
        "road_polygons": [np.asarray(p).tolist() for p in scene.road_polygons],
        "actors": [
            {
                "class": a.actor_class,
                "length": a.length,
                "width": a.width,
                "history": [sample(p, s) for p, s in a.history],
            }
            for a in scene.actors
        ],
        "ego": {
            "history": [sample(p, s) for p, s in scene.ego.history],
            "acceleration": scene.ego.acceleration,
            "heading_rate": scene.ego.heading_rate,
        },
        "expert_future": scene.expert_future.points.tolist(),
    }


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=1, sort_keys=True)
        fh.write("\n")


def points_clearance(points, road_polygons):
    """Per-point road clearance, shape (n,).

    For a point inside some polygon this is the largest single-polygon
    interior clearance (a lower bound on the distance to the boundary of
    the polygon union); for a point on no polygon it is minus the
    distance to the nearest polygon.
    """
    from .geometry import points_in_polygon

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    best = np.full(len(pts), -np.inf)
    nearest = np.full(len(pts), np.inf)
    any_inside = np.zeros(len(pts), dtype=bool)
    for poly in road_polygons:
        inside = points_in_polygon(pts, poly)
        d = polygon_boundary_distance(pts, poly)
        best = np.where(inside, np.maximum(best, d), best)
        nearest = np.minimum(nearest, d)
        any_inside |= inside
    return np.where(any_inside, best, -nearest)


def expert_clearance(scene):
    """Smallest road clearance over the expert future points; negative when
    some point lies outside every road polygon."""
    return float(np.min(points_clearance(scene.expert_future.points, scene.road_polygons)))
