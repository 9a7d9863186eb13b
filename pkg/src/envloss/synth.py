"""Seeded synthetic scene generation and sliding-window example extraction.

Scenes are built around a lane path through the ego origin: a straight
road, a constant-radius curve, or a T-intersection where the lane turns
onto a crossing road. Other actors are placed relative to that path so
that interesting proximity actually occurs at desk scale.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import FORWARD_HEADING, boxes_overlap, wrap_angle
from .scene import (
    EGO_LENGTH,
    EGO_WIDTH,
    HISTORY_LEN,
    HORIZON,
    SAMPLE_DT,
    Actor,
    EgoState,
    GenerationError,
    Pose2,
    Scene,
    Trajectory,
    normalize_frame,
    points_clearance,
)

TEMPLATES = ("straight", "curve", "t_intersection")

WINDOW = HISTORY_LEN + HORIZON  # 13 samples per training window
WINDOW_STRIDE = 2               # 1 s at 2 Hz

_MARGIN = EGO_WIDTH / 2.0       # minimum expert clearance to the road edge


@dataclass(frozen=True)
class GeneratorConfig:
    templates: tuple = TEMPLATES
    n_actors: tuple = (1, 4)
    ego_speed: tuple = (2.5, 6.0)
    actor_speed: tuple = (0.0, 6.0)
    road_width: tuple = (7.0, 9.0)
    curve_radius: tuple = (12.0, 25.0)
    lane_offset_frac: float = 0.25  # lane center offset from road center, in widths
    challenge_prob: float = 0.75    # chance of an actor parked/moving close to the path
    lead_prob: float = 0.35         # chance of a stopped actor on the lane past the horizon
    max_attempts: int = 80


@dataclass(frozen=True)
class _Segment:
    s_lo: float
    s_hi: float
    x0: float
    y0: float
    h0: float
    kappa: float

    def pose(self, s):
        ds = s - self.s_lo
        if self.kappa == 0.0:
            return (
                self.x0 + ds * math.cos(self.h0),
                self.y0 + ds * math.sin(self.h0),
                self.h0,
            )
        k = self.kappa
        h = self.h0 + k * ds
        return (
            self.x0 + (math.sin(h) - math.sin(self.h0)) / k,
            self.y0 + (math.cos(self.h0) - math.cos(h)) / k,
            h,
        )


class _LanePath:
    """Piecewise straight/arc lane path; s=0 is the current ego position."""

    def __init__(self, segments):
        self.segments = segments

    def pose(self, s):
        segs = self.segments
        for seg in segs:
            if s <= seg.s_hi or seg is segs[-1]:
                if s >= seg.s_lo or seg is segs[0]:
                    x, y, h = seg.pose(s)
                    return Pose2(x, y, h)
        raise ValueError("unreachable")

    def curvature(self, s):
        for seg in self.segments:
            if s <= seg.s_hi or seg is self.segments[-1]:
                if s >= seg.s_lo or seg is self.segments[0]:
                    return seg.kappa
        return 0.0

    def sweep_polygon(self, s_lo, s_hi, left, right, step=0.8):
        """Corridor polygon between lateral offsets `left` (+normal) and
        `right` (-normal) swept along the path."""
        n = max(int(math.ceil((s_hi - s_lo) / step)), 2)
        svals = np.linspace(s_lo, s_hi, n + 1)
        lpts, rpts = [], []
        for s in svals:
            p = self.pose(s)
            nx, ny = -math.sin(p.heading), math.cos(p.heading)
            lpts.append((p.x + left * nx, p.y + left * ny))
            rpts.append((p.x - right * nx, p.y - right * ny))
        return np.array(lpts + rpts[::-1])


def _build_straight(rng, cfg, v):
    w = rng.uniform(*cfg.road_width)
    off = cfg.lane_offset_frac * w
    s_back = 3.0 * v + 4.0
    s_fwd = 3.0 * v + 16.0
    path = _LanePath(
        [_Segment(-s_back - 6, s_fwd + 6, 0.0, -s_back - 6, FORWARD_HEADING, 0.0)]
    )
    poly = path.sweep_polygon(-s_back - 5, s_fwd + 5, w / 2.0 + off, w / 2.0 - off)
    return path, [poly], w


def _arc_path(s_lo, s_hi, kappa):
    """Single-curvature path anchored so that pose(0) is the origin, +y."""
    sx, sy, sh = _Segment(0.0, 0.0, 0.0, 0.0, FORWARD_HEADING, kappa).pose(s_lo)
    return _LanePath([_Segment(s_lo, s_hi, sx, sy, sh, kappa)])


def _build_curve(rng, cfg, v):
    w = rng.uniform(*cfg.road_width)
    off = cfg.lane_offset_frac * w
    radius = rng.uniform(*cfg.curve_radius)
    turn = 1.0 if rng.random() < 0.5 else -1.0
    s_back = 3.0 * v + 4.0
    s_fwd = 3.0 * v + 16.0
    path = _arc_path(-s_back - 6, s_fwd + 6, turn / radius)
    poly = path.sweep_polygon(
        -s_back - 5, s_fwd + 5, w / 2.0 + off, w / 2.0 - off, step=0.5
    )
    return path, [poly], w


def _build_t_intersection(rng, cfg, v):
    w = rng.uniform(8.8, 9.6)
    off = cfg.lane_offset_frac * w
    r_max = (math.sqrt(2.0) * w / 4.0 - _MARGIN - 0.35) / (math.sqrt(2.0) - 1.0)
    radius = rng.uniform(3.0, min(3.6, r_max))
    turn_right = rng.random() < 0.5
    y_t = rng.uniform(10.0, 15.0)
    s_back = 3.0 * v + 4.0

    if turn_right:
        y_lane = y_t - off
        kappa = -1.0 / radius
        bar_dir = 0.0
    else:
        y_lane = y_t + off
        kappa = 1.0 / radius
        bar_dir = math.pi

    run = y_lane - radius  # straight stem distance before the arc begins
    if run < 1.0:
        return None
    stem = _Segment(-s_back - 6, run, 0.0, -s_back - 6, FORWARD_HEADING, 0.0)
    arc_len = radius * math.pi / 2.0
    ax, ay, ah = stem.pose(run)
    arc = _Segment(run, run + arc_len, ax, ay, ah, kappa)
    bx, by, bh = arc.pose(run + arc_len)
    tail = _Segment(run + arc_len, run + arc_len + 30.0, bx, by, bh, 0.0)
    path = _LanePath([stem, arc, tail])

    stem_poly = np.array(
        [
            (-off - w / 2.0, -s_back - 5),
            (-off + w / 2.0, -s_back - 5),
            (-off + w / 2.0, y_t + w / 2.0),
            (-off - w / 2.0, y_t + w / 2.0),
        ]
    )[::-1]
    long_side, short_side = 28.0, 7.0
    if turn_right:
        x_lo, x_hi = -off - w / 2.0 - short_side, long_side
    else:
        x_lo, x_hi = -long_side, -off + w / 2.0 + short_side
    bar_poly = np.array(
        [(x_lo, y_t - w / 2.0), (x_hi, y_t - w / 2.0), (x_hi, y_t + w / 2.0), (x_lo, y_t + w / 2.0)]
    )
    return path, [stem_poly, bar_poly], w


_ACTOR_DIMS = {
    "vehicle": ((4.0, 5.2), (1.7, 2.1)),
    "pedestrian": ((0.6, 0.6), (0.6, 0.6)),
    "motorcycle": ((2.2, 2.2), (0.8, 0.8)),
}


def _constant_velocity_history(pose, speed, n=HISTORY_LEN):
    dx = speed * SAMPLE_DT * math.cos(pose.heading)
    dy = speed * SAMPLE_DT * math.sin(pose.heading)
    hist = []
    for j in range(n - 1, -1, -1):  # j steps in the past, oldest first
        hist.append((Pose2(pose.x - j * dx, pose.y - j * dy, pose.heading), speed))
    return tuple(hist)


def _make_actor(rng, actor_class, pose, speed):
    (llo, lhi), (wlo, whi) = _ACTOR_DIMS[actor_class]
    length = rng.uniform(llo, lhi) if lhi > llo else llo
    width = rng.uniform(wlo, whi) if whi > wlo else wlo
    width = min(width, length)
    return Actor(length, width, _constant_velocity_history(pose, speed), actor_class)


def _sample_actor(rng, cfg, path, v, kind):
    """Draw an actor pose relative to the lane path. kind: challenge|lead|filler."""
    if kind == "lead":
        s_hi = min(3.0 * v + 10.0, 19.0)
        s_lo = 3.0 * v + 5.0
        if s_lo >= s_hi:
            return None
        s = rng.uniform(s_lo, s_hi)
        lateral = rng.uniform(-0.4, 0.4)
        speed = 0.0
        actor_class = "vehicle"
        oncoming = False
    elif kind == "challenge":
        s = rng.uniform(3.0, max(3.0 * v, 6.0))
        side = 1.0 if rng.random() < 0.5 else -1.0
        actor_class = "pedestrian" if rng.random() < 0.2 else "vehicle"
        base = 2.4 if actor_class == "vehicle" else 1.9
        lateral = side * rng.uniform(base, base + 2.0)
        speed = 0.0 if rng.random() < 0.5 else rng.uniform(0.5, 3.0)
        oncoming = side > 0 and actor_class == "vehicle" and rng.random() < 0.6
    else:
        s = rng.uniform(-8.0, 3.0 * v + 12.0)
        side = 1.0 if rng.random() < 0.5 else -1.0
        lateral = side * rng.uniform(2.4, 6.5)
        u = rng.random()
        actor_class = "vehicle" if u < 0.7 else ("pedestrian" if u < 0.85 else "motorcycle")
        speed = rng.uniform(*cfg.actor_speed)
        oncoming = side > 0 and rng.random() < 0.5
    p = path.pose(s)
    nx, ny = -math.sin(p.heading), math.cos(p.heading)
    heading = p.heading + (math.pi if oncoming else 0.0) + rng.uniform(-0.12, 0.12)
    pose = Pose2(p.x + lateral * nx, p.y + lateral * ny, heading)
    return _make_actor(rng, actor_class, pose, speed)


def _ego_box_at(pose):
    return (pose.x, pose.y, pose.heading, EGO_LENGTH, EGO_WIDTH)


def generate_scene(seed, config=None):
    """Deterministically generate one validated Scene for (seed, config)."""
    cfg = config or GeneratorConfig()
    rng = np.random.default_rng(seed)
    builders = {
        "straight": _build_straight,
        "curve": _build_curve,
        "t_intersection": _build_t_intersection,
    }
    for name in cfg.templates:
        if name not in builders:
            raise GenerationError(f"unknown road template {name!r}")

    for _ in range(cfg.max_attempts):
        template = cfg.templates[int(rng.integers(len(cfg.templates)))]
        v = rng.uniform(*cfg.ego_speed)
        if template == "t_intersection":
            v = min(v, 4.2)  # junction turns are tight
        built = builders[template](rng, cfg, v)
        if built is None:
            continue
        path, polys, width = built

        ego_hist = tuple(
            (path.pose(v * SAMPLE_DT * (j - (HISTORY_LEN - 1))), v) for j in range(HISTORY_LEN)
        )
        future = np.array(
            [(p.x, p.y) for p in (path.pose(v * SAMPLE_DT * (k + 1)) for k in range(HORIZON))]
        )
        if np.min(points_clearance(future, polys)) < _MARGIN + 0.05:
            continue

        expert_boxes = [
            _ego_box_at(path.pose(v * SAMPLE_DT * (k + 1))) for k in range(HORIZON)
        ]
        ego_now = _ego_box_at(ego_hist[-1][0])

        n_actors = int(rng.integers(cfg.n_actors[0], cfg.n_actors[1] + 1))
        kinds = []
        if n_actors > 0 and rng.random() < cfg.challenge_prob:
            kinds.append("challenge")
        if len(kinds) < n_actors and rng.random() < cfg.lead_prob:
            kinds.append("lead")
        kinds.extend(["filler"] * (n_actors - len(kinds)))

        actors = []
        ok = True
        for kind in kinds:
            placed = None
            for _ in range(60):
                cand = _sample_actor(rng, cfg, path, v, kind)
                if cand is None:
                    break
                box = (
                    cand.pose.x,
                    cand.pose.y,
                    cand.pose.heading,
                    cand.length,
                    cand.width,
                )
                if boxes_overlap(box, ego_now):
                    continue
                if any(boxes_overlap(box, eb) for eb in expert_boxes):
                    continue
                placed = cand
                break
            if placed is None and kind != "lead":
                ok = False
                break
            if placed is not None:
                actors.append(placed)
        if not ok:
            continue

        polys_n, actors_n, hist_n, future_n = normalize_frame(
            polys, actors, list(ego_hist), future
        )
        ego = EgoState(hist_n, acceleration=0.0, heading_rate=path.curvature(0.0) * v)
        return Scene(
            f"gen-{seed:08d}",
            polys_n,
            actors_n,
            ego,
            Trajectory(future_n),
        )
    raise GenerationError(
        f"could not generate a valid scene for seed={seed} within {cfg.max_attempts} attempts"
    )


def generate_corpus(base_seed, count, config=None):
    """Generate `count` scenes with consecutive seeds starting at base_seed."""
    return [generate_scene(base_seed + i, config) for i in range(count)]


@dataclass(frozen=True)
class ActorTrack:
    actor_class: str
    length: float
    width: float
    states: tuple  # ((Pose2, speed), ...) one entry per sequence step


@dataclass(frozen=True)
class SceneSequence:
    """A recorded drive: per-step ego and actor states over a static road."""

    id: str
    road_polygons: tuple
    ego_track: tuple  # ((Pose2, speed), ...)
    actor_tracks: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.ego_track)


def generate_sequence(seed, config=None, n_steps=40):
    """A longer seeded drive along one road template, for window extraction."""
    cfg = config or GeneratorConfig()
    rng = np.random.default_rng(seed)
    v = rng.uniform(cfg.ego_speed[0], min(cfg.ego_speed[1], 4.2))
    length_needed = n_steps * SAMPLE_DT * v + 10.0
    template = cfg.templates[int(rng.integers(len(cfg.templates)))]
    if template == "curve":
        radius = max(cfg.curve_radius[1], length_needed / 4.5)
        sub = GeneratorConfig(
            templates=("curve",), curve_radius=(radius, radius), road_width=cfg.road_width
        )
        path, polys, width = _build_curve(rng, sub, v)
        path.segments = [
            _Segment(
                -6.0,
                length_needed,
                *_Segment(0, 0, 0.0, 0.0, FORWARD_HEADING, path.segments[0].kappa).pose(-6.0),
                path.segments[0].kappa,
            )
        ]
        polys = [path.sweep_polygon(-5.0, length_needed, width * 0.75, width * 0.25, step=0.5)]
    elif template == "t_intersection":
        built = None
        while built is None:
            built = _build_t_intersection(rng, cfg, v)
        path, polys, width = built
        tail = path.segments[-1]
        path.segments[-1] = _Segment(
            tail.s_lo, tail.s_lo + length_needed, tail.x0, tail.y0, tail.h0, 0.0
        )
        if length_needed > 20.0:  # stretch the crossing road to fit the drive
            polys = [polys[0], _stretch_bar(polys[1], length_needed)]
    else:
        path = _LanePath([_Segment(-6.0, length_needed, 0.0, -6.0, FORWARD_HEADING, 0.0)])
        w = rng.uniform(*cfg.road_width)
        off = cfg.lane_offset_frac * w
        polys = [path.sweep_polygon(-5.0, length_needed, w / 2.0 + off, w / 2.0 - off)]

    ego_track = tuple(
        (path.pose(v * SAMPLE_DT * i), v) for i in range(n_steps)
    )

    tracks = []
    for _ in range(int(rng.integers(cfg.n_actors[0], cfg.n_actors[1] + 1))):
        s = rng.uniform(0.0, length_needed * 0.8)
        side = 1.0 if rng.random() < 0.5 else -1.0
        p = path.pose(s)
        nx, ny = -math.sin(p.heading), math.cos(p.heading)
        lateral = side * rng.uniform(2.4, 5.5)
        heading = p.heading + rng.uniform(-0.1, 0.1)
        speed = rng.uniform(0.0, 3.0)
        states = []
        for i in range(n_steps):
            t = i * SAMPLE_DT
            states.append(
                (
                    Pose2(
                        p.x + lateral * nx + speed * t * math.cos(heading),
                        p.y + lateral * ny + speed * t * math.sin(heading),
                        heading,
                    ),
                    speed,
                )
            )
        (llo, lhi), (wlo, whi) = _ACTOR_DIMS["vehicle"]
        tracks.append(
            ActorTrack("vehicle", rng.uniform(llo, lhi), rng.uniform(wlo, whi), tuple(states))
        )
    return SceneSequence(f"seq-{seed:08d}", tuple(np.asarray(p) for p in polys), ego_track, tuple(tracks))


def _stretch_bar(bar_poly, length_needed):
    p = np.array(bar_poly, dtype=float)
    x_lo, x_hi = p[:, 0].min(), p[:, 0].max()
    if abs(x_hi) > abs(x_lo):
        p[p[:, 0] == x_hi, 0] = max(x_hi, length_needed + 5.0)
    else:
        p[p[:, 0] == x_lo, 0] = min(x_lo, -(length_needed + 5.0))
    return p


def window_examples(sequences):
    """Cut sequences into training Scenes with a 13-sample window, 1 s stride.

    Each window yields one example re-expressed in the frame of that
    window's current ego pose: 7 history samples and 6 future targets.
    """
    examples = []
    skipped = 0
    for seq in sequences:
        n = len(seq.ego_track)
        if n < WINDOW:
            skipped += 1
            continue
        for w0 in range(0, n - WINDOW + 1, WINDOW_STRIDE):
            cur = w0 + HISTORY_LEN - 1
            hist = list(seq.ego_track[w0 : cur + 1])
            future = np.array(
                [(p.x, p.y) for p, _ in seq.ego_track[cur + 1 : cur + 1 + HORIZON]]
            )
            actors = [
                Actor(
                    tr.length,
                    tr.width,
                    tuple(tr.states[w0 : cur + 1]),
                    tr.actor_class,
                )
                for tr in seq.actor_tracks
            ]
            polys, actors_n, hist_n, future_n = normalize_frame(
                seq.road_polygons, actors, hist, future
            )
            (p_cur, v_cur), (p_prev, v_prev) = hist[-1], hist[-2]
            accel = (v_cur - v_prev) / SAMPLE_DT
            heading_rate = float(wrap_angle(p_cur.heading - p_prev.heading)) / SAMPLE_DT
            ego = EgoState(hist_n, accel, heading_rate)
            examples.append(
                Scene(
                    f"{seq.id}-w{w0:03d}",
                    polys,
                    actors_n,
                    ego,
                    Trajectory(future_n),
                    _validate_geometry=False,
                )
            )
    if skipped:
        warnings.warn(f"skipped {skipped} sequence(s) shorter than {WINDOW} samples")
    return examples
