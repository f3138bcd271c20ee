"""Scenario geometry and configuration.

Static network layout for one episode: a fixed base station and RIS, K
user UAVs and one sensing target UAV that drift along straight tracks
over L time slots. All distances are in meters, powers in dBm at this
boundary (converted to watts inside the solvers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "Position3D",
    "ScenarioConfig",
    "SlotGeometry",
    "ConfigError",
    "distance",
    "link_angle",
    "geometry_at_slot",
    "default_scenario",
    "parse_config_text",
    "build_config",
    "load_config",
    "config_to_text",
    "save_config",
    "SCENARIO_KEYS",
]

MIN_LINK_DISTANCE_M = 1.0


class ConfigError(ValueError):
    """Raised for malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def as_tuple(self):
        return (self.x, self.y, self.z)


def distance(p: Position3D, q: Position3D) -> float:
    """Euclidean distance between two points in meters."""
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)


def link_angle(tx: Position3D, rx: Position3D) -> float:
    """Elevation angle of the tx->rx ray, arcsin(dz / d).

    Arrays are vertical uniform linear arrays, so only the elevation
    enters the steering vectors; the same convention is applied at both
    ends of every link (angle seen at a node uses that node as tx).
    """
    d = distance(tx, rx)
    if d <= 0.0:
        raise ValueError("link_angle requires distinct endpoints")
    # guard arcsin domain against rounding
    s = max(-1.0, min(1.0, (rx.z - tx.z) / d))
    return math.asin(s)


@dataclass(frozen=True)
class ScenarioConfig:
    """Immutable scenario description; fields in config-file units."""

    m_antennas: int = 6
    n_elements: int = 32
    k_users: int = 4
    l_slots: int = 5
    p_max_dbm: float = 33.0
    gamma_db: float = 4.0
    sigma_k_dbm: float = -90.0
    sigma_t_dbm: float = -90.0
    beta0_db: float = -30.0
    kappa_bs_ris_db: float = 3.0
    kappa_bs_luav_db: float = 3.0
    kappa_ris_luav_db: float = 3.0
    alpha_bs_ris: float = 2.2
    alpha_ris_luav: float = 2.3
    alpha_bs_uuav: float = 2.4
    alpha_ris_uuav: float = 2.2
    alpha_bs_luav: float = 3.5
    seed: int = 0
    pos_bs: Position3D = Position3D(0.0, 0.0, 10.0)
    pos_ris: Position3D = Position3D(128.0, 6.0, 15.0)
    # luav_paths[k][l] is user k at slot l; uuav_path[l] the target at slot l
    luav_paths: tuple = ()
    uuav_path: tuple = ()

    def __post_init__(self):
        if self.m_antennas < 1:
            raise ConfigError("m_antennas must be >= 1")
        if self.n_elements < 0:
            raise ConfigError("n_elements must be >= 0")
        if self.k_users < 1:
            raise ConfigError("k_users must be >= 1")
        if self.l_slots < 1:
            raise ConfigError("l_slots must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if len(self.luav_paths) != self.k_users:
            raise ConfigError(
                f"luav_paths has {len(self.luav_paths)} tracks, expected k_users={self.k_users}")
        for k, path in enumerate(self.luav_paths):
            if len(path) != self.l_slots:
                raise ConfigError(
                    f"luav track {k + 1} has {len(path)} slots, expected l_slots={self.l_slots}")
        if len(self.uuav_path) != self.l_slots:
            raise ConfigError(
                f"uuav_path has {len(self.uuav_path)} slots, expected l_slots={self.l_slots}")

    # linear-unit views; everything downstream works in watts
    @property
    def p_max_w(self) -> float:
        return dbm_to_watt(self.p_max_dbm)

    @property
    def sigma_k_w(self) -> float:
        return dbm_to_watt(self.sigma_k_dbm)

    @property
    def sigma_t_w(self) -> float:
        return dbm_to_watt(self.sigma_t_dbm)

    @property
    def gamma_lin(self) -> float:
        return db_to_lin(self.gamma_db)


def dbm_to_watt(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0) * 1e-3


def watt_to_dbm(x_w: float) -> float:
    if x_w <= 0.0:
        raise ValueError("watt_to_dbm requires a positive power")
    return 10.0 * math.log10(x_w / 1e-3)


def db_to_lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def lin_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("lin_to_db requires a positive ratio")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SlotGeometry:
    """Node positions at one slot, with link distances precomputed."""

    pos_bs: Position3D
    pos_ris: Position3D
    luav: tuple          # K positions
    uuav: Position3D
    d_bs_ris: float = field(init=False)
    d_bs_luav: tuple = field(init=False)
    d_ris_luav: tuple = field(init=False)
    d_bs_uuav: float = field(init=False)
    d_ris_uuav: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "d_bs_ris", distance(self.pos_bs, self.pos_ris))
        object.__setattr__(self, "d_bs_luav",
                           tuple(distance(self.pos_bs, p) for p in self.luav))
        object.__setattr__(self, "d_ris_luav",
                           tuple(distance(self.pos_ris, p) for p in self.luav))
        object.__setattr__(self, "d_bs_uuav", distance(self.pos_bs, self.uuav))
        object.__setattr__(self, "d_ris_uuav", distance(self.pos_ris, self.uuav))


def geometry_at_slot(cfg: ScenarioConfig, slot: int) -> SlotGeometry:
    """Positions and link distances at 0-based slot index.

    Raises ValueError if any modeled link is shorter than 1 m; the
    far-field path-loss model is meaningless below that.
    """
    if not 0 <= slot < cfg.l_slots:
        raise ValueError(f"slot index {slot} outside [0, {cfg.l_slots})")
    geo = SlotGeometry(
        pos_bs=cfg.pos_bs,
        pos_ris=cfg.pos_ris,
        luav=tuple(cfg.luav_paths[k][slot] for k in range(cfg.k_users)),
        uuav=cfg.uuav_path[slot],
    )
    dists = [geo.d_bs_ris, geo.d_bs_uuav, geo.d_ris_uuav]
    dists += list(geo.d_bs_luav) + list(geo.d_ris_luav)
    if min(dists) < MIN_LINK_DISTANCE_M:
        raise ValueError(
            f"link distance {min(dists):.3f} m below {MIN_LINK_DISTANCE_M} m at slot {slot}")
    return geo


# default layout: users cluster 120..160 m downrange with the RIS right
# next to them, the sensing target loiters near the base station where
# the two-way echo still clears the radar SNR floor at the lowest
# transmit power on the sweep grid (21 dBm).
_UAV_HEIGHT_M = 25.0
_LUAV_SQUARE_CENTER = (140.0, 0.0)
_LUAV_SQUARE_SIDE = 40.0
_LUAV_SPEED_M_PER_SLOT = 2.0
_UUAV_START = (8.0, 4.0)
_UUAV_DRIFT = (-1.2, 1.6)  # 2 m per slot at heading atan2(1.6, -1.2)


def _default_luav_paths(k_users: int, l_slots: int):
    """Start users on a grid inside the square, drift at fixed headings."""
    g = math.ceil(math.sqrt(k_users))
    cx, cy = _LUAV_SQUARE_CENTER
    side = _LUAV_SQUARE_SIDE
    starts = []
    for i in range(g):
        for j in range(g):
            if len(starts) == k_users:
                break
            x = cx - side / 2.0 + side * (i + 0.5) / g
            y = cy - side / 2.0 + side * (j + 0.5) / g
            starts.append((x, y))
    paths = []
    for k, (x0, y0) in enumerate(starts):
        heading = 2.0 * math.pi * k / k_users
        dx = _LUAV_SPEED_M_PER_SLOT * math.cos(heading)
        dy = _LUAV_SPEED_M_PER_SLOT * math.sin(heading)
        paths.append(tuple(
            Position3D(x0 + l * dx, y0 + l * dy, _UAV_HEIGHT_M) for l in range(l_slots)))
    return tuple(paths)


def _default_uuav_path(l_slots: int):
    x0, y0 = _UUAV_START
    dx, dy = _UUAV_DRIFT
    return tuple(
        Position3D(x0 + l * dx, y0 + l * dy, _UAV_HEIGHT_M) for l in range(l_slots))


def default_scenario(**overrides) -> ScenarioConfig:
    """Baseline scenario; keyword overrides regenerate the UAV tracks
    for the requested k_users / l_slots unless tracks are given explicitly.
    """
    fields = dict(overrides)
    k_users = int(fields.get("k_users", 4))
    l_slots = int(fields.get("l_slots", 5))
    fields.setdefault("luav_paths", _default_luav_paths(k_users, l_slots))
    fields.setdefault("uuav_path", _default_uuav_path(l_slots))
    return ScenarioConfig(**fields)


# ---------------------------------------------------------------------------
# plain-text config files: one "key = value" per line, # comments,
# positions as comma-separated x,y,z triples


_INT_KEYS = ("m_antennas", "n_elements", "k_users", "l_slots", "seed")
_FLOAT_KEYS = (
    "p_max_dbm", "gamma_db", "sigma_k_dbm", "sigma_t_dbm", "beta0_db",
    "kappa_bs_ris_db", "kappa_bs_luav_db", "kappa_ris_luav_db",
    "alpha_bs_ris", "alpha_ris_luav", "alpha_bs_uuav", "alpha_ris_uuav",
    "alpha_bs_luav",
)
_POS_KEYS = ("pos_bs", "pos_ris")

SCENARIO_KEYS = _INT_KEYS + _FLOAT_KEYS + _POS_KEYS


def parse_config_text(text: str) -> dict:
    """Parse key = value lines into a raw string mapping."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _parse_triple(key: str, value: str) -> Position3D:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected 'x,y,z', got {value!r}")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{key}: non-numeric coordinate in {value!r}") from exc
    return Position3D(x, y, z)


def _track_keys(k_users: int, l_slots: int):
    keys = []
    for k in range(1, k_users + 1):
        for l in range(1, l_slots + 1):
            keys.append(f"luav{k}_slot{l}")
    keys += [f"uuav_slot{l}" for l in range(1, l_slots + 1)]
    return keys


def build_config(raw: dict) -> ScenarioConfig:
    """Turn a raw key/value mapping into a validated ScenarioConfig.

    Track keys (luav{k}_slot{l}, uuav_slot{l}) are optional; if any is
    present, the complete set for the configured k_users and l_slots is
    required. Unknown keys are rejected.
    """
    fields = {}
    for key in _INT_KEYS:
        if key in raw:
            try:
                fields[key] = int(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: expected integer, got {raw[key]!r}") from exc
    for key in _FLOAT_KEYS:
        if key in raw:
            try:
                fields[key] = float(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: expected number, got {raw[key]!r}") from exc
    for key in _POS_KEYS:
        if key in raw:
            fields[key] = _parse_triple(key, raw[key])

    k_users = int(fields.get("k_users", 4))
    l_slots = int(fields.get("l_slots", 5))
    track_keys = _track_keys(k_users, l_slots)
    present = [key for key in track_keys if key in raw]
    known = set(SCENARIO_KEYS) | set(track_keys)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if present and len(present) != len(track_keys):
        missing = sorted(set(track_keys) - set(present))
        raise ConfigError(
            f"incomplete UAV tracks: missing {', '.join(missing[:4])}"
            + (" ..." if len(missing) > 4 else ""))
    if present:
        fields["luav_paths"] = tuple(
            tuple(_parse_triple(f"luav{k}_slot{l}", raw[f"luav{k}_slot{l}"])
                  for l in range(1, l_slots + 1))
            for k in range(1, k_users + 1))
        fields["uuav_path"] = tuple(
            _parse_triple(f"uuav_slot{l}", raw[f"uuav_slot{l}"])
            for l in range(1, l_slots + 1))
    try:
        return default_scenario(**fields)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return build_config(parse_config_text(fh.read()))


def _fmt(x: float) -> str:
    return repr(float(x))


def config_to_text(cfg: ScenarioConfig) -> str:
    """Serialize a config so that load_config round-trips it exactly."""
    lines = []
    for key in _INT_KEYS:
        lines.append(f"{key} = {getattr(cfg, key)}")
    for key in _FLOAT_KEYS:
        lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    for key in _POS_KEYS:
        p = getattr(cfg, key)
        lines.append(f"{key} = {_fmt(p.x)},{_fmt(p.y)},{_fmt(p.z)}")
    for k in range(cfg.k_users):
        for l in range(cfg.l_slots):
            p = cfg.luav_paths[k][l]
            lines.append(f"luav{k + 1}_slot{l + 1} = {_fmt(p.x)},{_fmt(p.y)},{_fmt(p.z)}")
    for l in range(cfg.l_slots):
        p = cfg.uuav_path[l]
        lines.append(f"uuav_slot{l + 1} = {_fmt(p.x)},{_fmt(p.y)},{_fmt(p.z)}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_text(cfg))


def with_overrides(cfg: ScenarioConfig, **changes) -> ScenarioConfig:
    """Copy a config with some fields replaced; UAV tracks are
    regenerated when k_users or l_slots change without explicit tracks.
    """
    if ("k_users" in changes or "l_slots" in changes) and \
            "luav_paths" not in changes and "uuav_path" not in changes:
        k_users = int(changes.get("k_users", cfg.k_users))
        l_slots = int(changes.get("l_slots", cfg.l_slots))
        changes["luav_paths"] = _default_luav_paths(k_users, l_slots)
        changes["uuav_path"] = _default_uuav_path(l_slots)
    return replace(cfg, **changes)
