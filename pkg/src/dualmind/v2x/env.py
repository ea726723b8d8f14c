"""Discrete-time road environment: mobility, links, ages, reward.

Each slot the environment exposes an observation {ages, per-vehicle
infrastructure channel features, positions}, accepts a node-disjoint link
schedule, applies the rate-dependent age recursion, and reports the mean
age penalty as reward.  Age bookkeeping uses a freshness anchor per
vehicle: the anchor of freshly generated roadside data is the current slot
index, partial deliveries blend the source anchor with the receiver's
current age, and age is always (slot - anchor + 1) at update time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ContractError
from . import channel as ch
from .config import SPEED_OF_LIGHT, EnvConfig


@dataclass
class VehicleState:
    """Kinematics plus freshness bookkeeping for one vehicle."""

    x: float
    lane: int
    speed: float
    height: float
    caoi: float = 1.0
    anchor: float = 0.0  # freshness anchor of the newest data held
    buffered: float = 0.0  # packets held from the last successful reception


@dataclass(frozen=True)
class LinkSchedule:
    """One slot's action: RSU downlink receivers and peer (tx, rx) pairs."""

    v2i: tuple[int, ...] = ()
    v2v: tuple[tuple[int, int], ...] = ()

    def nodes(self):
        used = list(self.v2i)
        for tx, rx in self.v2v:
            used.append(tx)
            used.append(rx)
        return used

    @classmethod
    def from_choices(cls, choices, n_vehicles):
        """Decode per-vehicle receive choices (0=RSU, 1..n=peer, last=idle)."""
        v2i = []
        v2v = []
        for v, c in enumerate(choices[:n_vehicles]):
            c = int(c)
            if c == 0:
                v2i.append(v)
            elif 1 <= c <= n_vehicles:
                v2v.append((c - 1, v))
        return cls(tuple(v2i), tuple(v2v))

    def to_choices(self, max_vehicles):
        choices = np.full(max_vehicles, max_vehicles + 1, dtype=np.int64)
        for v in self.v2i:
            choices[v] = 0
        for tx, rx in self.v2v:
            choices[rx] = tx + 1
        return choices


@dataclass
class NetworkObservation:
    """Per-slot bundle: ages, infrastructure channel features, positions."""

    caoi: np.ndarray  # (V,)
    channel: np.ndarray  # (V, 5): gain dB, LoS flag, delay s, AoD rad, AoA rad
    positions: np.ndarray  # (V, 2)

    def __post_init__(self):
        if not (
            np.all(np.isfinite(self.caoi))
            and np.all(np.isfinite(self.channel))
            and np.all(np.isfinite(self.positions))
        ):
            raise ContractError("NetworkObservation entries must be finite")


def validate_schedule(schedule, n_vehicles, rsu_max_links):
    """True iff the schedule is node-disjoint, in range, and within RSU capacity."""
    if len(schedule.v2i) > rsu_max_links:
        return False
    nodes = schedule.nodes()
    for v in nodes:
        if not 0 <= v < n_vehicles:
            return False
    if len(set(nodes)) != len(nodes):
        return False
    for tx, rx in schedule.v2v:
        if tx == rx:
            return False
    return True


def reward(ages, tolerance):
    """Mean age penalty; ages above the tolerance are double-counted."""
    ages = np.asarray(ages, dtype=np.float64)
    over = ages > tolerance
    per_vehicle = ages - np.where(over, tolerance - ages, 0.0)
    return -float(per_vehicle.mean())


def caoi_update(ages, anchors, buffers, t, schedule, v2i_rates, v2v_rates, rsu_packets):
    """One slot of the age recursion.

    Unserved vehicles age by one.  A served vehicle's new anchor is the
    source anchor when the whole packet batch fits through the link,
    otherwise the rate-weighted blend of source anchor and own age; its new
    age is (t - anchor + 1).  Receivers buffer what was actually delivered,
    capped at the roadside batch size.  The roadside unit always holds
    freshly generated data, so its anchor is the current slot.
    """
    ages = np.asarray(ages, dtype=np.float64).copy()
    anchors = np.asarray(anchors, dtype=np.float64).copy()
    buffers = np.asarray(buffers, dtype=np.float64).copy()
    served = np.zeros(ages.shape[0], dtype=bool)
    c_u = float(rsu_packets)

    for v in schedule.v2i:
        whole = math.floor(v2i_rates[v])
        if whole >= c_u:
            anchor = float(t)
        else:
            anchor = (whole / c_u) * float(t) + ((c_u - whole) / c_u) * ages[v]
        ages[v] = float(t) - anchor + 1.0
        anchors[v] = anchor
        buffers[v] = min(whole, c_u)
        served[v] = True

    for tx, rx in schedule.v2v:
        whole = math.floor(v2v_rates[tx, rx])
        held = buffers[tx]
        src_anchor = anchors[tx]
        if whole >= held:
            anchor = (held / c_u) * src_anchor + ((c_u - held) / c_u) * ages[rx]
            delivered = held
        else:
            anchor = (whole / c_u) * src_anchor + ((c_u - whole) / c_u) * ages[rx]
            delivered = whole
        ages[rx] = float(t) - anchor + 1.0
        anchors[rx] = anchor
        buffers[rx] = min(delivered, c_u)
        served[rx] = True

    ages[~served] += 1.0
    return ages, anchors, buffers


def step_mobility(vehicles, dt, cfg, rng):
    """Advance positions one slot.

    No lane changes.  Within a lane, followers are clamped so the gap to
    the vehicle ahead never drops below the security distance.  A vehicle
    leaving the far end re-enters at the start of the lane with the most
    rear headroom, with a freshly sampled speed; when the entry itself is
    too close to traffic, it starts just behind the road (negative x) and
    drives in.
    """
    vehicles = [replace(v) for v in vehicles]
    by_lane = {}
    for idx, v in enumerate(vehicles):
        by_lane.setdefault(v.lane, []).append(idx)
    for lane_members in by_lane.values():
        lane_members.sort(key=lambda i: -vehicles[i].x)
        ahead_x = None
        for i in lane_members:
            v = vehicles[i]
            new_x = v.x + v.speed * dt
            if ahead_x is not None:
                new_x = min(new_x, ahead_x - cfg.security_gap_m)
            v.x = new_x
            ahead_x = new_x

    for idx, v in enumerate(vehicles):
        if v.x <= cfg.road_length_m:
            continue
        best_lane, best_rear = 0, -math.inf
        for lane in range(cfg.lanes):
            rear = min(
                (w.x for j, w in enumerate(vehicles) if w.lane == lane and j != idx),
                default=math.inf,
            )
            if rear > best_rear:
                best_lane, best_rear = lane, rear
        v.lane = best_lane
        v.x = min(0.0, best_rear - cfg.security_gap_m)
        v.speed = rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps)
    return vehicles


@dataclass
class ChannelRealization:
    """One slot's link gains and rates (infrastructure and peer links)."""

    v2i_gain: np.ndarray  # (V,) linear
    v2i_los: np.ndarray  # (V,) 0/1
    v2i_rate: np.ndarray  # (V,) packets per slot
    v2v_rate: np.ndarray  # (V, V) packets per slot, symmetric, 0 on diagonal


class V2xEnv:
    """Sequential single-RSU road network with seeded randomness."""

    def __init__(self, cfg: EnvConfig, seed=0):
        self.cfg = cfg
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.t = 0
        self.vehicles: list[VehicleState] = []
        self.realization: ChannelRealization | None = None

    # -- geometry -------------------------------------------------------

    def _position(self, v):
        return v.x, (v.lane + 0.5) * self.cfg.lane_width_m

    def _rsu_position(self):
        return self.cfg.rsu_x_m, -self.cfg.rsu_offset_m

    def _v2i_distance(self, v):
        vx, vy = self._position(v)
        rx, ry = self._rsu_position()
        return max(math.hypot(vx - rx, vy - ry), 1.0)

    def _v2v_distance(self, a, b):
        ax, ay = self._position(a)
        bx, by = self._position(b)
        return max(math.hypot(ax - bx, ay - by), 1.0)

    def _link_los_probability(self, kind, dist, tx_h, rx_h):
        cfg = self.cfg
        radius = ch.fresnel_radius(dist / 2.0, dist / 2.0, cfg.wavelength_m)
        clearance = ch.effective_fresnel_height(tx_h, rx_h, dist / 2.0, dist, radius)
        p_block = ch.blockage_probability(clearance, cfg.blocker_height_mean, cfg.blocker_height_std)
        return ch.los_probability(kind, dist, p_block, cfg.blocker_density, cfg.urban_decay)

    # -- per-slot channel draw -----------------------------------------

    def _sample_channel(self):
        cfg = self.cfg
        n = cfg.vehicles
        v2i_gain = np.zeros(n)
        v2i_los = np.zeros(n)
        v2i_rate = np.zeros(n)
        v2v_rate = np.zeros((n, n))
        for i, v in enumerate(self.vehicles):
            dist = self._v2i_distance(v)
            p_los = self._link_los_probability("v2i", dist, cfg.rsu_antenna_m, cfg.vehicle_antenna_m)
            los = self.rng.random() < p_los
            gain = ch.channel_gain(
                dist, cfg.wavelength_m, los, self.rng, cfg.nlos_penalty_db, cfg.shadowing_std_db
            )
            v2i_gain[i] = gain
            v2i_los[i] = 1.0 if los else 0.0
            v2i_rate[i] = ch.data_rate(gain, cfg, "rsu")
        for i in range(n):
            for j in range(i + 1, n):
                dist = self._v2v_distance(self.vehicles[i], self.vehicles[j])
                p_los = self._link_los_probability(
                    "v2v", dist, cfg.vehicle_antenna_m, cfg.vehicle_antenna_m
                )
                los = self.rng.random() < p_los
                gain = ch.channel_gain(
                    dist, cfg.wavelength_m, los, self.rng, cfg.nlos_penalty_db, cfg.shadowing_std_db
                )
                rate = ch.data_rate(gain, cfg, "vehicle")
                v2v_rate[i, j] = rate
                v2v_rate[j, i] = rate
        self.realization = ChannelRealization(v2i_gain, v2i_los, v2i_rate, v2v_rate)

    # -- observation ----------------------------------------------------

    def _observation(self):
        cfg = self.cfg
        n = cfg.vehicles
        real = self.realization
        feats = np.zeros((n, 5))
        pos = np.zeros((n, 2))
        rx_, ry_ = self._rsu_position()
        for i, v in enumerate(self.vehicles):
            vx, vy = self._position(v)
            dist = self._v2i_distance(v)
            feats[i, 0] = 10.0 * math.log10(real.v2i_gain[i])
            feats[i, 1] = real.v2i_los[i]
            feats[i, 2] = dist / SPEED_OF_LIGHT
            feats[i, 3] = math.atan2(vy - ry_, vx - rx_)
            feats[i, 4] = math.atan2(ry_ - vy, rx_ - vx)
            pos[i] = (vx, vy)
        ages = np.array([v.caoi for v in self.vehicles])
        return NetworkObservation(ages, feats, pos)

    # -- public API -----------------------------------------------------

    def reset(self):
        cfg = self.cfg
        self.t = 1
        self.vehicles = []
        spacing = cfg.road_length_m / max(1, math.ceil(cfg.vehicles / cfg.lanes))
        for i in range(cfg.vehicles):
            lane = i % cfg.lanes
            base = (i // cfg.lanes) * spacing
            x = float(np.clip(base + self.rng.uniform(0.0, spacing * 0.5), 0.0, cfg.road_length_m))
            self.vehicles.append(
                VehicleState(
                    x=x,
                    lane=lane,
                    speed=self.rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps),
                    height=cfg.blocker_height_mean
                    + cfg.blocker_height_std * self.rng.standard_normal(),
                )
            )
        self._sample_channel()
        return self._observation()

    def step(self, schedule):
        cfg = self.cfg
        if not validate_schedule(schedule, cfg.vehicles, cfg.rsu_max_links):
            raise ContractError(f"invalid schedule: {schedule}")
        real = self.realization
        ages = np.array([v.caoi for v in self.vehicles])
        anchors = np.array([v.anchor for v in self.vehicles])
        buffers = np.array([v.buffered for v in self.vehicles])
        ages, anchors, buffers = caoi_update(
            ages, anchors, buffers, self.t, schedule, real.v2i_rate, real.v2v_rate, cfg.rsu_packets
        )
        for v, a, g_, b in zip(self.vehicles, ages, anchors, buffers):
            v.caoi = float(a)
            v.anchor = float(g_)
            v.buffered = float(b)
        r = reward(ages, cfg.caoi_tolerance)
        done = self.t >= cfg.episode_slots or bool(np.any(ages > cfg.caoi_hard_cap))
        info = {
            "t": self.t,
            "caoi": ages.copy(),
            "v2i_rate": real.v2i_rate.copy(),
            "v2v_rate": real.v2v_rate.copy(),
            "buffered": buffers.copy(),
        }
        self.t += 1
        self.vehicles = step_mobility(self.vehicles, cfg.slot_s, cfg, self.rng)
        self._sample_channel()
        return self._observation(), r, done, info
