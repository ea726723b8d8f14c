"""Scenario configuration for the mmWave V2X simulator."""

from __future__ import annotations

from dataclasses import dataclass, fields

SPEED_OF_LIGHT = 299792458.0

# 23 dBm in watts
_POWER_23_DBM_W = 10.0 ** (23.0 / 10.0) / 1000.0


@dataclass
class EnvConfig:
    """Physical and protocol parameters of one road scenario.

    The defaults are the desk-scale setup used by tests and the bundled
    experiment configs: a 200 m three-lane road, 4 vehicles, one roadside
    unit serving up to `rsu_max_links` concurrent downlinks.  The packet
    size is shrunk relative to `full_scale` so that a good line-of-sight
    link can deliver a complete refresh inside one 100 ms slot.
    """

    vehicles: int = 4
    max_vehicles: int = 0  # 0 means "same as vehicles"; layout width for padding
    bandwidth_hz: float = 100e6
    carrier_hz: float = 26e9
    packet_bits: float = 4e6
    rsu_packets: int = 25
    rsu_power_w: float = _POWER_23_DBM_W
    vehicle_power_w: float = _POWER_23_DBM_W
    noise_psd_w: float = 10.0 ** (-20.4)  # -174 dBm/Hz thermal floor
    slot_s: float = 0.1
    episode_slots: int = 100
    caoi_tolerance: float = 8.0
    caoi_hard_cap: float = 0.0  # 0 means "2 x tolerance"
    blocker_density: float = 0.05
    urban_decay: float = 0.005
    blocker_height_mean: float = 1.5
    blocker_height_std: float = 0.3
    rsu_antenna_m: float = 5.0
    vehicle_antenna_m: float = 1.5
    lanes: int = 3
    lane_width_m: float = 3.5
    road_length_m: float = 200.0
    speed_min_mps: float = 15.0
    speed_max_mps: float = 20.0
    security_gap_m: float = 20.0
    rsu_max_links: int = 2
    rsu_x_m: float = -1.0  # negative means "road midpoint"
    rsu_offset_m: float = 5.0
    nlos_penalty_db: float = 20.0
    shadowing_std_db: float = 4.0

    def __post_init__(self):
        if self.max_vehicles == 0:
            self.max_vehicles = self.vehicles
        if self.caoi_hard_cap == 0.0:
            self.caoi_hard_cap = 2.0 * self.caoi_tolerance
        if self.rsu_x_m < 0.0:
            self.rsu_x_m = self.road_length_m / 2.0
        positive = (
            "bandwidth_hz",
            "carrier_hz",
            "packet_bits",
            "rsu_power_w",
            "vehicle_power_w",
            "noise_psd_w",
            "slot_s",
            "blocker_height_std",
            "lane_width_m",
            "road_length_m",
            "speed_min_mps",
            "speed_max_mps",
            "security_gap_m",
        )
        for name in positive:
            if getattr(self, name) <= 0.0:
                raise ValueError(f"EnvConfig.{name} must be positive")
        if self.vehicles < 1 or self.vehicles > self.max_vehicles:
            raise ValueError("EnvConfig.vehicles must be in [1, max_vehicles]")
        if self.caoi_tolerance < 1.0:
            raise ValueError("EnvConfig.caoi_tolerance must be >= 1")
        if self.caoi_hard_cap < self.caoi_tolerance:
            raise ValueError("EnvConfig.caoi_hard_cap must be >= caoi_tolerance")
        if self.rsu_max_links < 1:
            raise ValueError("EnvConfig.rsu_max_links must be >= 1")
        if self.rsu_packets < 1:
            raise ValueError("EnvConfig.rsu_packets must be >= 1")
        if self.lanes < 1 or self.episode_slots < 1:
            raise ValueError("EnvConfig.lanes and episode_slots must be >= 1")
        if self.speed_min_mps > self.speed_max_mps:
            raise ValueError("EnvConfig speed range is inverted")

    @property
    def wavelength_m(self):
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def obs_features(self):
        # per-vehicle layout: age, gain dB, LoS flag, path delay, AoD, AoA, x, y
        return 8

    @property
    def obs_dim(self):
        return self.max_vehicles * self.obs_features

    @property
    def options_per_vehicle(self):
        # receive from RSU | receive from peer 0..max-1 | idle
        return self.max_vehicles + 2

    @property
    def action_dim(self):
        return self.max_vehicles * self.options_per_vehicle

    @classmethod
    def full_scale(cls, **overrides):
        """The 8-vehicle, 5 MB-packet configuration of the reference setup."""
        base = dict(vehicles=8, packet_bits=4e7)
        base.update(overrides)
        return cls(**base)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}
