"""Analytic mmWave channel: Fresnel-zone blockage, LoS statistics, rates.

The blockage chain goes: first-Fresnel-zone radius -> effective clearance
height on the direct path -> probability that a random blocker of Gaussian
height pierces the zone -> Poisson thinning along the link for the LoS
probability.  Gains combine free-space path loss with a fixed NLoS penalty
and log-normal shadowing; rates are Shannon throughput in packets per slot.
"""

from __future__ import annotations

import math

from ..errors import DomainError


def q_function(x):
    """Gaussian tail probability P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def fresnel_radius(d_tx_blocker, d_blocker_rx, wavelength):
    """First Fresnel zone radius at a blocker between the link endpoints."""
    if d_tx_blocker <= 0.0 or d_blocker_rx <= 0.0:
        raise DomainError("fresnel_radius: distances must be positive")
    if wavelength <= 0.0:
        raise DomainError("fresnel_radius: wavelength must be positive")
    return math.sqrt(wavelength * d_tx_blocker * d_blocker_rx / (d_tx_blocker + d_blocker_rx))


def effective_fresnel_height(tx_height, rx_height, d_tx_blocker, d_total, radius):
    """Clearance height a blocker must exceed to obstruct the link."""
    if not 0.0 < d_tx_blocker < d_total:
        raise DomainError("effective_fresnel_height: need 0 < d_tx_blocker < d_total")
    return tx_height + (rx_height - tx_height) * d_tx_blocker / d_total - 0.6 * radius


def blockage_probability(fresnel_height, height_mean, height_std):
    """Chance that one Gaussian-height blocker rises above the clearance."""
    if height_std <= 0.0:
        raise DomainError("blockage_probability: height_std must be positive")
    return q_function((fresnel_height - height_mean) / height_std)


def los_probability(kind, distance, p_block, blocker_density, urban_decay=0.0):
    """LoS probability of a link under Poisson blockers of density per metre.

    Direct vehicle links see only the blocker process; infrastructure links
    additionally carry the exponential urban-obstruction factor.
    """
    if distance <= 0.0:
        raise DomainError("los_probability: distance must be positive")
    p_vehicle = math.exp(-blocker_density * distance * p_block)
    if kind == "v2v":
        return p_vehicle
    if kind == "v2i":
        return math.exp(-urban_decay * distance) * p_vehicle
    raise ValueError(f"los_probability: unknown link kind {kind!r}")


def free_space_gain(distance, wavelength):
    if distance <= 0.0:
        raise DomainError("free_space_gain: distance must be positive")
    ratio = wavelength / (4.0 * math.pi * distance)
    return ratio * ratio


def channel_gain(distance, wavelength, los, rng, nlos_penalty_db=20.0, shadowing_std_db=4.0):
    """Linear power gain for one link realization.

    The LoS/NLoS decision is made by the caller (one Bernoulli draw against
    `los_probability`); this routine applies the deterministic path loss,
    the NLoS penalty, and one shadowing draw from `rng`.
    """
    gain_db = 10.0 * math.log10(free_space_gain(distance, wavelength))
    if not los:
        gain_db -= nlos_penalty_db
    if shadowing_std_db > 0.0:
        gain_db += shadowing_std_db * rng.standard_normal()
    return 10.0 ** (gain_db / 10.0)


def data_rate(gain, cfg, tx):
    """Shannon rate in packets per slot for transmitter kind 'rsu' or 'vehicle'."""
    if gain < 0.0:
        raise DomainError("data_rate: gain must be non-negative")
    if tx == "rsu":
        power = cfg.rsu_power_w
    elif tx == "vehicle":
        power = cfg.vehicle_power_w
    else:
        raise ValueError(f"data_rate: unknown transmitter kind {tx!r}")
    snr = power * gain / (cfg.noise_psd_w * cfg.bandwidth_hz)
    return (cfg.bandwidth_hz * cfg.slot_s / cfg.packet_bits) * math.log2(1.0 + snr)
