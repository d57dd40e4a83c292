"""Synthetic radio layer: disk coverage sensing and load-dependent AP QoS.

There is no propagation model here on purpose; the decision logic under test
is signal-agnostic and works on QoS vectors.  An AP is sensed iff the
terminal is inside its coverage disk, and the QoS it offers degrades with
the number of associated users.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .scenario import ApProfile

# A QoS vector maps criterion id -> offered value (same keys as the
# configured criteria; all values >= 0).
QosVector = Dict[str, float]


@dataclass(frozen=True)
class ApLoadState:
    """Number of users currently associated to one AP."""

    ap_id: str
    associated_user_count: int


def sensed_aps(position: Tuple[float, float], aps: Iterable[ApProfile]) -> List[str]:
    """Ids of all APs whose coverage disk contains the position, sorted by id."""
    px, py = position
    hits = [
        ap.id
        for ap in aps
        if math.hypot(ap.position[0] - px, ap.position[1] - py) <= ap.coverage_radius
    ]
    return sorted(hits)


def ap_qos(ap: ApProfile, load: ApLoadState) -> QosVector:
    """Default load model: bandwidth is shared equally, delay grows linearly
    with the user count, everything else keeps its nominal value.

    Any callable with this signature can replace it (see engine.run_simulation).
    """
    if load.ap_id != ap.id:
        raise ValueError(f"load state for {load.ap_id!r} applied to ap {ap.id!r}")
    n = load.associated_user_count
    out: QosVector = {}
    for key, base in ap.base_qos.items():
        if key == "bandwidth":
            out[key] = base / max(1, n)
        elif key == "delay":
            out[key] = base * (1 + n)
        else:
            out[key] = base
    return out


def apply_jitter(qos: QosVector, sigma: float, rng: np.random.Generator) -> QosVector:
    """Add zero-mean Gaussian noise to every component, clipped at zero.

    sigma=0 returns the vector unchanged without consuming randomness.
    """
    if sigma <= 0:
        return qos
    return {key: max(0.0, value + float(rng.normal(0.0, sigma))) for key, value in qos.items()}
