"""Deterministic discrete-time simulation loop.

One run is fully determined by (config, seed).  Per decision step, in fixed
order: mobile terminals move, AP load and QoS are recomputed, knowledge
diffuses on period boundaries, every terminal evaluates its decision, and
handovers are applied atomically so association switches take effect on the
next step.  Switching costs one disconnected step (configurable) during
which the terminal scores zero and makes no decision, reflecting the
break-before-make nature of WLAN re-association.
"""

import hashlib
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .decision import (
    HANDOVER,
    STAY,
    CombinedScore,
    StrategyState,
    best_candidate,
    decide,
    score_network,
)
from .knowledge import KnowledgeBase, candidate_view, diffuse
from .mobility import init_mobility, step_mobility
from .radio import ApLoadState, QosVector, ap_qos, apply_jitter, sensed_aps
from .scenario import ApProfile, ScenarioConfig, validate

EVENTS_SCHEMA = "# hodsim events schema v1"
EVENTS_HEADER = "time,mt,associated_ap,action,c_asso,c_best,suppressed"


@dataclass(frozen=True)
class DecisionOutcome:
    """Result of one terminal's decision at one step.

    ``c_asso`` is the effective score of the associated network for this step
    (0 while unassociated or disconnected mid-switch); ``candidates`` keeps
    the scored candidate list for inspection.
    """

    mt_id: str
    time: float
    associated: Optional[str]
    action: str
    target: Optional[str]
    c_asso: float
    c_best: float
    suppressed: bool
    candidates: Tuple[CombinedScore, ...] = ()


@dataclass(frozen=True)
class AssociationInterval:
    ap_id: str
    start: float
    end: float


@dataclass
class EventLog:
    """Everything one run produced, sufficient to recompute all metrics."""

    seed: int
    config: ScenarioConfig
    mt_ids: List[str]
    outcomes: Dict[str, List[DecisionOutcome]] = field(default_factory=dict)
    associations: Dict[str, List[AssociationInterval]] = field(default_factory=dict)
    nb_ho: Dict[str, int] = field(default_factory=dict)

    @property
    def nb_steps(self) -> int:
        return self.config.nb_steps


def _stream(seed: int, *labels: str) -> np.random.Generator:
    """Independent generator for (seed, labels); stable across runs and
    unaffected by how many other streams exist."""
    digest = hashlib.sha256("/".join(labels).encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "big") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + words))


def run_simulation(config: ScenarioConfig, seed: Optional[int] = None,
                   qos_model=ap_qos) -> EventLog:
    """Execute one run and return its event log.

    ``seed`` defaults to config.rng_seed.  ``qos_model(ap, load)`` may replace
    the default load-sharing model.
    """
    violations = validate(config)
    if violations:
        raise ValueError("invalid config: " + "; ".join(violations))
    if seed is None:
        seed = config.rng_seed

    dt = config.decision_step
    nb_steps = config.nb_steps
    diffuse_every = int(round(config.diffusion_period / dt))
    aps = config.ap_by_id()
    ap_order = sorted(aps)
    neighbors = {ap_id: aps[ap_id].wired_neighbors for ap_id in ap_order}
    users = {u.id: u for u in config.users}
    user_order = sorted(users)
    mt_order = sorted(u.id for u in config.users if u.mobile)

    mob_rng = {m: _stream(seed, "mobility", m) for m in mt_order}
    strat_rng = {m: _stream(seed, "strategy", m) for m in mt_order}
    jitter_rng = _stream(seed, "qos-jitter")

    mobility = {m: init_mobility(users[m], config.area, mob_rng[m]) for m in mt_order}
    positions = {u.id: u.initial_position for u in config.users}

    log = EventLog(seed=seed, config=config, mt_ids=list(mt_order))
    for m in mt_order:
        log.outcomes[m] = []
        log.associations[m] = []
        log.nb_ho[m] = 0

    # Initial association at t=0: users in id order greedily pick the best
    # sensed AP by live QoS, strategy-free; each pick loads the AP for the
    # next user's view.
    associations: Dict[str, Optional[str]] = {}
    loads = {ap_id: 0 for ap_id in ap_order}
    for uid in user_order:
        profile = users[uid]
        sensed = sensed_aps(positions[uid], config.aps)
        chosen = None
        if sensed:
            scored = [
                score_network(
                    ap_id,
                    qos_model(aps[ap_id], ApLoadState(ap_id, loads[ap_id])),
                    profile.app_requirements,
                    config.criteria,
                    config.objectives,
                    gated=config.gate_candidates,
                    max_benefit=config.max_benefit,
                )
                for ap_id in sensed
            ]
            best = best_candidate(scored)
            chosen = best.ap_id
            loads[chosen] += 1
        associations[uid] = chosen

    open_interval: Dict[str, Optional[Tuple[str, float]]] = {}
    for m in mt_order:
        ap0 = associations[m]
        open_interval[m] = (ap0, 0.0) if ap0 is not None else None

    strategy_states = {m: StrategyState.from_strategy(config.strategy) for m in mt_order}
    ap_bases = {ap_id: KnowledgeBase(owner=ap_id) for ap_id in ap_order}
    mt_bases = {m: KnowledgeBase(owner=m) for m in mt_order}
    disconnected = {m: 0 for m in mt_order}

    def close_interval(m: str, end: float) -> None:
        current = open_interval[m]
        if current is not None:
            log.associations[m].append(AssociationInterval(current[0], current[1], end))
            open_interval[m] = None

    for k in range(nb_steps):
        now = k * dt

        # (1) mobility
        for m in mt_order:
            mobility[m] = step_mobility(mobility[m], dt, config.area, users[m], mob_rng[m])
            positions[m] = mobility[m].position

        # (2) load and offered QoS per AP
        loads = {ap_id: 0 for ap_id in ap_order}
        for uid in user_order:
            ap_id = associations[uid]
            if ap_id is not None:
                loads[ap_id] += 1
        qos_now: Dict[str, QosVector] = {
            ap_id: apply_jitter(
                qos_model(aps[ap_id], ApLoadState(ap_id, loads[ap_id])),
                config.qos_jitter_sigma,
                jitter_rng,
            )
            for ap_id in ap_order
        }

        # (3) knowledge diffusion on period boundaries
        if k % diffuse_every == 0:
            mt_assoc = {m: associations[m] for m in mt_order}
            ap_bases, fresh = diffuse(ap_bases, neighbors, qos_now, mt_assoc, now)
            mt_bases.update(fresh)

        # (4) per-terminal decisions against a frozen snapshot
        pending: Dict[str, Tuple[str, bool]] = {}
        for m in mt_order:
            profile = users[m]
            sensed = sensed_aps(positions[m], config.aps)
            assoc = associations[m]

            if assoc is not None and assoc not in sensed:
                # walked out of coverage: connectivity lost, not a handover
                close_interval(m, now)
                associations[m] = None
                assoc = None

            if disconnected[m] > 0:
                disconnected[m] -= 1
                log.outcomes[m].append(DecisionOutcome(
                    m, now, assoc, STAY, None, 0.0, 0.0, False))
                continue

            if assoc is None:
                target = _nearest_usable(positions[m], sensed, aps, qos_now)
                if target is not None:
                    pending[m] = (target, False)
                log.outcomes[m].append(DecisionOutcome(
                    m, now, None, STAY, None, 0.0, 0.0, False))
                continue

            base = mt_bases[m]
            record = base.records.get(assoc)
            if record is not None:
                c_asso = score_network(
                    assoc, record.qos, profile.app_requirements,
                    config.criteria, config.objectives,
                    gated=True, max_benefit=config.max_benefit,
                ).value
            else:
                c_asso = 0.0

            cands = candidate_view(base, sensed, assoc, now)
            scored = tuple(
                score_network(
                    ap_id, qos, profile.app_requirements,
                    config.criteria, config.objectives,
                    gated=config.gate_candidates, max_benefit=config.max_benefit,
                )
                for ap_id, qos, _age in cands
            )
            best = best_candidate(scored)
            outcome = decide(c_asso, best, strategy_states[m], now, strat_rng[m])
            strategy_states[m] = outcome.state
            if outcome.action == HANDOVER:
                pending[m] = (outcome.target, True)
            log.outcomes[m].append(DecisionOutcome(
                m, now, assoc, outcome.action, outcome.target,
                c_asso, best.value if best is not None else 0.0,
                outcome.suppressed, scored))

        # (5) apply switches atomically; they take effect next step
        switch_time = (k + 1) * dt
        for m, (target, is_handover) in pending.items():
            close_interval(m, switch_time)
            associations[m] = target
            open_interval[m] = (target, switch_time)
            if is_handover:
                log.nb_ho[m] += 1
                disconnected[m] = config.handover_cost_steps

    for m in mt_order:
        close_interval(m, config.sim_time)
    return log


def _nearest_usable(position: Tuple[float, float], sensed: List[str],
                    aps: Dict[str, ApProfile], qos_now: Dict[str, QosVector]) -> Optional[str]:
    """Blind (re-)association: nearest sensed AP currently offering any
    nonzero QoS, ties broken by id.  An unassociated terminal holds no usable
    knowledge, so this models a plain strongest-signal join rather than a
    scored decision."""
    best = None
    for ap_id in sensed:
        if not any(v > 0 for v in qos_now[ap_id].values()):
            continue
        ap = aps[ap_id]
        d = math.hypot(ap.position[0] - position[0], ap.position[1] - position[1])
        if best is None or d < best[0]:
            best = (d, ap_id)
    return best[1] if best is not None else None


def events_csv(log: EventLog) -> str:
    """Line-oriented CSV of the run, one row per terminal per step.

    Floats use repr so the file round-trips exactly; identical (config, seed)
    runs produce byte-identical output.
    """
    lines = [EVENTS_SCHEMA, EVENTS_HEADER]
    for k in range(log.nb_steps):
        for m in log.mt_ids:
            o = log.outcomes[m][k]
            lines.append(",".join([
                repr(o.time),
                o.mt_id,
                o.associated if o.associated is not None else "",
                o.action,
                repr(o.c_asso),
                repr(o.c_best),
                "1" if o.suppressed else "0",
            ]))
    return "\n".join(lines) + "\n"
