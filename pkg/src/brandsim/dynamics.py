"""Stochastic interaction kernels and the sweep scheduler.

Update rule: single-slot verbatim copying.  An event picks one slot of the
learner's profile and overwrites it with the source's value; nothing is ever
averaged, so the reachable value set stays finite and exact consensus is
attainable.  Unknown entries (0) never transmit.

Randomness discipline
---------------------
Every stochastic choice consumes float64 uniforms from one generator stream
in a fixed, documented order, so a run can be replayed slot by slot from the
seed alone.  Bounded indices always come from ``index_from_uniform(u, n)``.
Consumption per operation:

* ``copy_entry``: 3 uniforms (need pick, slot pick, acceptance coin), all
  consumed even when the event is a no-op.
* ``pair_step``: 5 uniforms (learner pick over K, partner pick over the
  remaining K-1 with indexes at or above the first shifted up by one, then
  the copy_entry triple).
* ``leader_step``: per leader in ascending customer id, ``leader_pupils``
  selection uniforms driving a partial Fisher-Yates shuffle over the
  non-leader ids in ascending order, then one copy_entry triple per chosen
  pupil in selection order.  No leaders or zero pupils consume nothing.
* ``shop_step``: per brand in ascending id, ``round(shop_teach_rate *
  shop_count)`` events (Python banker's rounding) of 4 uniforms each
  (customer pick plus the copy_entry triple).  A rate of 0 consumes nothing.
* ``sweep``: K pair events, then ``leader_step``, then ``shop_step``, then
  an affiliation refresh (no draws) and the time increment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError
from .model import (
    NeedSchema,
    Population,
    WishProfile,
    index_from_uniform,
    refresh_affiliations,
)


class Mode(enum.Enum):
    """Which pair-interaction kernel a run uses."""

    EQUALITY = "equality"
    HIERARCHY = "hierarchy"


@dataclass(frozen=True)
class KernelParams:
    """Rates for the three influence channels."""

    p_copy: float
    leader_pupils: int = 0
    shop_teach_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_copy <= 1.0:
            raise ConfigurationError(f"p_copy must lie in [0, 1], got {self.p_copy}")
        if self.leader_pupils < 0:
            raise ConfigurationError(
                f"leader_pupils must be >= 0, got {self.leader_pupils}"
            )
        if not self.shop_teach_rate >= 0.0:
            raise ConfigurationError(
                f"shop_teach_rate must be >= 0, got {self.shop_teach_rate}"
            )


class PairEvent(NamedTuple):
    """Record of one pair interaction."""

    first: int
    partner: int
    learner: int
    source: int
    copied: bool


def _copy_slot(
    learner_values: np.ndarray,
    source_values: np.ndarray,
    schema: NeedSchema,
    u_need: float,
    u_slot: float,
    u_coin: float,
    p: float,
) -> tuple[int, bool]:
    """Apply one copy event given its three uniforms; returns (flat slot, copied)."""
    need = index_from_uniform(u_need, schema.num_needs)
    jm = schema.jmax[need]
    slot = index_from_uniform(u_slot, jm)
    flat = schema.offsets[need] + slot
    v = source_values[flat]
    if v != 0.0 and u_coin < p:
        learner_values[flat] = v
        return flat, True
    return flat, False


def copy_entry(
    learner: WishProfile,
    source,
    rng: np.random.Generator,
    p: float,
) -> tuple[WishProfile, bool]:
    """Copy one uniformly chosen slot from ``source`` into ``learner``.

    The slot is drawn need-first (uniform over needs, then uniform over that
    need's slots).  An unknown source slot never transmits.  Mutates
    ``learner`` in place and returns it with a flag saying whether a copy
    happened.
    """
    src = source.values if isinstance(source, WishProfile) else np.asarray(source, dtype=np.float64)
    if src.shape != learner.values.shape:
        raise ValueError(f"profile shapes differ: {learner.values.shape} vs {src.shape}")
    u = rng.random(3)
    _, copied = _copy_slot(learner.values, src, learner.schema, u[0], u[1], u[2], p)
    return learner, copied


def _run_pair_events(
    pop: Population,
    mode: Mode,
    params: KernelParams,
    u: np.ndarray,
    event_log: list[PairEvent] | None = None,
) -> int:
    """Apply ``len(u) // 5`` sequential pair events; returns the copy count.

    Shared by ``pair_step`` (one event) and ``sweep`` (K events) so both
    consume the stream identically.
    """
    schema = pop.schema
    wish_flat = pop.wish_matrix.reshape(-1)
    ranks = pop._ranks_list
    K = pop.num_customers
    M = schema.num_needs
    S = schema.total_slots
    jmax = schema.jmax
    offsets = schema.offsets
    p_copy = params.p_copy
    hierarchical = mode is Mode.HIERARCHY
    uu = u.tolist()
    n_events = len(uu) // 5
    K1 = K - 1
    copies = 0
    i = 0
    for _ in range(n_events):
        ua = uu[i]
        ub = uu[i + 1]
        un = uu[i + 2]
        us = uu[i + 3]
        uc = uu[i + 4]
        i += 5
        a = int(ua * K)
        if a > K1:
            a = K1
        b = int(ub * K1)
        if b >= K1:
            b = K1 - 1
        if b >= a:
            b += 1
        if hierarchical:
            ra = ranks[a]
            rb = ranks[b]
            if ra < rb:
                learner, source, p = a, b, p_copy * (rb - ra)
            else:
                learner, source, p = b, a, p_copy * (ra - rb)
        else:
            learner, source, p = a, b, p_copy
        need = int(un * M)
        if need >= M:
            need = M - 1
        jm = jmax[need]
        slot = int(us * jm)
        if slot >= jm:
            slot = jm - 1
        flat = offsets[need] + slot
        v = wish_flat[source * S + flat]
        copied = False
        if v != 0.0 and uc < p:
            wish_flat[learner * S + flat] = v
            copied = True
            copies += 1
        if event_log is not None:
            event_log.append(PairEvent(a, b, learner, source, copied))
    return copies


def pair_step(
    pop: Population,
    mode: Mode,
    params: KernelParams,
    rng: np.random.Generator,
) -> PairEvent:
    """One pair interaction between two distinct, uniformly chosen customers.

    Equality: the first-drawn customer learns from the partner with
    probability ``p_copy``.  Hierarchy: the lower-ranked learns from the
    higher-ranked with probability ``p_copy`` times the rank gap, so equal
    ranks never copy.
    """
    if pop.num_customers < 2:
        raise ConfigurationError("pair interactions require K >= 2")
    log: list[PairEvent] = []
    _run_pair_events(pop, mode, params, rng.random(5), log)
    return log[0]


def leader_step(
    pop: Population,
    params: KernelParams,
    rng: np.random.Generator,
) -> int:
    """Each rank-1 leader teaches ``leader_pupils`` distinct non-leaders.

    Pupils are drawn uniformly without replacement; every teaching copies
    one slot of the leader's wish with probability ``p_copy``.  Leaders are
    never learners here.  Returns the number of copies that occurred.
    """
    pupils = params.leader_pupils
    leaders = pop.leader_ids
    if not leaders or pupils == 0:
        return 0
    non_leaders = pop.non_leader_ids
    if pupils > len(non_leaders):
        raise ConfigurationError(
            f"leader_pupils={pupils} exceeds the {len(non_leaders)} non-leaders"
        )
    schema = pop.schema
    wish = pop.wish_matrix
    p_copy = params.p_copy
    copies = 0
    for leader in leaders:
        select_u = rng.random(pupils).tolist()
        pool = list(non_leaders)
        chosen = []
        n_pool = len(pool)
        for step, u in enumerate(select_u):
            pick = step + index_from_uniform(u, n_pool - step)
            pool[step], pool[pick] = pool[pick], pool[step]
            chosen.append(pool[step])
        teach_u = rng.random(3 * len(chosen))
        leader_values = wish[leader]
        for idx, pupil in enumerate(chosen):
            o = 3 * idx
            _, copied = _copy_slot(
                wish[pupil],
                leader_values,
                schema,
                teach_u[o],
                teach_u[o + 1],
                teach_u[o + 2],
                p_copy,
            )
            copies += copied
    return copies


def shop_event_count(shop_teach_rate: float, shop_count: int) -> int:
    """Teaching events one brand performs per sweep (banker's rounding)."""
    return int(round(shop_teach_rate * shop_count))


def shop_step(
    pop: Population,
    params: KernelParams,
    rng: np.random.Generator,
) -> int:
    """Brands teach their own assortment to uniformly chosen customers.

    Brand ``b`` performs ``shop_event_count(rate, shop_count_b)`` events;
    each copies one assortment slot into a random customer with probability
    ``p_copy``.  Returns the number of copies.  A rate of 0 disables the
    channel entirely.
    """
    rate = params.shop_teach_rate
    if rate == 0.0:
        return 0
    schema = pop.schema
    wish = pop.wish_matrix
    K = pop.num_customers
    p_copy = params.p_copy
    copies = 0
    for brand in pop.brands:
        n_events = shop_event_count(rate, brand.shop_count)
        if n_events <= 0:
            continue
        u = rng.random(4 * n_events)
        src = brand.assortment.values
        for e in range(n_events):
            o = 4 * e
            customer = index_from_uniform(u[o], K)
            _, copied = _copy_slot(
                wish[customer], src, schema, u[o + 1], u[o + 2], u[o + 3], p_copy
            )
            copies += copied
    return copies


def sweep(
    pop: Population,
    mode: Mode,
    params: KernelParams,
    rng: np.random.Generator,
    event_log: list[PairEvent] | None = None,
) -> Population:
    """Advance the population by one time unit, in place.

    Performs exactly K pair events, then the leader and shop channels, then
    refreshes every affiliation and increments ``t``.  When ``event_log`` is
    a list, one :class:`PairEvent` per pair interaction is appended to it.
    """
    K = pop.num_customers
    if K < 2:
        raise ConfigurationError("sweep requires K >= 2")
    _run_pair_events(pop, mode, params, rng.random(5 * K), event_log)
    leader_step(pop, params, rng)
    shop_step(pop, params, rng)
    refresh_affiliations(pop)
    pop.t += 1
    return pop
