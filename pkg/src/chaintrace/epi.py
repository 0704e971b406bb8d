"""Per-edge infection probabilities, the threshold rule, and re-seeding.

The transmission model itself is a pluggable strategy: the default below is
an explicitly labeled placeholder that exercises every declared parameter,
not epidemiology.  A chain is promoted when every conditional edge
probability clears the threshold; the overall probability is the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .logmodel import InfectionChain, ProximityChain

# model(prev_user, contact_time, contact_distance, reproduction_number,
#       saturation) -> probability
InfectionModel = Callable[[str, float, float, float, float], float]


@dataclass(frozen=True)
class InfectionModelParams:
    tr: float = 0.5
    lam: float = 0.1  # exposure rate per time unit in the default model
    reproduction_number: float = 1.0
    saturation: float = 0.0
    contact_distance: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.tr < 1.0:
            raise ValueError("threshold must be strictly inside (0, 1)")
        if self.reproduction_number < 0:
            raise ValueError("reproduction number must be non-negative")
        if not 0.0 <= self.saturation <= 1.0:
            raise ValueError("saturation is a population fraction")


def default_model(params: InfectionModelParams) -> InfectionModel:
    """Placeholder transmission curve: saturating exposure, damped by R and
    by how much of the population is already infected.  prev_user is accepted
    for interface compatibility and ignored."""

    def model(prev_user, contact_time, contact_distance,
              reproduction_number, saturation):
        exposure = 1.0 - math.exp(-params.lam * contact_time)
        p = exposure * min(1.0, reproduction_number) * (1.0 - saturation)
        return min(1.0, max(0.0, p))

    return model


def infection_probability(model: InfectionModel, prev_user: str,
                          contact_time: float, contact_distance: float,
                          params: InfectionModelParams) -> float:
    if contact_time < 0:
        raise ValueError("contact time cannot be negative")
    p = model(prev_user, contact_time, contact_distance,
              params.reproduction_number, params.saturation)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"model returned a non-probability {p}")
    return p


@dataclass(frozen=True)
class ProximityOnly:
    """Evaluation verdict for a chain that failed the threshold somewhere."""

    chain: ProximityChain
    edge_probabilities: tuple[float, ...]
    failing_edges: tuple[int, ...]


def _edge_probs(chain: ProximityChain, params: InfectionModelParams,
                model: InfectionModel) -> tuple[float, ...]:
    probs = []
    for prev_user, (_, overlap) in zip(chain.users, chain.contacts):
        probs.append(infection_probability(
            model, prev_user, overlap.length(), params.contact_distance, params))
    return tuple(probs)


def evaluate_chain(chain: ProximityChain, params: InfectionModelParams,
                   model: InfectionModel | None = None):
    """Promote iff every edge probability is strictly above the threshold."""
    model = model or default_model(params)
    probs = _edge_probs(chain, params, model)
    failing = tuple(i for i, p in enumerate(probs) if p <= params.tr)
    if failing:
        return ProximityOnly(chain, probs, failing)
    overall = math.prod(probs)
    return InfectionChain(chain=chain, edge_probabilities=probs, overall=overall)


def evaluate_subchains(chain: ProximityChain, params: InfectionModelParams,
                       model: InfectionModel | None = None) -> list[InfectionChain]:
    """Maximal contiguous runs of passing edges, each promoted on its own."""
    model = model or default_model(params)
    probs = _edge_probs(chain, params, model)
    out = []
    i = 0
    n = len(probs)
    while i < n:
        if probs[i] <= params.tr:
            i += 1
            continue
        j = i
        while j < n and probs[j] > params.tr:
            j += 1
        sub = ProximityChain(users=chain.users[i:j + 1],
                             contacts=chain.contacts[i:j])
        out.append(InfectionChain(chain=sub,
                                  edge_probabilities=probs[i:j],
                                  overall=math.prod(probs[i:j])))
        i = j
    return out


def prune_predicate(partial_contacts, params: InfectionModelParams,
                    model: InfectionModel | None = None,
                    prev_users: Iterable[str] = ()) -> bool:
    """True while every edge walked so far stays above the threshold.

    Wired into the tree builders at leaf creation when pruning is on; a
    False verdict stops that subtree."""
    model = model or default_model(params)
    users = list(prev_users)
    for idx, (_, overlap) in enumerate(partial_contacts):
        prev = users[idx] if idx < len(users) else ""
        p = infection_probability(model, prev, overlap.length(),
                                  params.contact_distance, params)
        if p <= params.tr:
            return False
    return True


def reseed(confirmed: Iterable[InfectionChain],
           known_pairs: Iterable[tuple[str, str]],
           infection_order_known: bool = False) -> list[tuple[str, str]]:
    """Grow the work queue from freshly confirmed chains.

    Every member of a confirmed chain counts as infected; all new ordered
    pairs over the enlarged set are emitted, minus the ones already
    processed.  Without knowledge of who infected whom first, the swapped
    direction of each known pair is emitted as well.
    """
    done = set(known_pairs)
    infected: list[str] = []
    for ic in confirmed:
        for user in ic.chain.users:
            if user not in infected:
                infected.append(user)
    for a, b in sorted(done):
        if a not in infected:
            infected.append(a)
        if b not in infected:
            infected.append(b)
    queue = []
    for a in infected:
        for b in infected:
            if a == b:
                continue
            if (a, b) in done:
                continue
            if infection_order_known and (b, a) in done:
                continue  # direction already settled, skip the swap
            queue.append((a, b))
            done.add((a, b))
    return queue
