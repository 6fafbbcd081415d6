"""Core domain types: need schemas, wish profiles, customers, brands, populations.

A customer's state is a ragged matrix of need-satisfaction values, stored
flat: need ``i`` owns ``jmax[i]`` consecutive slots (at most five).  A slot
value of exactly ``0.0`` encodes an unknown need; known values lie in
``(0, 1]``.  Brands carry a fixed assortment matrix of the same shape with
every slot known, plus a shop count used as a teaching weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigurationError

if TYPE_CHECKING:
    from .config import SimConfig

#: Largest number of subentries a single need may carry.
MAX_SUBENTRIES = 5


def index_from_uniform(u: float, n: int) -> int:
    """Map a uniform draw ``u`` in [0, 1) to an integer index in [0, n).

    This is the one bounded-integer rule used everywhere: ``floor(u * n)``,
    clamped so float rounding can never produce ``n`` itself.
    """
    i = int(u * n)
    return n - 1 if i >= n else i


@dataclass(frozen=True)
class NeedSchema:
    """Per-need subentry counts shared by all customers and brands."""

    jmax: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(j) for j in self.jmax)
        object.__setattr__(self, "jmax", counts)
        if len(counts) < 1:
            raise ConfigurationError("schema requires at least one need (M >= 1)")
        for j in counts:
            if not 1 <= j <= MAX_SUBENTRIES:
                raise ConfigurationError(
                    f"jmax entries must lie in 1..{MAX_SUBENTRIES}, got {j}"
                )

    @property
    def num_needs(self) -> int:
        return len(self.jmax)

    @cached_property
    def total_slots(self) -> int:
        return sum(self.jmax)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Flat index of the first slot of each need."""
        out = []
        acc = 0
        for j in self.jmax:
            out.append(acc)
            acc += j
        return tuple(out)

    def flat_index(self, need: int, slot: int) -> int:
        if not 0 <= need < self.num_needs:
            raise IndexError(f"need index {need} out of range")
        if not 0 <= slot < self.jmax[need]:
            raise IndexError(f"slot index {slot} out of range for need {need}")
        return self.offsets[need] + slot


class WishProfile:
    """A ragged needs matrix stored as one flat float array.

    The array may be a view into a population-owned matrix, so slot writes
    through either surface stay coherent.
    """

    __slots__ = ("values", "schema")

    def __init__(self, values, schema: NeedSchema, copy: bool = False):
        arr = np.asarray(values, dtype=np.float64)
        if copy:
            arr = arr.copy()
        if arr.shape != (schema.total_slots,):
            raise ValueError(
                f"profile shape {arr.shape} does not match schema with "
                f"{schema.total_slots} slots"
            )
        self.values = arr
        self.schema = schema

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], schema: NeedSchema) -> "WishProfile":
        """Build a profile from one sequence of values per need."""
        if len(rows) != schema.num_needs:
            raise ValueError(f"expected {schema.num_needs} rows, got {len(rows)}")
        flat = []
        for i, row in enumerate(rows):
            if len(row) != schema.jmax[i]:
                raise ValueError(
                    f"need {i} expects {schema.jmax[i]} slots, got {len(row)}"
                )
            flat.extend(float(v) for v in row)
        return cls(np.array(flat, dtype=np.float64), schema)

    def rows(self) -> list[np.ndarray]:
        """Per-need views into the flat storage."""
        return [
            self.values[off : off + j]
            for off, j in zip(self.schema.offsets, self.schema.jmax)
        ]

    def get(self, need: int, slot: int) -> float:
        return float(self.values[self.schema.flat_index(need, slot)])

    def set(self, need: int, slot: int, value: float) -> None:
        self.values[self.schema.flat_index(need, slot)] = value

    def known_mask(self) -> np.ndarray:
        return self.values != 0.0

    def all_known(self) -> bool:
        return bool(np.all(self.values != 0.0))

    def copy(self) -> "WishProfile":
        return WishProfile(self.values.copy(), self.schema)

    def same_values(self, other: "WishProfile") -> bool:
        return np.array_equal(self.values, other.values)

    def validate(self) -> None:
        v = self.values
        if not np.all(np.isfinite(v)):
            raise ValueError("profile contains non-finite entries")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("known entries must lie in (0, 1] and unknown ones be 0")

    def __repr__(self) -> str:
        return f"WishProfile({[list(r) for r in self.rows()]})"


@dataclass
class Customer:
    id: int
    wish: WishProfile
    rank: float
    affiliation: int


@dataclass
class BrandProfile:
    id: int
    assortment: WishProfile
    shop_count: int


class Population:
    """Every customer and brand under one schema, plus the sweep counter.

    The ``wish_matrix`` (K x S) and ``assortment_matrix`` (N x S) arrays are
    the storage of record; each :class:`Customer` and :class:`BrandProfile`
    wraps a row view of them.  Ranks and the leader set are fixed for the
    lifetime of the population; affiliations are refreshed after every sweep.
    """

    def __init__(
        self,
        schema: NeedSchema,
        wish_matrix,
        ranks,
        assortment_matrix,
        shop_counts: Sequence[int],
        t: int = 0,
        validate: bool = True,
    ):
        wish = np.ascontiguousarray(wish_matrix, dtype=np.float64)
        assort = np.ascontiguousarray(assortment_matrix, dtype=np.float64)
        rank_arr = np.ascontiguousarray(ranks, dtype=np.float64)
        counts = tuple(int(s) for s in shop_counts)

        S = schema.total_slots
        if wish.ndim != 2 or wish.shape[1] != S:
            raise ValueError(f"wish matrix must be (K, {S}), got {wish.shape}")
        if assort.ndim != 2 or assort.shape[1] != S:
            raise ValueError(f"assortment matrix must be (N, {S}), got {assort.shape}")
        K = wish.shape[0]
        N = assort.shape[0]
        if K < 2:
            raise ConfigurationError(f"population needs K >= 2 customers, got {K}")
        if N < 1:
            raise ConfigurationError("population needs at least one brand")
        if rank_arr.shape != (K,):
            raise ValueError(f"ranks must be shape ({K},), got {rank_arr.shape}")
        if len(counts) != N:
            raise ConfigurationError(
                f"shop_counts must have one entry per brand ({N}), got {len(counts)}"
            )
        if validate:
            if not np.all(np.isfinite(wish)) or np.any(wish < 0.0) or np.any(wish > 1.0):
                raise ValueError("wish entries must be 0 (unknown) or in (0, 1]")
            if not np.all(np.isfinite(assort)) or np.any(assort <= 0.0) or np.any(assort > 1.0):
                raise ValueError("assortment entries must all be known, in (0, 1]")
            if np.any(rank_arr < 0.0) or np.any(rank_arr > 1.0):
                raise ValueError("ranks must lie in [0, 1]")
            if any(s < 1 for s in counts):
                raise ConfigurationError("every shop_count must be >= 1")

        self.schema = schema
        self.t = int(t)
        self.wish_matrix = wish
        self.assortment_matrix = assort
        self.ranks = rank_arr
        self.shop_counts = counts
        self.customers = [
            Customer(k, WishProfile(wish[k], schema), float(rank_arr[k]), 0)
            for k in range(K)
        ]
        self.brands = [
            BrandProfile(b, WishProfile(assort[b], schema), counts[b]) for b in range(N)
        ]
        self.leader_ids = tuple(int(k) for k in np.flatnonzero(rank_arr == 1.0))
        leader_set = set(self.leader_ids)
        self.non_leader_ids = tuple(k for k in range(K) if k not in leader_set)
        # plain-float copy for the event loop; ranks never change after init
        self._ranks_list = rank_arr.tolist()
        self.affiliations = np.zeros(K, dtype=np.int64)
        refresh_affiliations(self)

    @property
    def num_customers(self) -> int:
        return self.wish_matrix.shape[0]

    @property
    def num_brands(self) -> int:
        return self.assortment_matrix.shape[0]

    def clone(self) -> "Population":
        return Population(
            self.schema,
            self.wish_matrix.copy(),
            self.ranks.copy(),
            self.assortment_matrix.copy(),
            self.shop_counts,
            t=self.t,
            validate=False,
        )

    def __repr__(self) -> str:
        return (
            f"Population(K={self.num_customers}, N={self.num_brands}, "
            f"M={self.schema.num_needs}, t={self.t})"
        )


def _flat_values(x) -> np.ndarray:
    if isinstance(x, WishProfile):
        return x.values
    return np.asarray(x, dtype=np.float64)


def distance(wish, assortment) -> float:
    """Mean squared slot difference between two same-shape profiles.

    Unknown entries participate as literal zeros, so an unmet need is
    penalised by the full assortment value.  Symmetric, and exactly zero
    iff the profiles are identical.
    """
    x = _flat_values(wish)
    y = _flat_values(assortment)
    if x.shape != y.shape:
        raise ValueError(f"profile shapes differ: {x.shape} vs {y.shape}")
    if (
        isinstance(wish, WishProfile)
        and isinstance(assortment, WishProfile)
        and wish.schema.jmax != assortment.schema.jmax
    ):
        raise ValueError("profiles belong to different schemas")
    d = x - y
    return float(np.mean(d * d))


def assign_brand(customer: Customer, brands: Sequence[BrandProfile]) -> int:
    """Index of the brand whose assortment is nearest to the customer's wish.

    Ties break to the smallest brand index.
    """
    if len(brands) == 0:
        raise ConfigurationError("assign_brand requires at least one brand")
    best = 0
    best_d = distance(customer.wish, brands[0].assortment)
    for idx in range(1, len(brands)):
        d = distance(customer.wish, brands[idx].assortment)
        if d < best_d:
            best = idx
            best_d = d
    return best


def refresh_affiliations(pop: Population) -> None:
    """Recompute every customer's nearest brand (ties to the smallest index)."""
    dists = cdist(pop.wish_matrix, pop.assortment_matrix, "sqeuclidean")
    aff = dists.argmin(axis=1)
    pop.affiliations[:] = aff
    for customer, b in zip(pop.customers, aff.tolist()):
        customer.affiliation = b


def init_schema(num_needs: int, rng: np.random.Generator) -> NeedSchema:
    """Draw a schema with each need's subentry count uniform on 1..5.

    Consumes ``num_needs`` uniforms; count ``i`` is
    ``1 + index_from_uniform(u_i, 5)``.
    """
    if num_needs < 1:
        raise ConfigurationError(f"M must be >= 1, got {num_needs}")
    u = rng.random(num_needs)
    counts = np.minimum((u * MAX_SUBENTRIES).astype(np.int64), MAX_SUBENTRIES - 1) + 1
    return NeedSchema(tuple(int(j) for j in counts))


def init_population(cfg: "SimConfig", rng: np.random.Generator) -> Population:
    """Draw the starting population for a run.

    Draw order (all uniforms from the single stream): M schema draws, then
    N*S brand assortment values as ``1 - u`` (brand-major, slots in flat
    order), then K*S candidate wish values as ``1 - u`` (customer-major),
    then K*S unknown-need coins (slot becomes 0 iff ``u < p_unknown``), then
    K ranks taken as ``u`` itself.  The ``leader_count`` customers with the
    highest drawn ranks (ties to the smaller id) are then promoted to rank
    exactly 1; if ``aligned_leader_brand`` is set their wishes are replaced
    by that brand's assortment.  No further draws are consumed.
    """
    if cfg.leader_count >= cfg.K:
        raise ConfigurationError(
            f"leader_count must stay below K, got {cfg.leader_count} >= {cfg.K}"
        )
    schema = init_schema(cfg.M, rng)
    S = schema.total_slots
    assort = 1.0 - rng.random((cfg.N, S))
    values = 1.0 - rng.random((cfg.K, S))
    unknown = rng.random((cfg.K, S))
    wish = np.where(unknown < cfg.p_unknown, 0.0, values)
    ranks = rng.random(cfg.K)
    if cfg.leader_count > 0:
        order = np.argsort(-ranks, kind="stable")
        leaders = order[: cfg.leader_count]
        ranks[leaders] = 1.0
        if cfg.aligned_leader_brand is not None:
            wish[leaders] = assort[cfg.aligned_leader_brand]
    return Population(
        schema, wish, ranks, assort, cfg.shop_counts, t=0, validate=False
    )
