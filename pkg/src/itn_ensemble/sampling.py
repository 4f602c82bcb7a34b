"""Direct and Metropolis samplers for the binary and weighted ensembles.

Random numbers come from numpy's ``PCG64`` bit generator seeded with a single
integer, so a ``(model, seed)`` or ``(model, SamplerConfig)`` pair fixes the
output bit for bit. Replica seeds are derived with :func:`replica_seeds`.

Both Hamiltonians are sums of independent per-pair terms, so a Metropolis
sweep over the pairs in lexicographic order is carried out as one vectorized
update: the pairs never interact, and the random numbers are drawn in scan
order.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .binary import BinaryModel, binary_hamiltonian
from .core import BinarySnapshot, DataError
from .weighted import WeightedModel, expected_weight_matrix, weighted_hamiltonian

GENERATOR = "numpy.random.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def replica_seeds(master_seed: int, replicas: int) -> list[int]:
    """Seed of replica ``r`` is the first 64-bit word of
    ``SeedSequence(master_seed, spawn_key=(r,))``."""
    return [
        int(np.random.SeedSequence(master_seed, spawn_key=(r,)).generate_state(1, np.uint64)[0])
        for r in range(replicas)
    ]


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    sweeps: int = 1100
    burn_in: int = 100
    # None: per-pair half-width equal to that pair's mean weight 1/theta_ij
    proposal_halfwidth: float | None = None
    thinning: int = 10

    def __post_init__(self):
        if self.sweeps <= 0 or self.burn_in < 0 or self.thinning < 1:
            raise DataError("need sweeps > 0, burn_in >= 0, thinning >= 1")
        if self.sweeps <= self.burn_in:
            raise DataError("sweeps must exceed burn_in")
        if self.proposal_halfwidth is not None and not self.proposal_halfwidth > 0:
            raise DataError("proposal_halfwidth must be positive")

    @property
    def n_samples(self) -> int:
        return (self.sweeps - self.burn_in) // self.thinning


@dataclass(frozen=True, eq=False)
class EnsembleSample:
    kind: str  # "binary" | "weighted"
    payload: object  # BinarySnapshot or weight matrix
    seed: int
    energy: float
    sampler: str  # "direct" | "metropolis"
    sweep: int = 0
    # accepted / proposed since the previous emitted sample (Metropolis only)
    acceptance: float | None = None

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "binary":
            return self.payload.adjacency.astype(float)
        return self.payload


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def _ordered_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.nonzero(~np.eye(n, dtype=bool))


def _binary_payload(model: BinaryModel, edges: np.ndarray) -> BinarySnapshot:
    a = np.zeros((model.n, model.n), dtype=bool)
    iu = _pairs(model.n)
    a[iu] = edges
    a = a | a.T
    return BinarySnapshot(None, model.country_records(), a)


def _weight_payload(model: WeightedModel, values: np.ndarray) -> np.ndarray:
    w = np.zeros((model.n, model.n))
    w[_ordered_pairs(model.n)] = values
    return w


# -- direct samplers ---------------------------------------------------------


def draw_binary(model: BinaryModel, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Independent Bernoulli edges for the upper-triangle pairs, shape ``(size, P)``."""
    p = model.probability_matrix()[_pairs(model.n)]
    shape = p.shape if size is None else (size, p.size)
    return rng.random(shape) < p


def draw_weighted(model: WeightedModel, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Exponential flows for the off-diagonal pairs in row-major order.

    Inverse CDF: ``w = -ln(u) / theta`` with ``u`` uniform on ``(0, 1]``.
    """
    mean = expected_weight_matrix(model)[_ordered_pairs(model.n)]
    shape = mean.shape if size is None else (size, mean.size)
    u = 1.0 - rng.random(shape)
    return -np.log(u) * mean


def sample_binary_direct(model: BinaryModel, seed: int) -> EnsembleSample:
    graph = _binary_payload(model, draw_binary(model, make_rng(seed)))
    return EnsembleSample("binary", graph, seed, binary_hamiltonian(graph, model), "direct")


def sample_weighted_direct(model: WeightedModel, seed: int) -> EnsembleSample:
    w = _weight_payload(model, draw_weighted(model, make_rng(seed)))
    return EnsembleSample("weighted", w, seed, weighted_hamiltonian(w, model), "direct")


# -- Metropolis --------------------------------------------------------------


@dataclass(eq=False)
class MetropolisTrace(Sequence):
    """Thinned output of one Metropolis run.

    ``states[k]`` holds the pair values (edge indicators or flows) at emitted
    sweep ``sweeps[k]``; :class:`EnsembleSample` objects are built on access.
    """

    kind: str
    model: object
    config: SamplerConfig
    states: np.ndarray
    sweeps: np.ndarray
    energies: np.ndarray
    acceptance: np.ndarray
    accepted_total: int = 0
    proposed_total: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.sweeps)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        if k not in self._cache:
            if self.kind == "binary":
                payload = _binary_payload(self.model, self.states[k].astype(bool))
            else:
                payload = _weight_payload(self.model, self.states[k])
            self._cache[k] = EnsembleSample(
                self.kind, payload, self.config.seed, float(self.energies[k]), "metropolis",
                int(self.sweeps[k]), float(self.acceptance[k]),
            )
        return self._cache[k]

    @property
    def acceptance_rate(self) -> float:
        return self.accepted_total / self.proposed_total


def binary_flip_acceptance(model: BinaryModel, edges: np.ndarray, pair: int) -> float:
    """Probability of accepting a flip of upper-triangle pair ``pair``.

    Adding the link changes the energy by ``theta_i + theta_j = -ln(d x_i x_j)``,
    removing it by the opposite amount.
    """
    s = model.log_odds()[_pairs(model.n)][pair]
    dH = s if edges[pair] else -s
    return 1.0 if dH <= 0 else math.exp(-dH)


def weighted_move_acceptance(theta: float, w: float, w_new: float) -> float:
    """Probability of accepting a move ``w -> w_new`` of a flow with rate ``theta``."""
    if w_new < 0:
        return 0.0
    dH = theta * (w_new - w)
    return 1.0 if dH <= 0 else math.exp(-dH)


def _run(kind, model, config, n_pairs, step, state, energy_of):
    rng = make_rng(config.seed)
    n_out = config.n_samples
    states = np.empty((n_out, n_pairs), dtype=state.dtype)
    sweeps = np.empty(n_out, dtype=np.int64)
    acc = np.empty(n_out)
    accepted = proposed = 0
    acc_window = prop_window = 0
    k = 0
    block = 256
    for start in range(0, config.sweeps, block):
        nb = min(block, config.sweeps - start)
        draws = rng.random((nb, 2, n_pairs))
        for b in range(nb):
            sweep = start + b + 1
            n_acc = step(state, draws[b, 0], draws[b, 1])
            accepted += n_acc
            proposed += n_pairs
            acc_window += n_acc
            prop_window += n_pairs
            if sweep > config.burn_in and (sweep - config.burn_in) % config.thinning == 0:
                states[k] = state
                sweeps[k] = sweep
                acc[k] = acc_window / prop_window
                acc_window = prop_window = 0
                k += 1
    energies = np.array([energy_of(s) for s in states])
    return MetropolisTrace(kind, model, config, states, sweeps, energies, acc, accepted, proposed)


def metropolis_binary(model: BinaryModel, config: SamplerConfig) -> MetropolisTrace:
    """Single-pair flip Metropolis, starting from the empty graph.

    A sweep proposes flipping each of the ``N(N-1)/2`` pairs once. Each flip is
    accepted when ``u < exp(-dH)``, i.e. with probability ``min(1, e^-dH)``.
    """
    s = model.log_odds()[_pairs(model.n)]
    theta = model.theta
    iu = _pairs(model.n)
    pair_field = theta[iu[0]] + theta[iu[1]]

    def step(state, _unused, u):
        dH = np.where(state, s, -s)
        with np.errstate(over="ignore"):
            ok = u < np.exp(-dH)
        state ^= ok
        return int(ok.sum())

    state = np.zeros(s.size, dtype=bool)
    return _run("binary", model, config, s.size, step, state,
                lambda st: float(pair_field[st].sum()))


def metropolis_weighted(model: WeightedModel, config: SamplerConfig) -> MetropolisTrace:
    """Additive random-walk Metropolis on every directed flow.

    Starts from the expected-weight matrix. A proposal ``w' = w + U(-D, D)``
    below zero is rejected outright; otherwise it is accepted with
    probability ``min(1, exp(-theta (w' - w)))``.
    """
    oi = _ordered_pairs(model.n)
    mean = expected_weight_matrix(model)[oi]
    theta = 1.0 / mean
    half = mean if config.proposal_halfwidth is None else np.full(mean.size, config.proposal_halfwidth)

    def step(state, r, u):
        delta = (2.0 * r - 1.0) * half
        new = state + delta
        with np.errstate(over="ignore"):
            ok = (new >= 0) & (u < np.exp(-theta * delta))
        state[ok] = new[ok]
        return int(ok.sum())

    state = mean.copy()
    return _run("weighted", model, config, mean.size, step, state,
                lambda st: float((theta * st).sum()))


# -- diagnostics -------------------------------------------------------------


@dataclass(frozen=True)
class SamplerReport:
    n: int
    acceptance_rate: float | None
    energy_mean: float
    energy_var: float
    autocorrelation_time: float | None
    ess: float | None
    degenerate: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "acceptance_rate": self.acceptance_rate,
            "energy_mean": self.energy_mean,
            "energy_var": self.energy_var,
            "autocorrelation_time": self.autocorrelation_time,
            "ess": self.ess,
            "degenerate": self.degenerate,
        }


def integrated_autocorrelation_time(x) -> float | None:
    """Geyer's initial positive sequence estimate; None for a constant series."""
    x = np.asarray(x, dtype=float)
    n = x.size
    xc = x - x.mean()
    if n < 2 or not np.any(xc):
        return None
    f = np.fft.rfft(xc, 2 * n)
    acov = np.fft.irfft(f * np.conj(f))[:n] / n
    gamma0 = acov[0]
    if gamma0 <= 0:
        return None
    total = 0.0
    for m in range(n // 2):
        pair = acov[2 * m] + acov[2 * m + 1]
        if pair <= 0:
            break
        total += pair
    return max(-1.0 + 2.0 * total / gamma0, 1.0 / n)


def sampler_diagnostics(trace) -> SamplerReport:
    if len(trace) == 0:
        raise DataError("empty trace")
    energies = np.array([s.energy for s in trace])
    if isinstance(trace, MetropolisTrace):
        acc = trace.acceptance_rate
    else:
        rates = [s.acceptance for s in trace if s.acceptance is not None]
        acc = float(np.mean(rates)) if rates else None
    tau = integrated_autocorrelation_time(energies)
    return SamplerReport(
        n=len(energies),
        acceptance_rate=acc,
        energy_mean=float(energies.mean()),
        energy_var=float(energies.var(ddof=1)) if len(energies) > 1 else 0.0,
        autocorrelation_time=tau,
        ess=None if tau is None else len(energies) / tau,
        degenerate=tau is None,
    )
