"""Round-synchronous spiking network engine.

A network is a labeled, weighted, directed multigraph of neurons.  At each
round every neuron sums the weights of edges from neurons that fired in the
previous round, any residual contributions from recently silenced
neighbours, and the weights of external signals active in the current round.
Deterministic neurons fire iff that potential reaches their threshold;
stochastic neurons fire with logistic probability.  A per-neuron failure
probability then flips the firing bit.

All edges have a delay of exactly one round.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigError, UnknownNeuron

DETERMINISTIC = "deterministic-threshold"
STOCHASTIC = "sigmoid-stochastic"
KINDS = (DETERMINISTIC, STOCHASTIC)

TAGS = frozenset(
    {"input", "output", "decision", "emotion", "number", "letter", "role", "concept", "symbol"}
)

# Weight used to force a neuron on; large enough to saturate any logistic.
CLAMP_WEIGHT = 1.0e6


@dataclass(frozen=True)
class NeuronSpec:
    kind: str = DETERMINISTIC
    threshold: float = 1.0
    steepness: float = 1.0
    failure_prob: float = 0.0
    tags: frozenset = frozenset()
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown neuron kind {self.kind!r}")
        if self.steepness <= 0:
            raise ConfigError("steepness must be positive")
        if not 0.0 <= self.failure_prob <= 1.0:
            raise ConfigError("failure_prob must lie in [0, 1]")
        if self.kind == DETERMINISTIC and self.failure_prob != 0.0:
            raise ConfigError("deterministic neurons cannot have a failure probability")
        object.__setattr__(self, "tags", frozenset(self.tags))

    @classmethod
    def threshold_gate(cls, threshold, tags=(), name=None):
        return cls(DETERMINISTIC, float(threshold), tags=frozenset(tags), name=name)

    @classmethod
    def sigmoid(cls, threshold, steepness, failure_prob=0.0, tags=(), name=None):
        return cls(STOCHASTIC, float(threshold), float(steepness), float(failure_prob),
                   frozenset(tags), name)

    @property
    def stochastic(self):
        return self.kind == STOCHASTIC


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: float
    label: str | None = None


@dataclass(frozen=True)
class ResidualConfig:
    """Presynaptic residual potential.

    A neuron that fired at round t and is silent at t+1 keeps contributing
    ``magnitude_fraction * weight`` along each outgoing edge at rounds
    t+2 .. t+1+window, unless it fires again.
    """

    enabled: bool = False
    magnitude_fraction: float = 0.0
    window: int = 1

    def __post_init__(self):
        if not 0.0 <= self.magnitude_fraction < 1.0:
            raise ConfigError("magnitude_fraction must lie in [0, 1)")
        if self.window < 1:
            raise ConfigError("residual window must be a positive integer")


@dataclass(frozen=True)
class ExternalSignal:
    """Externally scheduled pulse of potential.

    ``targets`` is either a set of neuron ids or a tag name, in which case
    the pulse reaches every neuron carrying that tag.  The signal is active
    at rounds ``start_round + j * every`` for ``0 <= j * every < duration``;
    ``duration=None`` keeps it active until cancelled.
    """

    targets: frozenset | str
    weight: float
    start_round: int
    duration: int | None = 1
    every: int = 1

    def __post_init__(self):
        if not isinstance(self.targets, str):
            object.__setattr__(self, "targets", frozenset(int(t) for t in self.targets))
        if self.start_round < 0:
            raise ConfigError("signal start_round must be non-negative")
        if self.duration is not None and self.duration < 1:
            raise ConfigError("signal duration must be positive")
        if self.every < 1:
            raise ConfigError("signal period must be positive")

    def active(self, rnd: int) -> bool:
        if rnd < self.start_round:
            return False
        if self.duration is not None and rnd >= self.start_round + self.duration:
            return False
        return (rnd - self.start_round) % self.every == 0

    @property
    def end_round(self):
        """First round at which the signal is no longer active (None = open)."""
        return None if self.duration is None else self.start_round + self.duration


class Network:
    """Growable multigraph of neuron specifications."""

    def __init__(self, neurons=(), edges=(), residual: ResidualConfig | None = None):
        self.neurons: list[NeuronSpec] = []
        self.edges: list[Edge] = []
        self.residual = residual or ResidualConfig()
        self._cache = None
        for spec in neurons:
            self.add_neuron(spec)
        for e in edges:
            self.add_edge(e.src, e.dst, e.weight, e.label)

    def __len__(self):
        return len(self.neurons)

    def add_neuron(self, spec: NeuronSpec) -> int:
        self.neurons.append(spec)
        self._cache = None
        return len(self.neurons) - 1

    def add_edge(self, src: int, dst: int, weight: float, label: str | None = None) -> int:
        for n in (src, dst):
            self.check(n)
        self.edges.append(Edge(int(src), int(dst), float(weight), label))
        self._cache = None
        return len(self.edges) - 1

    def set_weight(self, edge_id: int, weight: float):
        self.edges[edge_id] = dataclasses.replace(self.edges[edge_id], weight=float(weight))
        self._cache = None

    def retag(self, n: int, *tags: str, name: str | None = None):
        spec = self.neurons[self.check(n)]
        self.neurons[n] = dataclasses.replace(
            spec, tags=spec.tags | frozenset(tags), name=name if name is not None else spec.name
        )
        self._cache = None

    def check(self, n) -> int:
        if not isinstance(n, (int, np.integer)) or not 0 <= n < len(self.neurons):
            raise UnknownNeuron(f"no neuron {n!r} in a network of {len(self.neurons)}")
        return int(n)

    def with_tag(self, tag: str) -> list[int]:
        return [i for i, spec in enumerate(self.neurons) if tag in spec.tags]

    def named(self, name: str) -> int:
        for i, spec in enumerate(self.neurons):
            if spec.name == name:
                return i
        raise UnknownNeuron(f"no neuron named {name!r}")

    def label(self, n: int) -> str:
        name = self.neurons[n].name
        return name if name is not None else f"n{n}"

    def edges_between(self, src: int, dst: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.src == src and e.dst == dst]

    def copy(self) -> "Network":
        return Network(self.neurons, self.edges, self.residual)

    def resolve(self, targets) -> list[int]:
        if isinstance(targets, str):
            return self.with_tag(targets)
        return sorted(self.check(t) for t in targets)

    def arrays(self):
        """Dense views used by the step kernel, cached until the next mutation."""
        if self._cache is None:
            n = len(self.neurons)
            weights = np.zeros((n, n))
            for e in self.edges:
                weights[e.src, e.dst] += e.weight
            self._cache = _Arrays(
                weights=weights,
                threshold=np.array([s.threshold for s in self.neurons], dtype=float),
                steepness=np.array([s.steepness for s in self.neurons], dtype=float),
                failure=np.array([s.failure_prob for s in self.neurons], dtype=float),
                stochastic=np.array([s.stochastic for s in self.neurons], dtype=bool),
            )
        return self._cache


@dataclass
class _Arrays:
    weights: np.ndarray
    threshold: np.ndarray
    steepness: np.ndarray
    failure: np.ndarray
    stochastic: np.ndarray

    def __post_init__(self):
        self.stochastic_idx = np.flatnonzero(self.stochastic)
        self.failure_idx = np.flatnonzero(self.failure > 0)


def add_neuron(net: Network, spec: NeuronSpec) -> int:
    return net.add_neuron(spec)


def add_edge(net: Network, src: int, dst: int, weight: float, label: str | None = None) -> int:
    return net.add_edge(src, dst, weight, label)


@dataclass
class FiringState:
    round: int
    firing: np.ndarray
    residual: np.ndarray = None

    def __post_init__(self):
        self.firing = np.asarray(self.firing, dtype=bool)
        if self.residual is None:
            self.residual = np.zeros(self.firing.shape, dtype=np.int64)
        else:
            self.residual = np.asarray(self.residual, dtype=np.int64)

    @classmethod
    def quiet(cls, net_or_size, rnd=0):
        size = net_or_size if isinstance(net_or_size, int) else len(net_or_size)
        return cls(rnd, np.zeros(size, dtype=bool))

    @classmethod
    def with_firing(cls, net_or_size, ids: Iterable[int], rnd=0):
        state = cls.quiet(net_or_size, rnd)
        state.firing[list(ids)] = True
        return state

    @property
    def fired(self) -> set[int]:
        return set(np.flatnonzero(self.firing).tolist())

    @property
    def residual_ledger(self) -> dict[int, int]:
        return {int(i): int(self.residual[i]) for i in np.flatnonzero(self.residual)}

    def padded(self, n: int) -> "FiringState":
        if len(self.firing) == n:
            return self
        if len(self.firing) > n:
            raise ConfigError("state is larger than the network")
        pad = n - len(self.firing)
        return FiringState(self.round, np.pad(self.firing, (0, pad)), np.pad(self.residual, (0, pad)))


def signal_vector(net: Network, signals: Iterable[ExternalSignal], rnd: int, shape=None):
    """Summed external potential per neuron at round ``rnd``, plus active indices."""
    vec = np.zeros(len(net))
    active = []
    for idx, sig in enumerate(signals):
        if sig.active(rnd):
            active.append(idx)
            vec[net.resolve(sig.targets)] += sig.weight
    return vec, active


def potential(net: Network, state: FiringState, n: int, signals: Sequence[ExternalSignal] = ()) -> float:
    """Incoming potential of ``n`` for the round after ``state``.

    Signals are evaluated at round ``state.round + 1``.
    """
    net.check(n)
    state = state.padded(len(net))
    arr = net.arrays()
    total = float(arr.weights[state.firing, n].sum())
    if net.residual.enabled:
        lingering = (state.residual > 0) & ~state.firing
        total += net.residual.magnitude_fraction * float(arr.weights[lingering, n].sum())
    vec, _ = signal_vector(net, signals, state.round + 1)
    return total + float(vec[n])


def _advance(net: Network, firing, residual, external, rng):
    """Vectorised kernel; ``firing`` and ``residual`` are (batch, n) arrays."""
    arr = net.arrays()
    pot = firing.astype(float) @ arr.weights
    if net.residual.enabled:
        lingering = (residual > 0) & ~firing
        pot += net.residual.magnitude_fraction * (lingering.astype(float) @ arr.weights)
    pot += external
    new = pot >= arr.threshold
    stoch = arr.stochastic_idx
    if stoch.size:
        # One uniform draw per stochastic neuron per trial, in index order.
        u = rng.random((firing.shape[0], stoch.size))
        z = arr.steepness[stoch] * (pot[:, stoch] - arr.threshold[stoch])
        new[:, stoch] = u < expit(z)
    fail = arr.failure_idx
    if fail.size:
        flip = rng.random((firing.shape[0], fail.size)) < arr.failure[fail]
        new[:, fail] ^= flip
    if net.residual.enabled:
        window = net.residual.window
        residual = np.where(new, 0, np.where(firing, window, np.maximum(residual - 1, 0)))
    return new, residual


def step(net: Network, state: FiringState, signals: Sequence[ExternalSignal] = (), rng=None) -> FiringState:
    state = state.padded(len(net))
    rng = rng if rng is not None else np.random.default_rng()
    external, _ = signal_vector(net, signals, state.round + 1)
    new, residual = _advance(net, state.firing[None, :], state.residual[None, :], external, rng)
    return FiringState(state.round + 1, new[0], residual[0])


@dataclass
class Trace:
    states: list[FiringState]
    signals_applied: list[list[int]]
    seed: object = None
    signals: list[ExternalSignal] = field(default_factory=list)
    events: dict[int, list[str]] = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    def matrix(self) -> np.ndarray:
        """(rounds+1, n) boolean firing matrix, padded to the widest state."""
        width = max(len(s.firing) for s in self.states)
        return np.array([s.padded(width).firing for s in self.states])

    def fired(self, rnd: int) -> set[int]:
        return self.states[rnd].fired


class Simulator:
    """Incremental driver around :func:`step` that records a :class:`Trace`.

    Signals may be added or cancelled between calls to :meth:`advance`, which
    is how controllers (working memory, counting, parsing) close the loop.
    """

    def __init__(self, net: Network, init: FiringState | None = None, seed=0,
                 signals: Iterable[ExternalSignal] = ()):
        self.net = net
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.states = [init if init is not None else FiringState.quiet(net)]
        self.signals: list[ExternalSignal] = list(signals)
        self.applied: list[list[int]] = [[]]
        self.events: dict[int, list[str]] = {}

    @property
    def round(self) -> int:
        return self.states[-1].round

    @property
    def state(self) -> FiringState:
        return self.states[-1]

    def add_signal(self, signal: ExternalSignal) -> int:
        self.signals.append(signal)
        return len(self.signals) - 1

    def pulse(self, targets, weight, start_round, duration=1, every=1) -> int:
        return self.add_signal(ExternalSignal(targets, weight, start_round, duration, every))

    def cancel_signal(self, idx: int, at_round: int):
        """Deactivate signal ``idx`` from ``at_round`` onward."""
        sig = self.signals[idx]
        end = sig.end_round
        if end is not None and end <= at_round:
            return
        duration = max(at_round - sig.start_round, 0)
        if duration == 0:
            self.signals[idx] = dataclasses.replace(sig, duration=1, start_round=sig.start_round,
                                                    weight=0.0)
        else:
            self.signals[idx] = dataclasses.replace(sig, duration=duration)

    def mark(self, event: str, rnd: int | None = None):
        self.events.setdefault(self.round if rnd is None else rnd, []).append(event)

    def advance(self, rounds: int = 1) -> FiringState:
        for _ in range(rounds):
            prev = self.states[-1].padded(len(self.net))
            external, active = signal_vector(self.net, self.signals, prev.round + 1)
            new, residual = _advance(self.net, prev.firing[None, :], prev.residual[None, :],
                                     external, self.rng)
            self.states.append(FiringState(prev.round + 1, new[0], residual[0]))
            self.applied.append(active)
        return self.states[-1]

    def firing(self, rnd: int) -> np.ndarray:
        return self.states[rnd].padded(len(self.net)).firing

    def fired_between(self, ids, first: int, last: int) -> set[int]:
        """Members of ``ids`` that fired in any round of [first, last]."""
        hit = set()
        for rnd in range(max(first, 0), last + 1):
            f = self.firing(rnd)
            hit.update(i for i in ids if f[i])
        return hit

    @property
    def trace(self) -> Trace:
        return Trace(list(self.states), [list(a) for a in self.applied], self.seed,
                     list(self.signals), {k: list(v) for k, v in self.events.items()})


def run(net: Network, init: FiringState | None, signals: Sequence[ExternalSignal], rounds: int,
        seed=0) -> Trace:
    if rounds < 1:
        raise ConfigError("rounds must be at least 1")
    sim = Simulator(net, init, seed, signals)
    sim.advance(rounds)
    return sim.trace


def run_batch(net: Network, init, signals: Sequence[ExternalSignal], rounds: int, seed=0,
              trials: int | None = None) -> np.ndarray:
    """Simulate many independent trajectories at once.

    ``init`` is a (batch, n) boolean array, or a single state broadcast to
    ``trials`` rows.  Returns a (rounds+1, batch, n) boolean array.  Residual
    ledgers start empty.
    """
    if rounds < 1:
        raise ConfigError("rounds must be at least 1")
    n = len(net)
    init = np.asarray(init.padded(n).firing if isinstance(init, FiringState) else init, dtype=bool)
    if init.ndim == 1:
        init = np.broadcast_to(init, (trials or 1, n))
    firing = init.copy()
    residual = np.zeros(firing.shape, dtype=np.int64)
    rng = np.random.default_rng(seed)
    out = np.empty((rounds + 1,) + firing.shape, dtype=bool)
    out[0] = firing
    for r in range(1, rounds + 1):
        external, _ = signal_vector(net, signals, r)
        firing, residual = _advance(net, firing, residual, external, rng)
        out[r] = firing
    return out
