"""Intuitive knowledge: concept graphs, firing cascades and Hebbian learning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import (CLAMP_WEIGHT, ExternalSignal, FiringState, Network, NeuronSpec, run_batch,
                     step)
from .errors import ConfigError, NoFreeNeuron, UnknownConcept

OUTPUT_TAGS = ("decision", "emotion")
WTA_POLICIES = ("highest-potential", "first-unused")

# Rounds at the end of the horizon over which an output must fire alone.
PERSISTENCE_ROUNDS = 3


@dataclass
class ConceptGraph:
    net: Network
    concept_index: dict[str, list[int]] = field(default_factory=dict)
    replicas: dict[int, list[int]] | None = None

    def concept(self, name: str) -> int:
        return self.representatives(name)[0]

    def representatives(self, name: str) -> list[int]:
        try:
            return list(self.concept_index[name])
        except KeyError:
            raise UnknownConcept(f"unknown concept {name!r}") from None

    def add_concept(self, name: str, spec: NeuronSpec | None = None, with_input: bool = False) -> int:
        spec = spec or NeuronSpec.threshold_gate(1.0)
        nid = self.net.add_neuron(NeuronSpec(spec.kind, spec.threshold, spec.steepness,
                                             spec.failure_prob, spec.tags | {"concept"}, name))
        self.concept_index.setdefault(name, []).append(nid)
        if with_input:
            src = self.net.add_neuron(NeuronSpec.threshold_gate(1.0, {"input"}, f"in:{name}"))
            self.net.add_edge(src, nid, max(spec.threshold, 0.0) + 1.0, "input")
        return nid

    def add_output(self, name: str, tag: str, spec: NeuronSpec) -> int:
        if tag not in OUTPUT_TAGS:
            raise ConfigError(f"output tag must be one of {OUTPUT_TAGS}")
        return self.net.add_neuron(NeuronSpec(spec.kind, spec.threshold, spec.steepness,
                                              spec.failure_prob, spec.tags | {tag}, name))

    def name_of(self, nid: int) -> str:
        return self.net.label(nid)

    def unreachable_outputs(self) -> list[int]:
        """Output neurons with no directed path from any concept neuron."""
        succ: dict[int, set[int]] = {}
        for e in self.net.edges:
            succ.setdefault(e.src, set()).add(e.dst)
        seen = set(self.net.with_tag("concept"))
        frontier = list(seen)
        reached = set()
        while frontier:
            u = frontier.pop()
            for v in succ.get(u, ()):
                if v not in reached:
                    reached.add(v)
                    if v not in seen:
                        seen.add(v)
                        frontier.append(v)
        outs = [i for tag in OUTPUT_TAGS for i in self.net.with_tag(tag)]
        return sorted(i for i in outs if i not in reached)


@dataclass
class CascadeResult:
    distribution: dict[int, float]
    stabilized: bool
    stabilization_round: int | None
    trials: int
    seed: object = None
    counts: dict[int, int] = field(default_factory=dict)
    labels: dict[int, str] = field(default_factory=dict)

    def probability(self, nid: int) -> float:
        return self.distribution.get(nid, 0.0)

    def prob(self, label: str) -> float:
        for nid, name in self.labels.items():
            if name == label:
                return self.probability(nid)
        raise UnknownConcept(f"no output named {label!r}")

    @property
    def mode(self) -> int | None:
        if not self.counts:
            return None
        return max(sorted(self.counts), key=lambda k: self.counts[k])

    @property
    def mode_label(self) -> str | None:
        m = self.mode
        return None if m is None else self.labels.get(m, f"n{m}")

    def to_json(self) -> dict:
        return {
            "distribution": {self.labels.get(k, str(k)): v for k, v in sorted(self.distribution.items())},
            "stabilized": self.stabilized,
            "stabilization_round": self.stabilization_round,
            "trials": self.trials,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ReplicationSpec:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("replication factor m must be >= 1")


@dataclass(frozen=True)
class LearningConfig:
    eta: float = 0.1
    wta_policy: str = "highest-potential"

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ConfigError("eta must lie in (0, 1)")
        if self.wta_policy not in WTA_POLICIES:
            raise ConfigError(f"wta_policy must be one of {WTA_POLICIES}")


def direct_recognize(g: ConceptGraph, inputs, seed=0) -> set[int]:
    """Concept neurons firing one round after the named inputs are presented.

    Input neurons feeding each named concept are fired at round 0; concepts
    without a dedicated input neuron are clamped directly.
    """
    net = g.net
    fire, clamp = set(), set()
    for name in inputs:
        reps = g.representatives(name)
        feeders = {e.src for e in net.edges if e.dst in reps and "input" in net.neurons[e.src].tags}
        if feeders:
            fire |= feeders
        else:
            clamp |= set(reps)
    if not fire and not clamp:
        return set()
    state = FiringState.with_firing(net, fire)
    signals = [ExternalSignal(frozenset(clamp), CLAMP_WEIGHT, 1)] if clamp else []
    after = step(net, state, signals, np.random.default_rng(seed))
    concepts = set(net.with_tag("concept"))
    return after.fired & concepts


def persistent_winners(outputs: np.ndarray, window: int = PERSISTENCE_ROUNDS):
    """Per-trial persistent output and its onset round.

    ``outputs`` is a (rounds+1, trials, n_out) firing array.  A trial has a
    winner when the same single output fires, alone among outputs, in each
    of the final ``window`` rounds.  Returns (winner, onset) arrays with -1
    where no winner exists; onset is the first round of the winner's
    uninterrupted solo run ending at the horizon.
    """
    horizon = outputs.shape[0] - 1
    window = max(1, min(window, horizon))
    tail = outputs[horizon - window + 1:]
    solo = tail.sum(axis=2) == 1
    first = tail[0].argmax(axis=1)
    same = (tail.argmax(axis=2) == first[None, :]).all(axis=0)
    ok = solo.all(axis=0) & same
    winner = np.where(ok, first, -1)
    onset = np.full(outputs.shape[1], -1)
    trials = np.flatnonzero(ok)
    if trials.size:
        pattern = np.zeros_like(outputs[:, trials, :])
        pattern[:, np.arange(trials.size), first[trials]] = True
        match = (outputs[:, trials, :] == pattern).all(axis=2)
        # Walk back from the horizon while the solo pattern holds.
        start = np.full(trials.size, horizon)
        alive = np.ones(trials.size, dtype=bool)
        for r in range(horizon - 1, -1, -1):
            alive &= match[r]
            start = np.where(alive, r, start)
        onset[trials] = start
    return winner, onset


def cascade(g: ConceptGraph, start, horizon: int = 32, trials: int = 10_000, seed=0,
            outputs: str = "decision") -> CascadeResult:
    """Empirical distribution of the persistent output after clamping ``start``.

    Start neurons fire at round 0 and are clamped on at round 1; the network
    then runs freely until ``horizon``.
    """
    if horizon < 1 or trials < 1:
        raise ConfigError("horizon and trials must be >= 1")
    net = g.net
    start = sorted(net.check(s) for s in start)
    out_ids = net.with_tag(outputs)
    init = FiringState.with_firing(net, start)
    signals = [ExternalSignal(frozenset(start), CLAMP_WEIGHT, 1)] if start else []
    traj = run_batch(net, init, signals, horizon, seed=seed, trials=trials)
    winner, onset = persistent_winners(traj[:, :, out_ids])
    counts = {}
    for idx, c in zip(*np.unique(winner[winner >= 0], return_counts=True)):
        counts[out_ids[int(idx)]] = int(c)
    won = onset[winner >= 0]
    return CascadeResult(
        distribution={k: v / trials for k, v in counts.items()},
        stabilized=bool((winner >= 0).all()),
        stabilization_round=int(won.max()) if won.size else None,
        trials=trials,
        seed=seed,
        counts=counts,
        labels={i: net.label(i) for i in out_ids},
    )


def oja_step(w: float, eta: float, x: float = 1.0, y: float = 1.0) -> float:
    return w + eta * y * (x - y * w)


def _strengthen(net: Network, src: int, dst: int, eta: float, label="learned") -> float:
    ids = net.edges_between(src, dst)
    eid = ids[0] if ids else net.add_edge(src, dst, 0.0, label)
    w = oja_step(net.edges[eid].weight, eta)
    net.set_weight(eid, w)
    return w


def unused_neurons(net: Network) -> list[int]:
    return [i for i, spec in enumerate(net.neurons) if not spec.tags]


def learn_concept(g: ConceptGraph, input_pattern, cfg: LearningConfig = LearningConfig(),
                  name: str | None = None) -> int:
    """Allocate an unused neuron for a new concept and wire the pattern to it."""
    net = g.net
    pattern = sorted(net.check(i) for i in input_pattern)
    free = unused_neurons(net)
    if not free:
        raise NoFreeNeuron("no untagged neuron available")
    if cfg.wta_policy == "first-unused" or not pattern:
        winner = free[0]
    else:
        pot = net.arrays().weights[pattern].sum(axis=0)
        # max() keeps the first of equal candidates, i.e. the lowest id.
        winner = max(free, key=lambda i: (pot[i], -i))
    for src in pattern:
        _strengthen(net, src, winner, cfg.eta)
    name = name or f"concept{winner}"
    net.retag(winner, "concept", name=name)
    g.concept_index.setdefault(name, []).append(winner)
    return winner


def learn_association(g: ConceptGraph, a: int, b: int, presentations: int,
                      cfg: LearningConfig = LearningConfig()) -> float:
    """Co-present ``a`` and ``b`` and return the strengthened a->b weight."""
    net = g.net
    net.check(a), net.check(b)
    ids = net.edges_between(a, b)
    eid = ids[0] if ids else net.add_edge(a, b, 0.0, "association")
    w = net.edges[eid].weight
    for _ in range(presentations):
        w = oja_step(w, cfg.eta)
    net.set_weight(eid, w)
    return w


def replicate(g: ConceptGraph, spec: ReplicationSpec) -> ConceptGraph:
    """Lower-level model with ``m`` disjoint replicas of every neuron.

    Each edge (u, v, w) becomes m*m edges of weight w/m, so a fully firing
    replica group delivers the same potential as the original neuron.
    """
    m = spec.m
    src = g.net
    net = Network(residual=src.residual)
    reps: dict[int, list[int]] = {}
    for i, ns in enumerate(src.neurons):
        base = ns.name if ns.name is not None else f"n{i}"
        reps[i] = [net.add_neuron(NeuronSpec(ns.kind, ns.threshold, ns.steepness, ns.failure_prob,
                                             ns.tags, base if m == 1 else f"{base}#{r}"))
                   for r in range(m)]
    for e in src.edges:
        for a in reps[e.src]:
            for b in reps[e.dst]:
                net.add_edge(a, b, e.weight / m, e.label)
    index = {name: [r for nid in ids for r in reps[nid]] for name, ids in g.concept_index.items()}
    return ConceptGraph(net, index, reps)
