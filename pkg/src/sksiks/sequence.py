"""Counting through a memorized sequence.

Two threshold chains (numbers 1..k and letters s_1..s_k) share one
increment circuit: each chain neuron has a self-loop of weight ``l``, an
edge of weight ``s`` to its successor and an edge of weight ``cur`` from its
current-role neuron.  An excitatory pulse ``exc`` followed by an inhibitory
pulse ``inh`` moves the single firing token one step; a residual ``s_resid``
of the old token's successor edge keeps the new token alive while the
inhibition lasts.

Queries bind three working-memory roles.  current-number and current-letter
share phase 0, goal uses phase 1.  The goal number lives in a separate
register of unary goal neurons, and one detector per number fires when the
counting token and the goal register hold the same number in consecutive
slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .engine import (CLAMP_WEIGHT, FiringState, Network, NeuronSpec, ResidualConfig, Simulator,
                     Trace)
from .errors import (AlreadyStarted, AtEnd, ConfigError, GoalOutOfRange, InvalidParams, SimError,
                     UnknownConcept, UnknownLetter)
from .iks import CascadeResult, ConceptGraph, cascade
from .working_memory import AlternationConfig, WorkingMemory

GREEK = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
         "lambda", "mu", "nu", "xi", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi",
         "chi", "psi", "omega")

PARAM_ORDER = ("h", "cur", "l", "s", "s_resid", "exc", "inh")
INEQUALITIES = ("I1", "I2", "I3", "I4", "I5", "I6", "I7")

COUNT_PHASE = 0
GOAL_PHASE = 1


@dataclass(frozen=True)
class CountParams:
    h: float
    cur: float
    l: float
    s: float
    s_resid: float
    exc: float
    inh: float

    @classmethod
    def reference(cls) -> "CountParams":
        return cls(h=3, cur=0, l=4, s=2, s_resid=1, exc=2, inh=-2)

    def as_tuple(self):
        return tuple(getattr(self, k) for k in PARAM_ORDER)

    @property
    def magnitude_fraction(self) -> float:
        return self.s_resid / self.s


def violation_mask(values) -> np.ndarray:
    """Vectorised inequality check.

    ``values`` has trailing axis of length 7 ordered as ``PARAM_ORDER``;
    the result has the same shape with True marking a violated constraint,
    columns ordered as ``INEQUALITIES``.
    """
    v = np.asarray(values, dtype=float)
    h, cur, l, s, sr, exc, inh = np.moveaxis(v, -1, 0)
    holds = np.stack([
        h <= cur + l,
        h > s + cur,
        h <= exc + s + cur,
        h > exc + cur,
        h > cur + l + inh,
        h <= cur + l + inh + sr,
        sr < s,
    ], axis=-1)
    return ~holds


def grid_search(lo: int = -5, hi: int = 5) -> np.ndarray:
    """Every integer tuple in [lo, hi]^7 that passes the validator.

    Evaluated in slices over (h, cur) to keep memory bounded.
    """
    vals = np.arange(lo, hi + 1, dtype=float)
    rest = np.stack(np.meshgrid(*[vals] * 5, indexing="ij"), axis=-1).reshape(-1, 5)
    found = []
    for h in vals:
        for cur in vals:
            block = np.empty((len(rest), 7))
            block[:, 0], block[:, 1], block[:, 2:] = h, cur, rest
            found.append(block[~violation_mask(block).any(axis=1)])
    return np.concatenate(found)


def validate_params(p: CountParams) -> list[str]:
    mask = violation_mask(p.as_tuple())
    return [name for name, bad in zip(INEQUALITIES, mask) if bad]


@dataclass(frozen=True)
class PulseSchedule:
    """Round offsets of one increment cycle, relative to the cycle start.

    The default fires the excitation on the round after the cycle start,
    inhibits immediately afterwards for two rounds and rests for one, so the
    two-token transient occupies a single round.
    """

    excite_at: int = 1
    excite_duration: int = 1
    inhibit_at: int = 2
    inhibit_duration: int = 2
    length: int = 4

    def __post_init__(self):
        if self.excite_at < 1 or self.excite_duration < 1 or self.inhibit_duration < 1:
            raise ConfigError("pulse offsets and durations must be positive")
        if self.inhibit_at < self.excite_at + self.excite_duration:
            raise ConfigError("inhibition must follow the excitation")
        if self.length < self.inhibit_at + self.inhibit_duration - 1:
            raise ConfigError("cycle too short for its pulses")

    @classmethod
    def spaced(cls) -> "PulseSchedule":
        """One idle round between excitation and inhibition."""
        return cls(excite_at=1, excite_duration=1, inhibit_at=3, inhibit_duration=2, length=5)


@dataclass
class QueryResult:
    letter_index: int
    letter: str
    decision: CascadeResult
    latency_rounds: int
    increments: int = 0
    emotion: CascadeResult | None = None
    trace: Trace | None = field(default=None, repr=False)

    @property
    def iks_rounds(self) -> int | None:
        return self.decision.stabilization_round


class SequenceNetwork:
    """Chains, roles, goal register and detectors, plus a running simulation."""

    def __init__(self, k: int, params: CountParams, net: Network, numbers, letters, letter_names,
                 goal_numbers, detectors, roles, iks: ConceptGraph | None, iks_links, period: int,
                 schedule: PulseSchedule, handoff_weight: float):
        self.k = k
        self.params = params
        self.net = net
        self.numbers = numbers
        self.letters = letters
        self.letter_names = list(letter_names)
        self.goal_numbers = goal_numbers
        self.detectors = detectors
        self.role_ids = roles
        self.iks = iks
        self.iks_links = iks_links
        self.period = period
        self.schedule = schedule
        self.handoff_weight = handoff_weight
        self.reset()

    # Lifecycle.

    def reset(self, seed=0, init: FiringState | None = None):
        self.sim = Simulator(self.net, init, seed)
        self.wm = WorkingMemory(self.sim, AlternationConfig(self.period, 2))
        chain = set(self.numbers) | set(self.letters)
        self.role_cn = self.wm.add_role("current-number", COUNT_PHASE, self.role_ids["current-number"],
                                        domain=self.numbers)
        self.role_cl = self.wm.add_role("current-letter", COUNT_PHASE, self.role_ids["current-letter"],
                                        domain=self.letters)
        self.role_goal = None
        if self.period > 1:
            self.role_goal = self.wm.add_role("goal", GOAL_PHASE, self.role_ids["goal"],
                                              domain=self.goal_numbers)
        for j, (num, goal) in enumerate(zip(self.numbers, self.goal_numbers), start=1):
            self.wm.symbol_key[num] = ("number", j)
            self.wm.symbol_key[goal] = ("number", j)
        self._chain = sorted(chain)
        self.started = False
        self.goal = None
        self._checked = 0
        return self.sim

    def seed_position(self, i: int, letter: int | None = None):
        """Start a fresh simulation with roles and token already at position i.

        The roles are bound without a start pulse; used to test a single
        increment from an arbitrary position.
        """
        letter = i if letter is None else letter
        init = FiringState.with_firing(
            self.net, [self.numbers[i - 1], self.letters[letter - 1],
                       self.role_cn.id, self.role_cl.id])
        self.reset(self.sim.seed, init)
        self.wm.bind(self.role_cn, self.numbers[i - 1])
        self.wm.bind(self.role_cl, self.letters[letter - 1])
        # The clamp would start at the next slot; backdate it to the seeded round.
        for role in (self.role_cn, self.role_cl):
            b = self.wm.binding_of(role)
            b.established_round = 0
            self.sim.signals[b.clamp] = replace(self.sim.signals[b.clamp], start_round=0)
        self.started = True

    @property
    def chain(self) -> list[int]:
        return self._chain

    # Observations.

    def firing_numbers(self, rnd: int | None = None) -> list[int]:
        f = self.sim.firing(self.sim.round if rnd is None else rnd)
        return [j for j, n in enumerate(self.numbers, start=1) if f[n]]

    def firing_letters(self, rnd: int | None = None) -> list[int]:
        f = self.sim.firing(self.sim.round if rnd is None else rnd)
        return [j for j, n in enumerate(self.letters, start=1) if f[n]]

    def position(self) -> int:
        nums = self.firing_numbers()
        if len(nums) != 1:
            raise SimError(f"expected a single counting token, found numbers {nums}")
        return nums[0]

    def detections(self, first: int, last: int) -> list[int]:
        hit = self.sim.fired_between(self.detectors, first, last)
        return [j for j, d in enumerate(self.detectors, start=1) if d in hit]

    # Control operations.

    def align(self):
        """Advance to the next counting slot if not already on one."""
        while self.sim.round % self.period != COUNT_PHASE:
            self.sim.advance()

    def start_count(self, letter_index: int = 1, pulse_weight: float | None = None):
        """Bind the current roles and ignite rep(1) and the starting letter."""
        if self.started or self.sim.firing(self.sim.round)[self.chain].any():
            raise AlreadyStarted("count already started")
        if not 1 <= letter_index <= self.k:
            raise GoalOutOfRange(f"letter index {letter_index} outside 1..{self.k}")
        p = self.params
        weight = p.s + p.exc if pulse_weight is None else pulse_weight
        self.wm.bind(self.role_cn, self.numbers[0])
        self.wm.bind(self.role_cl, self.letters[letter_index - 1])
        first = self.wm.binding_of(self.role_cn).clamp
        role_round = self.sim.signals[first].start_round
        self.sim.pulse({self.numbers[0], self.letters[letter_index - 1]}, weight, role_round + 1)
        self.sim.mark("start", role_round + 1)
        self.started = True
        self.sim.advance(role_round + 2 - self.sim.round)
        self.align()

    def set_goal(self, g: int):
        if not 1 <= g <= self.k:
            raise GoalOutOfRange(f"goal {g} outside 1..{self.k}")
        if self.role_goal is None:
            raise ConfigError("goal binding needs an alternation period of at least 2")
        self.wm.bind(self.role_goal, self.goal_numbers[g - 1], clamp_symbol=True)
        self.goal = g

    def increment(self, schedule: PulseSchedule | None = None) -> int:
        """Run one excite-then-inhibit cycle; return the new position."""
        sched = schedule or self.schedule
        self.align()
        i = self.position()
        if i >= self.k:
            raise AtEnd(f"already at the last position {self.k}")
        t = self.sim.round
        p = self.params
        chain = frozenset(self.chain)
        self.sim.pulse(chain, p.exc, t + sched.excite_at, sched.excite_duration)
        self.sim.pulse(chain, p.inh, t + sched.inhibit_at, sched.inhibit_duration)
        self.sim.advance(sched.length)
        self.align()
        new = self.position()
        for role, ids in ((self.role_cn, self.numbers), (self.role_cl, self.letters)):
            b = self.wm.binding_of(role)
            letters = self.firing_letters()
            if b is not None:
                self.wm.rebind(b, ids[new - 1] if role is self.role_cn else ids[letters[0] - 1])
        return new

    def hold(self, cycles: int = 1):
        self.sim.advance(cycles * self.period)

    def handoff(self) -> int | None:
        """Excite every letter concept for one round; return the concept that fires."""
        if not self.iks_links:
            raise ConfigError("no intuitive concepts attached to the letters")
        concepts = frozenset(self.iks_links.values())
        rnd = self.sim.round + 1
        self.sim.pulse(concepts, self.handoff_weight, rnd)
        self.sim.mark("handoff", rnd)
        self.sim.advance()
        fired = [c for c in concepts if self.sim.firing(rnd)[c]]
        return fired[0] if len(fired) == 1 else None

    # Queries.

    def _count(self, goal_number: int, start_letter: int, seed) -> tuple[int, int]:
        self.reset(seed)
        self.set_goal(goal_number)
        self.start_count(start_letter)
        steps = 0
        while True:
            seen = self.detections(self._checked, self.sim.round)
            self._checked = self.sim.round + 1
            if seen:
                self.sim.mark("equal")
                return self.sim.round, steps
            self.increment()
            steps += 1

    def _query(self, goal_number, start_letter, horizon, trials, seed, emotion) -> QueryResult:
        sks_seed, iks_seed = (int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2))
        _, steps = self._count(goal_number, start_letter, sks_seed)
        concept = self.handoff()
        if concept is None:
            raise SimError("handoff did not select a unique concept")
        latency = self.sim.round
        index = next(i for i, c in self.iks_links.items() if c == concept)
        decision = cascade(self.iks, {concept}, horizon, trials, iks_seed, "decision")
        feeling = None
        if emotion and self.iks.net.with_tag("emotion"):
            feeling = cascade(self.iks, {concept}, horizon, trials, iks_seed, "emotion")
        for res in (decision, feeling):
            if res is not None:
                res.seed = seed
        return QueryResult(index, self.letter_names[index - 1], decision, latency, steps, feeling,
                           self.sim.trace)

    def run_query1(self, g: int, horizon: int = 32, trials: int = 10_000, seed=0,
                   emotion: bool = True) -> QueryResult:
        if not isinstance(g, (int, np.integer)) or not 1 <= g <= self.k:
            raise GoalOutOfRange(f"goal {g} outside 1..{self.k}")
        return self._query(g, 1, horizon, trials, seed, emotion)

    def run_query2(self, letter: str, g: int, horizon: int = 32, trials: int = 10_000,
                   seed=0, emotion: bool = True) -> QueryResult:
        try:
            i = self.letter_names.index(letter) + 1
        except ValueError:
            raise UnknownLetter(f"unknown letter {letter!r}") from None
        if not 1 <= g <= self.k - i:
            raise GoalOutOfRange(f"goal {g} outside 1..{self.k - i} for letter {letter}")
        # The number chain still starts at 1, so g steps end at number g + 1.
        return self._query(g + 1, i, horizon, trials, seed, emotion)


def build_sequence_network(k: int, params: CountParams, iks: ConceptGraph | None = None,
                           letters=None, period: int = 2, schedule: PulseSchedule | None = None,
                           concept_for_letter: dict[str, str] | None = None) -> SequenceNetwork:
    """Wire the counting circuit, optionally merged with an intuitive graph.

    When ``iks`` is given its network is copied first so concept ids are
    shared, and each letter neuron is linked both ways to its concept.
    """
    bad = validate_params(params)
    if bad:
        raise InvalidParams(bad)
    if k < 1:
        raise ConfigError("sequence length must be positive")
    if letters is None:
        letters = GREEK[:k] if k <= len(GREEK) else tuple(f"s{i}" for i in range(1, k + 1))
    letters = list(letters)
    if len(letters) != k:
        raise ConfigError("need exactly one letter name per position")
    schedule = schedule or PulseSchedule()
    p = params
    residual = ResidualConfig(True, p.magnitude_fraction, schedule.inhibit_duration)
    net = iks.net.copy() if iks is not None else Network()
    net.residual = residual

    def chain(tag, names):
        ids = [net.add_neuron(NeuronSpec.threshold_gate(p.h, {tag, "symbol"}, nm)) for nm in names]
        for a, b in zip(ids, ids[1:]):
            net.add_edge(a, b, p.s, "successor")
        for a in ids:
            net.add_edge(a, a, p.l, "self-loop")
        return ids

    numbers = chain("number", [f"rep({i})" for i in range(1, k + 1)])
    letter_ids = chain("letter", [f"rep({nm})" for nm in letters])
    roles = {}
    for name in ("current-number", "current-letter", "goal"):
        roles[name] = net.add_neuron(NeuronSpec.threshold_gate(1.0, {"role"}, name))
    for n in numbers:
        net.add_edge(roles["current-number"], n, p.cur, "current")
    for n in letter_ids:
        net.add_edge(roles["current-letter"], n, p.cur, "current")
    goal_numbers = [net.add_neuron(NeuronSpec.threshold_gate(1.0, {"number", "input"}, f"goal({i})"))
                    for i in range(1, k + 1)]
    detectors = []
    for i, (num, goal) in enumerate(zip(numbers, goal_numbers), start=1):
        d = net.add_neuron(NeuronSpec.threshold_gate(1.0, {"output"}, f"equal({i})"))
        net.add_edge(num, d, 0.5, "equal")
        net.add_edge(goal, d, 0.5, "equal")
        detectors.append(d)

    links = {}
    handoff = 0.0
    if iks is not None:
        mapping = concept_for_letter or {}
        concepts = {}
        for i, nm in enumerate(letters, start=1):
            cname = mapping.get(nm, nm)
            if cname not in iks.concept_index:
                raise UnknownConcept(f"no concept for letter {nm!r}")
            concepts[i] = iks.concept(cname)
        handoff = min(net.neurons[c].threshold for c in concepts.values()) / 2
        if handoff <= 0:
            raise ConfigError("letter concepts need positive thresholds")
        # Feedback stays below what could ignite a silent letter even during excitation.
        feedback = (p.h - p.cur - p.exc) / 2
        for i, c in concepts.items():
            net.add_edge(letter_ids[i - 1], c, net.neurons[c].threshold - handoff, "concept")
            net.add_edge(c, letter_ids[i - 1], feedback, "symbol")
        links = concepts
    return SequenceNetwork(k, p, net, numbers, letter_ids, letters, goal_numbers, detectors, roles,
                           iks, links, period, schedule, handoff)
