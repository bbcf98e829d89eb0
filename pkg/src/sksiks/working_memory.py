"""Role neurons bound to symbol neurons by phase-slotted co-firing.

Time is cut into cycles of ``period`` rounds.  Each role owns one phase
slot; while bound, a role fires on exactly the rounds ``r`` with
``r % period == phase`` and nowhere else.  A binding is the co-firing of the
role with one symbol neuron on those rounds.  Several bindings alternate by
occupying distinct phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import CLAMP_WEIGHT, ExternalSignal, NeuronSpec, Simulator, Trace
from .errors import ConfigError, RoleBusy, RoleUnbound

SYMBOL_TAGS = frozenset({"symbol", "number", "letter"})


@dataclass(frozen=True)
class AlternationConfig:
    period: int = 2
    window: int = 2

    def __post_init__(self):
        if self.period < 1 or self.window < 1:
            raise ConfigError("period and window must be positive")


@dataclass(frozen=True)
class RoleNeuron:
    id: int
    name: str
    phase: int
    # Symbol neurons this role may point to; None means every symbol-tagged neuron.
    domain: frozenset | None = None


@dataclass
class Binding:
    role: RoleNeuron
    symbol: int
    established_round: int
    clamp: int
    clamp_symbol: bool = False
    released_round: int | None = None

    @property
    def active(self) -> bool:
        return self.released_round is None


class WorkingMemory:
    def __init__(self, sim: Simulator, config: AlternationConfig = AlternationConfig()):
        self.sim = sim
        self.config = config
        self.roles: dict[str, RoleNeuron] = {}
        self.bindings: dict[str, Binding] = {}
        self.history: list[Binding] = []
        # Symbols with equal keys count as "the same symbol" for equality tests.
        self.symbol_key: dict[int, object] = {}

    @property
    def period(self) -> int:
        return self.config.period

    @property
    def window(self) -> int:
        return self.config.window

    def add_role(self, name: str, phase: int, neuron: int | None = None, domain=None) -> RoleNeuron:
        if name in self.roles:
            raise ConfigError(f"duplicate role {name!r}")
        if not 0 <= phase < self.period:
            raise ConfigError(f"phase {phase} outside [0, {self.period})")
        net = self.sim.net
        if neuron is None:
            neuron = net.add_neuron(NeuronSpec.threshold_gate(1.0, {"role"}, name))
        else:
            net.check(neuron)
        role = RoleNeuron(neuron, name, phase, None if domain is None else frozenset(domain))
        self.roles[name] = role
        return role

    def role(self, name: str) -> RoleNeuron:
        try:
            return self.roles[name]
        except KeyError:
            raise ConfigError(f"unknown role {name!r}") from None

    def next_slot(self, phase: int, after: int | None = None) -> int:
        after = self.sim.round if after is None else after
        r = after + 1
        return r + (phase - r) % self.period

    def binding_of(self, role: RoleNeuron | str) -> Binding | None:
        name = role if isinstance(role, str) else role.name
        b = self.bindings.get(name)
        return b if b is not None and b.active else None

    def bind(self, role: RoleNeuron, symbol: int, clamp_symbol: bool = False) -> Binding:
        """Start co-firing ``role`` with ``symbol`` on the role's phase slots.

        With ``clamp_symbol`` the symbol is driven by the same phase-gated
        clamp; otherwise the symbol is expected to keep itself firing.
        """
        self.sim.net.check(symbol)
        if self.binding_of(role) is not None:
            raise RoleBusy(f"role {role.name!r} is already bound")
        first = self.next_slot(role.phase)
        targets = {role.id, symbol} if clamp_symbol else {role.id}
        clamp = self.sim.add_signal(ExternalSignal(frozenset(targets), CLAMP_WEIGHT, first, None,
                                                   self.period))
        binding = Binding(role, symbol, first + (self.window - 1) * self.period, clamp, clamp_symbol)
        self.bindings[role.name] = binding
        self.history.append(binding)
        self.sim.mark(f"bind:{role.name}", first)
        return binding

    def rebind(self, binding: Binding, symbol: int):
        """Move an active pointer to ``symbol`` (used when a count advances)."""
        self.sim.net.check(symbol)
        binding.symbol = symbol
        binding.established_round = self.sim.round

    def release(self, binding: Binding):
        if not binding.active:
            return
        now = self.sim.round
        self.sim.cancel_signal(binding.clamp, now + 1)
        role = binding.role
        first = self.next_slot(role.phase)
        targets = {role.id, binding.symbol} if binding.clamp_symbol else {role.id}
        self.sim.add_signal(ExternalSignal(frozenset(targets), -CLAMP_WEIGHT, first,
                                           self.window * self.period, self.period))
        binding.released_round = now
        self.sim.mark(f"release:{role.name}", first)

    def release_all(self):
        for b in list(self.bindings.values()):
            self.release(b)

    # Trace inspection.

    def domain(self, role: RoleNeuron) -> np.ndarray:
        net = self.sim.net
        mask = np.zeros(len(net), dtype=bool)
        if role.domain is not None:
            mask[list(role.domain)] = True
        else:
            for i, spec in enumerate(net.neurons):
                if spec.tags & SYMBOL_TAGS and "role" not in spec.tags:
                    mask[i] = True
        return mask

    def partners(self, role: RoleNeuron, rnd: int, trace: Trace | None = None) -> list[int]:
        """Symbols in the role's domain that fire together with it at ``rnd``."""
        firing = self._firing(rnd, trace)
        if not firing[role.id]:
            return []
        return np.flatnonzero(firing & self.domain(role)).tolist()

    def _firing(self, rnd, trace):
        n = len(self.sim.net)
        if trace is None:
            return self.sim.firing(rnd)
        return trace.states[rnd].padded(n).firing

    def split_attention(self, trace: Trace | None = None) -> list[tuple[int, str, list[int]]]:
        """Rounds where a role co-fires with more than one symbol neuron."""
        trace = trace or self.sim.trace
        bad = []
        for rnd in range(len(trace.states)):
            for role in self.roles.values():
                p = self.partners(role, rnd, trace)
                if len(p) > 1:
                    bad.append((rnd, role.name, p))
        return bad

    def off_phase_firing(self, trace: Trace | None = None) -> list[tuple[int, str]]:
        trace = trace or self.sim.trace
        out = []
        for rnd in range(len(trace.states)):
            firing = self._firing(rnd, trace)
            for role in self.roles.values():
                if firing[role.id] and rnd % self.period != role.phase:
                    out.append((rnd, role.name))
        return out

    def key(self, symbol: int):
        return self.symbol_key.get(symbol, symbol)

    def detect_equal(self, role_a: RoleNeuron, role_b: RoleNeuron, window: int | None = None,
                     since: int = 0, upto: int | None = None) -> bool:
        """True when both roles point at the same symbol for ``window`` cycles.

        A cycle matches when the symbol co-firing with ``role_a`` on its slot
        equals the one co-firing with ``role_b`` on the immediately following
        ``role_b`` slot.
        """
        for role in (role_a, role_b):
            if self.binding_of(role) is None:
                raise RoleUnbound(f"role {role.name!r} is not bound")
        if role_a.phase == role_b.phase:
            raise ConfigError("equality detection needs roles on distinct phases")
        window = self.window if window is None else window
        upto = self.sim.round if upto is None else upto
        run = 0
        r = since + (role_a.phase - since) % self.period
        while r <= upto:
            rb = self.next_slot(role_b.phase, r)
            if rb > upto:
                break
            pa, pb = self.partners(role_a, r), self.partners(role_b, rb)
            if len(pa) == 1 and len(pb) == 1 and self.key(pa[0]) == self.key(pb[0]):
                run += 1
                if run >= window:
                    return True
            else:
                run = 0
            r += self.period
        return False
