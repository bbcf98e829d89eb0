"""Random-access symbol store paired with symbol neurons in the SKS."""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Network, NeuronSpec, Simulator
from .errors import DuplicateSymbol, NotFound

LINK_THRESHOLD = 1.0


@dataclass(frozen=True)
class LexiconEntry:
    symbol: str
    neuron: int
    sks_neuron: int
    attributes: dict = field(default_factory=dict, compare=False)
    # Name of the paired intuitive concept, if any.
    concept: str | None = None

    @property
    def pos(self) -> frozenset:
        raw = self.attributes.get("pos", ())
        if isinstance(raw, str):
            raw = raw.split(",")
        return frozenset(p.strip() for p in raw if p.strip())


class Lexicon:
    """Each symbol gets a Lexicon neuron wired both ways to an SKS neuron.

    The link weight equals the partner threshold, so one firing round of
    either neuron ignites the other on the next round.  A small inhibitory
    interneuron per neuron silences the echo that would otherwise bounce
    back along the reverse edge and keep the pair reverberating.
    """

    def __init__(self, net: Network | None = None):
        self.net = net if net is not None else Network()
        self.entries: dict[str, LexiconEntry] = {}

    def __contains__(self, symbol):
        return symbol in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries.values())

    def add_symbol(self, symbol: str, attributes=None, sks_neuron: int | None = None,
                   concept: str | None = None) -> LexiconEntry:
        if symbol in self.entries:
            raise DuplicateSymbol(f"symbol {symbol!r} already in the lexicon")
        net = self.net
        lex = net.add_neuron(NeuronSpec.threshold_gate(LINK_THRESHOLD, {"symbol", "input"},
                                                       f"lex:{symbol}"))
        if sks_neuron is None:
            sks_neuron = net.add_neuron(NeuronSpec.threshold_gate(LINK_THRESHOLD, {"symbol"},
                                                                  f"sks:{symbol}"))
        net.check(sks_neuron)
        net.add_edge(lex, sks_neuron, net.neurons[sks_neuron].threshold, "lexicon")
        net.add_edge(sks_neuron, lex, LINK_THRESHOLD, "lexicon")
        for n in (lex, sks_neuron):
            self._suppress_echo(n)
        entry = LexiconEntry(symbol, lex, sks_neuron, dict(attributes or {}), concept)
        self.entries[symbol] = entry
        return entry

    def _suppress_echo(self, n: int):
        thr = self.net.neurons[n].threshold
        # Tagged so that learning never recycles it as a free neuron.
        inter = self.net.add_neuron(NeuronSpec.threshold_gate(1.0, {"output"},
                                                              f"echo:{self.net.label(n)}"))
        self.net.add_edge(n, inter, 1.0, "echo")
        self.net.add_edge(inter, n, -2.0 * max(thr, 1.0), "echo")

    def lookup(self, symbol: str) -> LexiconEntry:
        try:
            return self.entries[symbol]
        except KeyError:
            raise NotFound(f"symbol {symbol!r} not in the lexicon") from None

    def by_neuron(self, nid: int) -> LexiconEntry:
        for e in self.entries.values():
            if nid in (e.neuron, e.sks_neuron):
                return e
        raise NotFound(f"neuron {nid} is not a lexicon or paired symbol neuron")

    def trigger(self, sim: Simulator, symbol: str, rnd: int | None = None) -> int:
        """Fire the symbol's Lexicon neuron for exactly one round."""
        entry = self.lookup(symbol)
        rnd = sim.round + 1 if rnd is None else rnd
        return sim.pulse({entry.neuron}, 1e6, rnd)


def add_symbol(lex: Lexicon, symbol: str, attributes=None, **kw) -> LexiconEntry:
    return lex.add_symbol(symbol, attributes, **kw)


def lookup(lex: Lexicon, symbol: str) -> LexiconEntry:
    return lex.lookup(symbol)
