import pytest
from hypothesis import given, settings, strategies as st

from sksiks.engine import Simulator
from sksiks.errors import DuplicateSymbol, NotFound
from sksiks.lexicon import Lexicon, add_symbol, lookup
from sksiks.sequence import GREEK


class TestStore:
    def test_first_insert(self):
        lex = Lexicon()
        e = add_symbol(lex, "delta")
        assert "symbol" in lex.net.neurons[e.neuron].tags
        assert e.neuron != e.sks_neuron

    def test_duplicate(self):
        lex = Lexicon()
        add_symbol(lex, "delta")
        with pytest.raises(DuplicateSymbol):
            add_symbol(lex, "delta")

    def test_greek_alphabet(self):
        lex = Lexicon()
        entries = [add_symbol(lex, g) for g in GREEK]
        assert len(lex) == 24
        assert [lookup(lex, g) for g in GREEK] == entries
        assert len({e.neuron for e in entries}) == 24

    def test_not_found(self):
        with pytest.raises(NotFound):
            lookup(Lexicon(), "zeta-prime")

    @given(st.lists(st.text(min_size=1, max_size=8), unique=True, max_size=15))
    def test_round_trip(self, symbols):
        lex = Lexicon()
        entries = {s: lex.add_symbol(s) for s in symbols}
        assert all(lex.lookup(s) == e for s, e in entries.items())

    def test_pos_attribute(self):
        lex = Lexicon()
        e = lex.add_symbol("eats", {"pos": ["transitive-verb", "intransitive-verb"]})
        assert e.pos == {"transitive-verb", "intransitive-verb"}
        assert lex.add_symbol("runs", {"pos": "intransitive-verb"}).pos == {"intransitive-verb"}


class TestLinks:
    def fire(self, lex, nid):
        sim = Simulator(lex.net)
        sim.pulse({nid}, 1e6, 1)
        sim.advance(8)
        return [r for r in range(9) if sim.firing(r)[nid]], sim

    def test_lexicon_to_sks(self):
        lex = Lexicon()
        e = lex.add_symbol("delta")
        sim = Simulator(lex.net)
        lex.trigger(sim, "delta")
        sim.advance(8)
        assert [r for r in range(9) if sim.firing(r)[e.neuron]] == [1]
        assert [r for r in range(9) if sim.firing(r)[e.sks_neuron]] == [2]

    def test_sks_to_lexicon(self):
        lex = Lexicon()
        e = lex.add_symbol("delta")
        rounds, sim = self.fire(lex, e.sks_neuron)
        assert rounds == [1]
        assert [r for r in range(9) if sim.firing(r)[e.neuron]] == [2]

    def test_no_crosstalk(self):
        lex = Lexicon()
        a, b = lex.add_symbol("alpha"), lex.add_symbol("beta")
        _, sim = self.fire(lex, a.neuron)
        assert not sim.fired_between([b.neuron, b.sks_neuron], 0, 8)

    def test_existing_sks_neuron(self):
        from sksiks.engine import NeuronSpec
        lex = Lexicon()
        s = lex.net.add_neuron(NeuronSpec.threshold_gate(3.0, {"letter"}))
        e = lex.add_symbol("delta", sks_neuron=s)
        rounds, sim = self.fire(lex, e.neuron)
        assert [r for r in range(9) if sim.firing(r)[s]] == [2]
