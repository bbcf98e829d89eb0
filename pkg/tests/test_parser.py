import json

import pytest

from sksiks.errors import (Ambiguous, DuplicateTemplate, Incomplete, NoCandidates, NoTemplate,
                           UnknownConcept)
from sksiks.engine import Network, NeuronSpec
from sksiks.iks import ConceptGraph, cascade
from sksiks.lexicon import Lexicon
from sksiks.parser import (Parser, ReducedParse, Template, Word, story_cascade, to_story_outline)
from sksiks.specfile import fixture_path

NOUN = {"noun"}
TV, IV = {"transitive-verb"}, {"intransitive-verb"}


def english():
    return [Template("SVO", (("subject", NOUN), ("predicate", TV), ("object", NOUN)),
                     ("subject", "predicate", "object")),
            Template("SV", (("subject", NOUN), ("predicate", IV)), ("subject", "predicate"))]


def verb_final():
    return [Template("SVO", (("subject", NOUN), ("predicate", TV), ("object", NOUN)),
                     ("subject", "object", "predicate")),
            Template("SV", (("subject", NOUN), ("predicate", IV)), ("subject", "predicate"))]


@pytest.fixture
def parser(sentences):
    return sentences.build_parser()


class TestTemplates:
    def test_store(self):
        p = Parser()
        p.load_templates(english())
        assert len(p.templates) == 2

    def test_duplicate(self):
        with pytest.raises(DuplicateTemplate):
            Parser().load_templates(english() + english()[:1])

    def test_empty_store(self):
        p = Parser()
        p.load_templates([])
        with pytest.raises(NoTemplate):
            p.parse("boy runs")

    def test_roles_unordered(self):
        a = Template("T", (("b", NOUN), ("a", TV)))
        b = Template("T", (("a", TV), ("b", NOUN)))
        assert a == b and a.arity == 2

    def test_order_must_be_permutation(self):
        with pytest.raises(Exception):
            Template("T", (("a", NOUN),), ("b",))


class TestNarrowing:
    def test_baby_eats_banana(self, parser):
        parser.new_sentence()
        c = parser.ingest_word("baby")
        assert sorted(c.templates()) == ["SV", "SVO"]
        assert all(dict(x.assignment) == {"subject": "baby"} for x in c.alive)
        assert len(parser.ingest_word("eats")) == 2
        c = parser.ingest_word("banana")
        assert c.templates() == ["SVO"]
        assert dict(c.alive[0].assignment)["object"] == "banana"
        assert parser.sizes == [2, 2, 1]

    def test_boy_kicks_ball(self, parser):
        rp = parser.parse("boy kicks ball")
        assert rp == ReducedParse("SVO", {"subject": "boy", "predicate": "kicks", "object": "ball"})

    def test_sv(self, parser):
        assert parser.parse("baby eats") == ReducedParse("SV", {"subject": "baby", "predicate": "eats"})

    def test_incomplete(self, parser):
        with pytest.raises(Incomplete):
            parser.parse("boy")

    def test_no_candidates(self, parser):
        with pytest.raises(NoCandidates):
            parser.parse("kicks ball")

    def test_ambiguous(self):
        p = Parser()
        p.load_templates([Template("A", (("x", NOUN),)), Template("B", (("y", NOUN),))])
        p.new_sentence()
        p.ingest_word(Word("boy", NOUN))
        with pytest.raises(Ambiguous):
            p.end_sentence()

    def test_monotone(self, parser):
        parser.new_sentence()
        sizes = [len(parser.candidates)]
        for w in "horse eats tablecloth".split():
            sizes.append(len(parser.ingest_word(w)))
        assert sizes == sorted(sizes, reverse=True)

    def test_no_nonterminals(self, parser):
        rp = parser.parse("boy kicks ball")
        assert not {"Noun", "TransitiveVerb", "noun", "transitive-verb"} & set(rp.bindings)

    def test_order_insensitive_representation(self):
        en, vf = Parser(), Parser()
        en.load_templates(english())
        vf.load_templates(verb_final())
        for p in (en, vf):
            for w, pos in (("boy", NOUN), ("ball", NOUN), ("kicks", TV)):
                p.lexicon.add_symbol(w, {"pos": sorted(pos)})
        assert en.parse("boy kicks ball").bindings == vf.parse("boy ball kicks").bindings


class TestWorkingMemoryBinding:
    def test_roles_cofire_with_words(self, parser):
        parser.new_sentence()
        for w in "boy kicks ball".split():
            parser.ingest_word(w)
        wm, sim = parser.wm, parser.sim
        assert wm.split_attention() == [] and wm.off_phase_firing() == []
        lex = parser.lexicon
        subj = wm.role("subject")
        partners = {p for r in range(sim.round + 1) for p in wm.partners(subj, r)}
        assert partners == {lex.lookup("boy").sks_neuron}

    def test_released_at_end(self, parser):
        parser.parse("boy kicks ball")
        assert all(not b.active for b in parser.wm.history)
        roles = [r.id for r in parser.wm.roles.values()]
        start = parser.sim.round
        parser.sim.advance(6)
        assert not parser.sim.fired_between(roles, start + 1, parser.sim.round)


class TestCorpus:
    def test_fixture_corpus(self, sentences):
        corpus = json.loads(fixture_path("sentences.json").read_text())["corpus"]
        assert len(corpus) >= 12
        errors = {"Incomplete": Incomplete, "NoCandidates": NoCandidates, "Ambiguous": Ambiguous}
        p = sentences.build_parser()
        for item in corpus:
            want = item["expect"]
            if "error" in want:
                with pytest.raises(errors[want["error"]]):
                    p.parse(item["sentence"])
            else:
                rp = p.parse(item["sentence"])
                assert rp.to_json() == want
            assert p.sizes == item["sizes"]


class TestStory:
    def test_outline(self, sentences, parser):
        rp = parser.parse("boy kicks ball")
        o = to_story_outline(rp, sentences.graph, sentences.lexicon)
        g = sentences.graph
        assert o.constituents == {r: g.concept(w) for r, w in rp.bindings.items()}
        assert "concept" in g.net.neurons[o.story].tags

    def test_outline_is_functional(self, sentences, parser):
        rp = parser.parse("horse sews tablecloth")
        a = to_story_outline(rp, sentences.graph, sentences.lexicon)
        b = to_story_outline(rp, sentences.graph, sentences.lexicon)
        assert a.constituents == b.constituents and a.story == b.story

    def test_missing_concept(self, sentences):
        lex = sentences.lexicon
        lex.add_symbol("zebra", {"pos": ["noun"]})
        with pytest.raises(UnknownConcept):
            to_story_outline(ReducedParse("SV", {"subject": "zebra", "predicate": "runs"}),
                             sentences.graph, lex)

    def test_fresh_neuron_when_exhausted(self, sentences, parser):
        g = sentences.graph
        before = len(g.net)
        for i in range(12):
            to_story_outline(parser.parse("boy kicks ball"), g, sentences.lexicon, name=f"s{i}")
        assert len(g.net) == before + 4

    def test_single_constituent_one_hop(self):
        g = ConceptGraph(Network())
        ball = g.add_concept("ball", NeuronSpec.threshold_gate(1.0))
        pleasant = g.add_output("pleasant", "decision", NeuronSpec.threshold_gate(1.0))
        g.net.add_edge(ball, pleasant, 5.0)
        g.net.add_edge(pleasant, pleasant, 1.0)
        g.net.add_neuron(NeuronSpec.threshold_gate(1.0))
        lex = Lexicon()
        lex.add_symbol("ball", {"pos": ["noun"]}, concept="ball")
        o = to_story_outline(ReducedParse("N", {"subject": "ball"}), g, lex)
        assert story_cascade(o, g, horizon=8, trials=100).distribution == {pleasant: 1.0}

    @pytest.mark.parametrize("sentence,label", [("boy kicks ball", "pleasant"),
                                                ("horse sews tablecloth", "absurd")])
    def test_judgment(self, sentences, parser, sentence, label):
        o = to_story_outline(parser.parse(sentence), sentences.graph, sentences.lexicon)
        res = story_cascade(o, sentences.graph, trials=10_000, seed=2)
        assert res.mode_label == label and res.prob(label) >= 0.9

    @pytest.mark.parametrize("sentence,label", [("boy kicks ball", "pleasant"),
                                                ("baby eats banana", "pleasant"),
                                                ("horse sews tablecloth", "absurd")])
    def test_joint_context_superadditive(self, sentences, parser, sentence, label):
        g = sentences.graph
        o = to_story_outline(parser.parse(sentence), g, sentences.lexicon)
        joint = story_cascade(o, g, trials=4000, seed=3).prob(label)
        singles = [cascade(g, {c}, trials=4000, seed=3).probability(g.net.named(label))
                   for c in o.constituents.values()]
        assert joint >= max(singles)
