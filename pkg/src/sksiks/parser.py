"""Template-based sentence recognition and translation to story outlines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Network, NeuronSpec, Simulator
from .errors import (Ambiguous, DuplicateTemplate, Incomplete, NoCandidates, NoFreeNeuron,
                     NoTemplate, NotFound, SimError, UnknownConcept)
from .iks import CascadeResult, ConceptGraph, LearningConfig, cascade, learn_concept
from .lexicon import Lexicon
from .working_memory import AlternationConfig, WorkingMemory

POS = frozenset({"noun", "transitive-verb", "intransitive-verb"})


@dataclass(frozen=True)
class Template:
    id: str
    roles: tuple  # ((role name, frozenset of allowed pos), ...)
    language_order: tuple | None = None

    def __post_init__(self):
        roles = tuple(sorted((str(r), frozenset([p] if isinstance(p, str) else p))
                             for r, p in dict(self.roles).items()))
        object.__setattr__(self, "roles", roles)
        names = [r for r, _ in roles]
        if len(set(names)) != len(names):
            raise SimError(f"template {self.id!r} repeats a role")
        if self.language_order is not None:
            order = tuple(self.language_order)
            if sorted(order) != sorted(names):
                raise SimError(f"language order of {self.id!r} is not a permutation of its roles")
            object.__setattr__(self, "language_order", order)

    @property
    def arity(self) -> int:
        return len(self.roles)

    @property
    def order(self) -> tuple:
        return self.language_order or tuple(r for r, _ in self.roles)

    def allowed(self, role: str) -> frozenset:
        return dict(self.roles)[role]


@dataclass(frozen=True)
class Word:
    surface: str
    pos: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        if not self.pos:
            raise SimError(f"word {self.surface!r} has no part of speech")


@dataclass(frozen=True)
class Candidate:
    template: str
    assignment: tuple = ()  # ((role, word), ...) in assignment order


@dataclass
class CandidateSet:
    alive: list

    def __len__(self):
        return len(self.alive)

    def templates(self) -> list[str]:
        return [c.template for c in self.alive]


@dataclass(frozen=True)
class ReducedParse:
    template: str
    bindings: dict

    def to_json(self) -> dict:
        return {"template": self.template, "bindings": dict(self.bindings)}


@dataclass
class StoryOutline:
    story: int
    constituents: dict = field(default_factory=dict)


class Parser:
    """Narrows a set of candidate templates word by word.

    Each accepted word is also bound, in working memory, to the role it
    fills: the role neuron and the word's SKS neuron co-fire on the role's
    phase slot until the sentence ends.
    """

    def __init__(self, lexicon: Lexicon | None = None, seed=0):
        self.lexicon = lexicon if lexicon is not None else Lexicon()
        self.templates: dict[str, Template] = {}
        self.seed = seed
        self.candidates: CandidateSet | None = None
        self.sizes: list[int] = []
        self.words: list[Word] = []
        self.sim: Simulator | None = None
        self.wm: WorkingMemory | None = None
        self._role_neurons: dict[str, int] = {}

    @property
    def net(self) -> Network:
        return self.lexicon.net

    def load_templates(self, templates):
        store = {}
        for t in templates:
            if t.id in store:
                raise DuplicateTemplate(f"duplicate template id {t.id!r}")
            store[t.id] = t
        self.templates = store

    def role_names(self) -> list[str]:
        return sorted({r for t in self.templates.values() for r, _ in t.roles})

    def new_sentence(self):
        if not self.templates:
            raise NoTemplate("no sentence templates loaded")
        names = self.role_names()
        for r in names:
            if r not in self._role_neurons:
                self._role_neurons[r] = self.net.add_neuron(
                    NeuronSpec.threshold_gate(1.0, {"role"}, f"role:{r}"))
        self.sim = Simulator(self.net, seed=self.seed)
        self.wm = WorkingMemory(self.sim, AlternationConfig(period=len(names), window=1))
        domain = [e.sks_neuron for e in self.lexicon]
        for phase, r in enumerate(names):
            self.wm.add_role(r, phase, self._role_neurons[r], domain=domain)
        self.candidates = CandidateSet([Candidate(t) for t in self.templates])
        self.sizes = []
        self.words = []
        return self.candidates

    def word(self, surface: str) -> Word:
        entry = self.lexicon.lookup(surface)
        return Word(surface, entry.pos)

    def ingest_word(self, w: Word | str) -> CandidateSet:
        if self.candidates is None:
            raise SimError("no sentence is open")
        if isinstance(w, str):
            w = self.word(w)
        alive = []
        newly = {}
        for cand in self.candidates.alive:
            t = self.templates[cand.template]
            bound = {r for r, _ in cand.assignment}
            todo = [r for r in t.order if r not in bound]
            if not todo or not (w.pos & t.allowed(todo[0])):
                continue
            alive.append(Candidate(cand.template, cand.assignment + ((todo[0], w.surface),)))
            newly.setdefault(todo[0], w.surface)
        if not alive:
            self.candidates = None
            self._close()
            raise NoCandidates(f"no template accepts {w.surface!r} at this position")
        self.candidates = CandidateSet(alive)
        self.sizes.append(len(alive))
        self.words.append(w)
        self._bind(newly)
        return self.candidates

    def _bind(self, newly: dict):
        for role_name, surface in newly.items():
            if surface not in self.lexicon:
                continue
            role = self.wm.role(role_name)
            if self.wm.binding_of(role) is None:
                self.wm.bind(role, self.lexicon.lookup(surface).sks_neuron, clamp_symbol=True)
        self.sim.advance(self.wm.period)

    def _close(self):
        if self.wm is not None:
            self.wm.release_all()
            self.sim.advance(self.wm.period)

    def end_sentence(self) -> ReducedParse:
        if self.candidates is None:
            raise SimError("no sentence is open")
        complete = []
        for cand in self.candidates.alive:
            t = self.templates[cand.template]
            if len(cand.assignment) == t.arity:
                complete.append(cand)
        self.candidates = None
        self._close()
        if len(complete) > 1:
            raise Ambiguous("sentence completes templates " + ", ".join(c.template for c in complete))
        if not complete:
            raise Incomplete("no template is complete at the end of the sentence")
        c = complete[0]
        return ReducedParse(c.template, dict(c.assignment))

    def parse(self, sentence: str) -> ReducedParse:
        self.new_sentence()
        for token in sentence.split():
            self.ingest_word(token.strip(".,!?").lower())
        return self.end_sentence()


def to_story_outline(parse: ReducedParse, iks: ConceptGraph, lex: Lexicon,
                     name: str | None = None) -> StoryOutline:
    constituents = {}
    for role, surface in sorted(parse.bindings.items()):
        try:
            entry = lex.lookup(surface)
        except NotFound:
            raise UnknownConcept(f"word {surface!r} has no lexicon entry") from None
        if entry.concept is None:
            raise UnknownConcept(f"word {surface!r} has no paired concept")
        constituents[role] = iks.concept(entry.concept)
    name = name or "story:" + "/".join(parse.bindings[r] for r in sorted(parse.bindings))
    if name in iks.concept_index:
        story = iks.concept(name)
    else:
        cfg = LearningConfig(wta_policy="first-unused")
        try:
            story = learn_concept(iks, constituents.values(), cfg, name)
        except NoFreeNeuron:
            iks.net.add_neuron(NeuronSpec.threshold_gate(1.0 + len(constituents)))
            story = learn_concept(iks, constituents.values(), cfg, name)
    return StoryOutline(story, constituents)


def story_cascade(outline: StoryOutline, iks: ConceptGraph, horizon: int = 32,
                  trials: int = 10_000, seed=0, outputs: str = "decision") -> CascadeResult:
    return cascade(iks, set(outline.constituents.values()), horizon, trials, seed, outputs)
