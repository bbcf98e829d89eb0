"""JSON scenario files and CSV trace output."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .engine import ExternalSignal, Network, NeuronSpec, ResidualConfig, Trace
from .errors import ConfigError, SimError
from .iks import ConceptGraph
from .lexicon import Lexicon
from .parser import Parser, Template
from .sequence import CountParams, PulseSchedule, SequenceNetwork, build_sequence_network

FIXTURES = ("greek-virus.json", "sentences.json")


@dataclass
class Scenario:
    graph: ConceptGraph
    signals: list = field(default_factory=list)
    lexicon: Lexicon | None = None
    templates: list = field(default_factory=list)
    sequence: dict | None = None
    source: str | None = None

    @property
    def net(self) -> Network:
        return self.graph.net

    def build_sequence(self, params: CountParams | None = None) -> SequenceNetwork:
        if self.sequence is None:
            raise ConfigError("scenario has no 'sequence' section")
        cfg = self.sequence
        p = params or parse_params(cfg.get("params", "paper"))
        sched = cfg.get("schedule")
        return build_sequence_network(
            int(cfg["k"]), p, self.graph, cfg.get("letters"), int(cfg.get("period", 2)),
            PulseSchedule(**sched) if sched else None, cfg.get("concepts"))

    def build_parser(self, seed=0) -> Parser:
        if self.lexicon is None:
            raise ConfigError("scenario has no 'lexicon' or 'words' section")
        p = Parser(self.lexicon, seed)
        p.load_templates(self.templates)
        return p


def parse_params(raw) -> CountParams:
    if raw == "paper":
        return CountParams.reference()
    if isinstance(raw, (str, Path)):
        raw = _read_json(raw)
    if isinstance(raw, dict) and "sequence" in raw:
        raw = raw["sequence"].get("params", "paper")
        if raw == "paper":
            return CountParams.reference()
    try:
        return CountParams(**{k: float(v) for k, v in raw.items()})
    except (TypeError, AttributeError, ValueError) as e:
        raise ConfigError(f"bad parameter tuple: {e}") from None


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("sksiks") / "fixtures" / name))


def resolve_spec_path(path) -> Path:
    """Accept a file path or the bare name of a shipped fixture."""
    p = Path(path)
    if not p.exists() and p.name in FIXTURES:
        return fixture_path(p.name)
    return p


def load(path) -> Scenario:
    path = resolve_spec_path(path)
    scenario = from_dict(_read_json(path))
    scenario.source = str(path)
    return scenario


def from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("spec file must hold a JSON object")
    try:
        return _build(doc)
    except SimError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed spec: {e!r}") from None


def _build(doc: dict) -> Scenario:
    net = Network(residual=ResidualConfig(**doc.get("residual", {})))
    for i, raw in enumerate(doc.get("neurons", [])):
        raw = dict(raw)
        raw.setdefault("name", None)
        raw["tags"] = frozenset(raw.get("tags", ()))
        net.add_neuron(NeuronSpec(**raw))

    def ref(x):
        return net.named(x) if isinstance(x, str) else net.check(x)

    for e in doc.get("edges", []):
        net.add_edge(ref(e["src"]), ref(e["dst"]), float(e["weight"]), e.get("label"))
    signals = []
    for s in doc.get("signals", []):
        targets = s["targets"]
        targets = targets if isinstance(targets, str) else frozenset(ref(t) for t in targets)
        signals.append(ExternalSignal(targets, float(s["weight"]), int(s.get("start_round", 0)),
                                      s.get("duration", 1), int(s.get("every", 1))))
    concepts = {name: [ref(i) for i in ids] for name, ids in doc.get("concepts", {}).items()}
    graph = ConceptGraph(net, concepts)

    lexicon = None
    words = doc.get("words", {})
    if "lexicon" in doc or words:
        lexicon = Lexicon()
        for item in doc.get("lexicon", []):
            attrs = dict(item.get("attributes", {}))
            concept = item.get("concept", item["symbol"] if item["symbol"] in concepts else None)
            lexicon.add_symbol(item["symbol"], attrs, concept=concept)
        for surface, pos in words.items():
            if surface in lexicon:
                continue
            lexicon.add_symbol(surface, {"pos": sorted(pos)},
                               concept=surface if surface in concepts else None)
    templates = [Template(t["id"], tuple(t["roles"].items()), t.get("language_order"))
                 for t in doc.get("templates", [])]
    return Scenario(graph, signals, lexicon, templates, doc.get("sequence"))


def write_trace_csv(trace: Trace, path, labels: list[str] | None = None):
    """One row per round: a 0/1 column per neuron, active signals, events."""
    m = trace.matrix()
    n = m.shape[1]
    labels = labels or [f"n{i}" for i in range(n)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["round", *labels[:n], "signals", "event"])
        for r, row in enumerate(m):
            applied = trace.signals_applied[r] if r < len(trace.signals_applied) else []
            w.writerow([r, *row.astype(int).tolist(), " ".join(map(str, applied)),
                        ";".join(trace.events.get(r, []))])
