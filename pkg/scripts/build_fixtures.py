"""Regenerate the JSON fixtures shipped in src/sksiks/fixtures."""

import json
from pathlib import Path

from sksiks.sequence import GREEK

OUT = Path(__file__).resolve().parent.parent / "src" / "sksiks" / "fixtures"

SELF = 6.0
RIVAL = -8.0


def gate(name, threshold, tags):
    return {"kind": "deterministic-threshold", "threshold": threshold, "tags": tags, "name": name}


def sigmoid(name, threshold, steepness, tags, failure_prob=0.0):
    return {"kind": "sigmoid-stochastic", "threshold": threshold, "steepness": steepness,
            "failure_prob": failure_prob, "tags": tags, "name": name}


def wta(names, tag, neurons, edges):
    """Mutually inhibiting, self-sustaining output group."""
    for n in names:
        neurons.append(sigmoid(n, 2.0, 6.0, [tag, "output"]))
        edges.append({"src": n, "dst": n, "weight": SELF, "label": "self"})
    for a in names:
        for b in names:
            if a != b:
                edges.append({"src": a, "dst": b, "weight": RIVAL, "label": "rival"})


def concept(name, neurons, edges):
    # Self-sustaining once ignited, so a cascade keeps its premise active.
    neurons.append(gate(name, 2.0, ["concept"]))
    edges.append({"src": name, "dst": name, "weight": 2.0, "label": "self"})


def greek_virus():
    neurons, edges = [], []
    for g in GREEK:
        concept(g, neurons, edges)
    features = ("mild", "serious", "deadly")
    for f in features:
        neurons.append(sigmoid(f, 1.0, 7.0, ["concept"], failure_prob=0.01))
    wta(["OK", "bad", "terrible"], "decision", neurons, edges)
    wta(["neutral", "scary", "terrifying"], "emotion", neurons, edges)
    # Severity cycles mild, mild, serious, deadly, so delta (4th) is deadly.
    pattern = ("mild", "mild", "serious", "deadly")
    for i, g in enumerate(GREEK):
        main = pattern[i % 4]
        edges.append({"src": g, "dst": main, "weight": 3.0, "label": "feature"})
        lower = features[max(features.index(main) - 1, 0)]
        if lower != main:
            edges.append({"src": g, "dst": lower, "weight": 0.6, "label": "feature"})
    for f, d, e in zip(features, ("OK", "bad", "terrible"), ("neutral", "scary", "terrifying")):
        edges.append({"src": f, "dst": d, "weight": 3.5, "label": "assess"})
        edges.append({"src": d, "dst": e, "weight": 3.5, "label": "feel"})
    return {
        "neurons": neurons,
        "edges": edges,
        "concepts": {g: [g] for g in GREEK},
        "lexicon": [{"symbol": g, "attributes": {"kind": "letter"}} for g in GREEK],
        "sequence": {"k": len(GREEK), "params": "paper", "letters": list(GREEK), "period": 2},
    }


WORDS = {
    "boy": ["noun"], "baby": ["noun"], "horse": ["noun"], "ball": ["noun"], "banana": ["noun"],
    "tablecloth": ["noun"],
    "kicks": ["transitive-verb"], "eats": ["transitive-verb", "intransitive-verb"],
    "sews": ["transitive-verb"], "reads": ["transitive-verb", "intransitive-verb"],
    "runs": ["intransitive-verb"], "sleeps": ["intransitive-verb"],
}

SCENES = {
    "play": {"boy": 1.0, "kicks": 1.0, "ball": 1.0, "runs": 1.0, "baby": 0.5, "horse": 0.5},
    "meal": {"eats": 1.2, "banana": 1.2, "baby": 0.8, "boy": 0.5},
    "cartoon": {"horse": 1.0, "sews": 1.2, "tablecloth": 1.0, "reads": 0.8, "ball": 0.3},
    "harm": {"kicks": 1.3, "baby": 1.3, "tablecloth": 0.4},
}
JUDGE = {"play": "pleasant", "meal": "pleasant", "cartoon": "absurd", "harm": "unpleasant"}

CORPUS = [
    ("boy kicks ball", {"template": "SVO", "bindings": {"subject": "boy", "predicate": "kicks", "object": "ball"}}, [2, 1, 1]),
    ("baby eats banana", {"template": "SVO", "bindings": {"subject": "baby", "predicate": "eats", "object": "banana"}}, [2, 2, 1]),
    ("baby eats", {"template": "SV", "bindings": {"subject": "baby", "predicate": "eats"}}, [2, 2]),
    ("horse runs", {"template": "SV", "bindings": {"subject": "horse", "predicate": "runs"}}, [2, 1]),
    ("boy sleeps", {"template": "SV", "bindings": {"subject": "boy", "predicate": "sleeps"}}, [2, 1]),
    ("horse sews tablecloth", {"template": "SVO", "bindings": {"subject": "horse", "predicate": "sews", "object": "tablecloth"}}, [2, 1, 1]),
    ("boy reads", {"template": "SV", "bindings": {"subject": "boy", "predicate": "reads"}}, [2, 2]),
    ("baby reads ball", {"template": "SVO", "bindings": {"subject": "baby", "predicate": "reads", "object": "ball"}}, [2, 2, 1]),
    ("horse eats tablecloth", {"template": "SVO", "bindings": {"subject": "horse", "predicate": "eats", "object": "tablecloth"}}, [2, 2, 1]),
    ("boy", {"error": "Incomplete"}, [2]),
    ("boy kicks", {"error": "Incomplete"}, [2, 1]),
    ("kicks ball", {"error": "NoCandidates"}, []),
    ("boy ball", {"error": "NoCandidates"}, [2]),
    ("boy runs ball", {"error": "NoCandidates"}, [2, 1]),
]


def sentences():
    neurons, edges = [], []
    for w in WORDS:
        concept(w, neurons, edges)
    for scene in SCENES:
        neurons.append(sigmoid(scene, 2.5, 6.0, ["concept"]))
    wta(["pleasant", "unpleasant", "absurd"], "decision", neurons, edges)
    for scene, inputs in SCENES.items():
        for w, weight in inputs.items():
            edges.append({"src": w, "dst": scene, "weight": weight, "label": "evokes"})
        edges.append({"src": scene, "dst": JUDGE[scene], "weight": 3.5, "label": "judge"})
    # Free neurons for story allocation.
    for i in range(8):
        neurons.append({"kind": "deterministic-threshold", "threshold": 4.0, "name": f"spare{i}"})
    return {
        "neurons": neurons,
        "edges": edges,
        "concepts": {w: [w] for w in WORDS},
        "words": WORDS,
        "templates": [
            {"id": "SVO", "roles": {"subject": ["noun"], "predicate": ["transitive-verb"], "object": ["noun"]},
             "language_order": ["subject", "predicate", "object"]},
            {"id": "SV", "roles": {"subject": ["noun"], "predicate": ["intransitive-verb"]},
             "language_order": ["subject", "predicate"]},
        ],
        "corpus": [{"sentence": s, "expect": e, "sizes": z} for s, e, z in CORPUS],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in (("greek-virus.json", greek_virus()), ("sentences.json", sentences())):
        (OUT / name).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        print("wrote", OUT / name)


if __name__ == "__main__":
    main()
