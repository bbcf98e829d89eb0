import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import valid_grid
from sksiks.engine import FiringState
from sksiks.errors import (AlreadyStarted, AtEnd, ConfigError, GoalOutOfRange, InvalidParams,
                           UnknownLetter)
from sksiks.sequence import (GREEK, INEQUALITIES, PARAM_ORDER, CountParams, PulseSchedule,
                             build_sequence_network, validate_params, violation_mask)

REFERENCE = CountParams.reference()

# Nearest tuples (L1 distance, half-integer steps) that break one constraint only.
SINGLE_MUTATIONS = {
    "I1": dict(l=2.5, inh=-0.5),
    "I2": dict(s=3.0),
    "I3": dict(exc=0.5),
    "I4": dict(exc=3.0),
    "I5": dict(l=5.0),
    "I6": dict(h=3.5),
    "I7": dict(s=1.0),
}


def mutate(**kw):
    d = dict(zip(PARAM_ORDER, REFERENCE.as_tuple()))
    d.update(kw)
    return CountParams(**d)


def direct_check(t):
    h, cur, l, s, sr, exc, inh = t
    return [name for name, ok in zip(INEQUALITIES, [
        h <= cur + l, h > s + cur, h <= exc + s + cur, h > exc + cur,
        h > cur + l + inh, h <= cur + l + inh + sr, sr < s]) if not ok]


class TestParams:
    def test_reference_tuple_valid(self):
        assert validate_params(REFERENCE) == []
        assert REFERENCE.magnitude_fraction == 0.5

    def test_zero_self_loop(self):
        assert "I1" in validate_params(mutate(l=0.0))

    @pytest.mark.parametrize("target", sorted(SINGLE_MUTATIONS))
    def test_single_mutation(self, target):
        assert validate_params(mutate(**SINGLE_MUTATIONS[target])) == [target]

    @given(st.tuples(*[st.integers(-5, 5)] * 7))
    def test_agrees_with_direct_evaluation(self, t):
        assert validate_params(CountParams(*t)) == direct_check(t)

    def test_vectorised_mask_shape(self):
        m = violation_mask(np.zeros((3, 4, 7)))
        assert m.shape == (3, 4, 7)

    def test_grid_oracle_agrees_with_direct(self):
        for t in random.Random(0).sample(valid_grid(), 50):
            assert direct_check(t) == []


class TestSchedule:
    def test_inhibition_must_follow(self):
        with pytest.raises(ConfigError):
            PulseSchedule(excite_at=1, excite_duration=2, inhibit_at=2)

    def test_spaced_variant(self):
        s = PulseSchedule.spaced()
        assert (s.excite_at, s.inhibit_at, s.inhibit_duration, s.length) == (1, 3, 2, 5)


class TestBuild:
    def test_demo_shape(self):
        seq = build_sequence_network(24, REFERENCE)
        assert len(seq.numbers) == len(seq.letters) == 24
        assert len(seq.chain) == 48
        assert seq.letter_names == list(GREEK)

    def test_wiring(self):
        seq = build_sequence_network(4, REFERENCE)
        net = seq.net
        for ids in (seq.numbers, seq.letters):
            for a, b in zip(ids, ids[1:]):
                assert [net.edges[e].weight for e in net.edges_between(a, b)] == [REFERENCE.s]
            for a in ids:
                assert [net.edges[e].weight for e in net.edges_between(a, a)] == [REFERENCE.l]
        for n in seq.numbers:
            assert net.edges_between(seq.role_ids["current-number"], n)

    def test_single_element(self):
        seq = build_sequence_network(1, REFERENCE)
        assert all(e.label != "successor" for e in seq.net.edges)

    def test_invalid_params(self):
        with pytest.raises(InvalidParams) as exc:
            build_sequence_network(3, mutate(l=0.0))
        assert "I1" in exc.value.violations

    def test_residual_window_follows_schedule(self):
        seq = build_sequence_network(3, REFERENCE, schedule=PulseSchedule.spaced())
        assert seq.net.residual.window == 2 and seq.net.residual.magnitude_fraction == 0.5


class TestStartAndGoal:
    def test_start(self):
        seq = build_sequence_network(24, REFERENCE)
        seq.start_count()
        start = seq.sim.events
        pulse = next(r for r, ev in start.items() if "start" in ev)
        seq.sim.advance(max(0, pulse + 2 - seq.sim.round))
        for r in range(pulse, pulse + 3):
            assert seq.firing_numbers(r) == [1] and seq.firing_letters(r) == [1]

    def test_start_twice(self):
        seq = build_sequence_network(5, REFERENCE)
        seq.start_count()
        with pytest.raises(AlreadyStarted):
            seq.start_count()

    def test_exc_alone_does_not_start(self):
        seq = build_sequence_network(5, REFERENCE)
        seq.start_count(pulse_weight=REFERENCE.exc)
        seq.hold(5)
        assert seq.firing_numbers() == [] and seq.firing_letters() == []

    def test_goal_on_odd_slot(self):
        seq = build_sequence_network(24, REFERENCE)
        seq.set_goal(4)
        seq.sim.advance(6)
        goal, q4 = seq.role_goal.id, seq.goal_numbers[3]
        assert [r for r in range(7) if seq.sim.firing(r)[goal]] == [1, 3, 5]
        assert [r for r in range(7) if seq.sim.firing(r)[q4]] == [1, 3, 5]

    @pytest.mark.parametrize("g", [0, 25])
    def test_goal_bounds(self, g):
        with pytest.raises(GoalOutOfRange):
            build_sequence_network(24, REFERENCE).set_goal(g)

    def test_goal_one_detected_within_two_cycles(self):
        seq = build_sequence_network(24, REFERENCE)
        seq.set_goal(1)
        seq.start_count()
        seq.hold(2)
        assert seq.wm.detect_equal(seq.role_cn, seq.role_goal)

    def test_goal_needs_two_phases(self):
        with pytest.raises(ConfigError):
            build_sequence_network(4, REFERENCE, period=1).set_goal(2)


class TestIncrement:
    def test_reference_walkthrough(self):
        seq = build_sequence_network(24, REFERENCE)
        seq.seed_position(1)
        t = seq.sim.round
        seq.increment()
        assert seq.firing_numbers(t + 1) == [1, 2]      # after excitation
        assert seq.firing_numbers(t + 2) == [2]         # after inhibition
        assert seq.firing_numbers(t + 3) == [2]         # residual carries it through
        assert seq.firing_letters(t + 3) == [2]

    def test_no_pulse_persists(self):
        seq = build_sequence_network(24, REFERENCE)
        seq.seed_position(7)
        seq.sim.advance(10)
        assert all(seq.firing_numbers(r) == [7] for r in range(11))

    def test_excite_alone_starts_nothing(self):
        seq = build_sequence_network(6, REFERENCE)
        seq.sim.pulse(frozenset(seq.chain), REFERENCE.exc, 1)
        seq.sim.advance(3)
        assert not seq.sim.fired_between(seq.chain, 0, 3)

    def test_at_end(self):
        seq = build_sequence_network(3, REFERENCE)
        seq.seed_position(3)
        with pytest.raises(AtEnd):
            seq.increment()

    @pytest.mark.parametrize("schedule", [PulseSchedule(), PulseSchedule.spaced()])
    def test_every_position(self, schedule):
        seq = build_sequence_network(24, REFERENCE, schedule=schedule)
        for i in range(1, 24):
            seq.seed_position(i)
            assert seq.increment() == i + 1
            assert seq.firing_numbers() == [i + 1] and seq.firing_letters() == [i + 1]

    def test_lockstep_over_many(self):
        seq = build_sequence_network(12, REFERENCE)
        seq.seed_position(2)
        for n in range(1, 9):
            seq.increment()
            assert seq.firing_numbers() == seq.firing_letters() == [2 + n]

    def test_offset_letter_chain(self):
        seq = build_sequence_network(12, REFERENCE)
        seq.seed_position(1, letter=5)
        seq.increment()
        assert seq.firing_numbers() == [2] and seq.firing_letters() == [6]

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(valid_grid()), st.integers(1, 5))
    def test_generic_tuple_period_one(self, t, i):
        seq = build_sequence_network(6, CountParams(*map(float, t)), period=1)
        seq.seed_position(i)
        seq.increment()
        assert seq.firing_numbers() == [i + 1] and seq.firing_letters() == [i + 1]


class TestQueries:
    def test_g1_no_increment(self, demo_seq):
        r = demo_seq.run_query1(1, trials=200)
        assert r.letter == "alpha" and r.increments == 0

    def test_query2_composes(self, demo_seq):
        r = demo_seq.run_query2("alpha", 3, trials=2000, seed=4)
        assert (r.letter_index, r.letter) == (4, "delta")
        assert r.decision.mode_label == "terrible"

    def test_query2_offset(self, demo_seq):
        r = demo_seq.run_query2("gamma", 5, trials=100)
        assert r.letter_index == 8 and r.increments == 5

    @pytest.mark.parametrize("letter,g", [("omega", 1), ("gamma", 0), ("alpha", 24)])
    def test_query2_bounds(self, demo_seq, letter, g):
        with pytest.raises(GoalOutOfRange):
            demo_seq.run_query2(letter, g)

    def test_unknown_letter(self, demo_seq):
        with pytest.raises(UnknownLetter):
            demo_seq.run_query2("aleph", 1)

    def test_letter_index_independent_of_seed(self, demo_seq):
        idx = {demo_seq.run_query1(6, trials=50, seed=s, emotion=False).letter_index for s in range(4)}
        assert idx == {6}

    def test_single_token_during_query(self, demo_seq):
        r = demo_seq.run_query1(7, trials=50, emotion=False)
        m = r.trace.matrix()
        for row in m[:, demo_seq.numbers]:
            assert row.sum() <= 2
        slots = m[::2]
        assert (slots[:, demo_seq.numbers].sum(axis=1) <= 1).all()
        assert (slots[:, demo_seq.letters].sum(axis=1) <= 1).all()

    def test_handoff_selects_only_the_current_letter(self, demo_seq):
        r = demo_seq.run_query1(9, trials=50, emotion=False)
        last = r.trace.states[-1].fired
        concepts = set(demo_seq.iks_links.values())
        assert last & concepts == {demo_seq.iks_links[9]}

    def test_query_requires_concepts(self):
        seq = build_sequence_network(4, REFERENCE)
        with pytest.raises(ConfigError):
            seq.run_query1(2)
