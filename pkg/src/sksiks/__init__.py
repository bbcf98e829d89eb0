"""Spiking-network simulator with a symbolic and an intuitive knowledge structure."""

from .engine import (CLAMP_WEIGHT, Edge, ExternalSignal, FiringState, Network, NeuronSpec,
                     ResidualConfig, Simulator, Trace, add_edge, add_neuron, potential, run,
                     run_batch, step)
from .errors import *  # noqa: F401,F403
from .iks import (CascadeResult, ConceptGraph, LearningConfig, ReplicationSpec, cascade,
                  direct_recognize, learn_association, learn_concept, oja_step, replicate)
from .lexicon import Lexicon, LexiconEntry
from .parser import (CandidateSet, Parser, ReducedParse, StoryOutline, Template, Word,
                     story_cascade, to_story_outline)
from .specfile import Scenario, load
from .sequence import (CountParams, PulseSchedule, QueryResult, SequenceNetwork,
                       build_sequence_network, validate_params)
from .working_memory import AlternationConfig, Binding, RoleNeuron, WorkingMemory

__version__ = "0.1.0"
