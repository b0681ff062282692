"""Exception hierarchy shared by all model engines.

Every domain failure raises a subclass of :class:`EvidentiaError`. The class
name doubles as the machine-readable error kind used by the CLI and the HTTP
service, so renaming a class here is a wire-format change.
"""

from __future__ import annotations


class EvidentiaError(Exception):
    """Base class for all domain errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


# --- graph substrate ---------------------------------------------------------

class CycleError(EvidentiaError):
    """An operation would introduce (or a graph contains) a directed cycle."""


class UnknownNode(EvidentiaError):
    """A referenced node is not a member of the graph."""


class DuplicateEdge(EvidentiaError):
    """The edge being added is already present."""


class InvalidQuery(EvidentiaError):
    """A conditional-independence query has overlapping, empty, or foreign sets."""


# --- discrete Bayesian networks ----------------------------------------------

class IncompleteAssignment(EvidentiaError):
    """A full-joint lookup is missing one or more nodes."""


class UnknownState(EvidentiaError):
    """A state label does not exist in the node's state space."""


class TooLarge(EvidentiaError):
    """The joint state space exceeds the enumeration cap."""


class ImpossibleEvidence(EvidentiaError):
    """The supplied evidence has probability (numerically) zero."""


class ConflictingEvidence(EvidentiaError):
    """Evidence was already registered for the node."""


class InvalidWeights(EvidentiaError):
    """A soft-evidence weight vector is malformed."""


# --- object-oriented networks --------------------------------------------------

class DuplicateClass(EvidentiaError):
    """A network class with this name is already registered."""


class DanglingInterface(EvidentiaError):
    """An interface node does not line up with the class internals."""


class ClassCycle(EvidentiaError):
    """A class would (transitively) contain an instance of itself."""


class UnknownClass(EvidentiaError):
    """No registered network class has this name."""


class DuplicateInstance(EvidentiaError):
    """An instance with this name already exists in the network."""


class StateSpaceMismatch(EvidentiaError):
    """A bound host node's state space differs from the input node's."""


class UnboundInput(EvidentiaError):
    """An input node has no binding at flatten time."""


# --- event trees and chain event graphs ----------------------------------------

class Disconnected(EvidentiaError):
    """The edge set does not form a single rooted tree."""


class DuplicateSiblingLabel(EvidentiaError):
    """Two edges out of one vertex carry the same label."""


class FloretMismatch(EvidentiaError):
    """Vertices placed in one stage have florets that do not correspond."""


class LeafStaging(EvidentiaError):
    """A leaf vertex cannot be assigned to a stage."""


class UnassignedStageProbability(EvidentiaError):
    """A stage has no probability vector yet."""


class NoSurvivingPath(EvidentiaError):
    """Conditioning removed every root-to-sink path."""


class NotACut(EvidentiaError):
    """A proposed position set is not crossed exactly once by every path."""


class InvalidOrder(EvidentiaError):
    """A supplied variable order is not a total order consistent with the DAG."""


# --- Wigmore charts -------------------------------------------------------------

class MissingProbandum(EvidentiaError):
    """The chart has no valid designated probandum."""


# --- corpus / persistence --------------------------------------------------------

class ParseError(EvidentiaError):
    """A file failed to parse against its schema."""


class CrossrefError(EvidentiaError):
    """A cross-reference points at a nonexistent model element."""


class SubmodelInvalid(EvidentiaError):
    """A bundled model failed its own validator."""


class UnknownItem(EvidentiaError):
    """No evidence item carries the requested number."""


class IoError(EvidentiaError):
    """Reading or writing a bundle file failed."""
