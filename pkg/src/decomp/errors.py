"""Exception hierarchy shared by all decomposition modules."""

from __future__ import annotations


class DecompError(Exception):
    """Base class for all domain errors raised by this package."""


class NotLaminar(DecompError):
    """A set or bipartition family contains an overlapping pair."""


class NotThin(DecompError):
    """A node set violates the thinness conditions."""


class NodeInX(DecompError):
    """A path query started from a node belonging to the avoided set."""


class Inconsistent(DecompError):
    """A bi-colouring does not identify any set of inner nodes."""


class NotWeaklyPartitive(DecompError):
    """A set system violates the weak-partitivity closure laws."""


class NotWeaklyBipartitive(DecompError):
    """A bipartition system violates the weak-bipartitivity closure laws."""


class NotCograph(DecompError):
    """The modular decomposition contains a prime node.

    The offending inner node id is stored in ``witness``.
    """

    def __init__(self, witness: int):
        super().__init__(f"witness node {witness}")
        self.witness = witness


class NotConnected(DecompError):
    """The operation requires a (weakly) connected graph."""


class RequiresUndirected(DecompError):
    """The operation is only defined for undirected graphs."""


class TooLarge(DecompError):
    """An enumeration guard was exceeded; raise the guard explicitly to proceed."""


class DegreeTooLarge(DecompError):
    """A tree node has too many neighbours for subset enumeration."""


class UnboundVariable(DecompError):
    """A formula was evaluated with a free variable missing from the assignment."""


class MissingSymbol(DecompError):
    """A formula refers to a relation or predicate absent from the structure."""


class UniverseTooLarge(DecompError):
    """Unguarded monadic quantification over a universe above the evaluation guard."""


class FormulaSyntaxError(DecompError):
    """Parse failure in the formula DSL; carries line/column info in the message."""


class ScopeError(DecompError):
    """A DSL formula uses a variable outside the scope of its binder."""
