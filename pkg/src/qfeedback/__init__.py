"""Two-qubit open-system dynamics with Markovian homodyne feedback.

Submodules: ``qops`` (Pauli algebra and bases), ``states`` (density matrices),
``generator`` (Kossakowski matrices and Liouvillians), ``feedback``,
``entangle``, ``evolve``, ``stochastic``, ``stationary``, ``wclcheck`` and
``cli``.
"""

from .entangle import (
    concurrence,
    negativity,
    short_time_entangles,
    short_time_input,
    uv_vectors,
)
from .errors import QFeedbackError
from .evolve import Trajectory, analytic_rho2, integrate, propagate
from .feedback import (
    FeedbackConfig,
    SymmetricScenario,
    feedback_liouvillian,
    symmetric_scenario,
)
from .generator import KossakowskiMatrix, LindbladOp, Liouvillian, liouvillian
from .states import XState, catalog, validate

__version__ = "0.1.0"

__all__ = [
    "FeedbackConfig",
    "KossakowskiMatrix",
    "LindbladOp",
    "Liouvillian",
    "QFeedbackError",
    "SymmetricScenario",
    "Trajectory",
    "XState",
    "analytic_rho2",
    "catalog",
    "concurrence",
    "feedback_liouvillian",
    "integrate",
    "liouvillian",
    "negativity",
    "propagate",
    "short_time_entangles",
    "short_time_input",
    "symmetric_scenario",
    "uv_vectors",
    "validate",
]
