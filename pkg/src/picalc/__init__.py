"""A pi-calculus workbench: nominal terms, late and early labelled semantics,
weak transitions, and decision procedures for the bisimulation equivalences."""
from .equivalence import (
    CheckConfig,
    EquivKind,
    Verdict,
    Witness,
    check,
    hennessy_classify,
    relate,
    struct_cong,
    subst_closed,
)
from .nominal import Swap, fresh_name, is_fresh, support
from .parser import ParseError, parse_agent, parse_defs, print_agent, print_residual
from .semantics import early_transitions, late_transitions
from .structural import struct_normal_form
from .syntax import (
    NIL,
    Agent,
    Bang,
    Input,
    Match,
    Mismatch,
    Nil,
    Output,
    Par,
    Res,
    Sum,
    Tau,
    alpha_eq,
    canonicalize,
    free_names,
    substitute,
)
from .weak import ExploreLimits, LimitExceeded, tau_closure, weak_early_transitions, weak_late_transitions

__version__ = "0.1.0"
