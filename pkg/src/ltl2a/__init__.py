"""LTL task engine for multi-task RL.

Parsing, progression, and lasso-trace semantics for linear temporal logic;
procedural task samplers with exact counting; small reference environments;
the environment-times-formula product MDP with exact and tabular solvers;
and graph/token exports of formulas for neural encoders.
"""

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    FalseFormula,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    TrueFormula,
    Until,
    Vocabulary,
    prefix_tokens,
    props_of,
    render,
    size,
)
from .parsing import ParseError, parse
from .lasso import LassoTrace, eval_lasso
from .progression import (
    ClosureCapExceeded,
    closure,
    implies_syntactic,
    progress,
    simplify,
)
from .streams import DEFAULT_SEED, stream

__version__ = "0.1.0"
