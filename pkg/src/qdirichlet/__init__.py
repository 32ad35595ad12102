"""q-Bernoulli numbers, multiple q-zeta values and multiple Dirichlet q-L-functions.

Values are computed at high precision with mpmath; exact Fraction and
cyclotomic arithmetic is used wherever the parameters allow it.
"""

__version__ = "0.1.0"

from .characters import DirichletCharacter, characters_mod, char_eval, conductor_of, induce, parse_character
from .classical import bernoulli, bernoulli_poly, generalized_bernoulli, multi_gen_bernoulli
from .numerics import (
    DEFAULT_CTX,
    DomainError,
    PoleProximityError,
    PrecisionCtx,
    QDirichletError,
    QParam,
    TruncationError,
    cpow,
    lfactor,
    qbracket,
    tail_cutoff,
)
from .qbernoulli import (
    TowerElem,
    beta_q,
    beta_q_poly,
    beta_q_value,
    gen_beta_chi,
    multi_B,
    multi_gen_beta_chi,
)
from .results import EvalResult
from .zeta_l import H, L, multi_qzeta

__all__ = [
    "__version__",
    "DEFAULT_CTX",
    "DirichletCharacter",
    "DomainError",
    "EvalResult",
    "H",
    "L",
    "PoleProximityError",
    "PrecisionCtx",
    "QDirichletError",
    "QParam",
    "TowerElem",
    "TruncationError",
    "bernoulli",
    "bernoulli_poly",
    "beta_q",
    "beta_q_poly",
    "beta_q_value",
    "char_eval",
    "characters_mod",
    "conductor_of",
    "cpow",
    "gen_beta_chi",
    "generalized_bernoulli",
    "induce",
    "lfactor",
    "multi_B",
    "multi_gen_bernoulli",
    "multi_gen_beta_chi",
    "multi_qzeta",
    "parse_character",
    "qbracket",
    "tail_cutoff",
]
