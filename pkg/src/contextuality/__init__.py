"""Contextuality analysis of content-context systems of binary variables."""

from .system import (Bunch, Cell, ConnectionView, ParseError, System,
                     ValidationError, bunch, connection,
                     is_consistently_connected, parse_system, serialize_system,
                     validate, EPS_MASS, PLUS, MINUS)
from .coupling import (Coupling, CouplingAudit, PairMaximality,
                       maximal_pair_probability, multimaximal_coupling,
                       restrict_coupling, verify_coupling)
from .lp import (CapacityError, ContextualityReport, JointOutcomeSpace,
                 MarginalConstraint, NumericalError, QuasiDistribution,
                 build_constraints, contextuality_degree, feasibility_check,
                 solve_min_tv, system_couplings, EPS_DEGREE, EPS_LP)
from .augmentation import (FillPolicy, InvarianceCheck, OutcomeEmbedding,
                           augment, bijection_map, check_invariance)
from .catalog import (CyclicSpec, OracleResult, generate_cyclic,
                      generate_staircase, oracle_degree, pr_box,
                      random_system, tsirelson_box)

__version__ = "0.1.0"
