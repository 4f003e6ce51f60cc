"""Explosion and stationarity analysis for stochastic chemical reaction networks."""

from .chains import Polynomial, birth_death_chain, birth_death_rates, integer_line_chain, pure_birth_chain
from .classify import (
    ClassificationReport,
    InconsistentVerdict,
    Verdict,
    bd_embedded_series,
    certify_complex_balanced_nonexplosive,
    certify_nonexplosive,
    classify_birth_death,
    classify_network,
    multiple_stationary_rule,
    pure_birth_explosion_test,
)
from .model import CtmcSpec, Reaction, ReactionNetwork, as_ctmc
from .ode import OdeConfig, OdeResult, StiffnessError, ode_integrate
from .parser import CrnSyntaxError, format_network, parse_network, read_network
from .report import AnalysisReport, analyze_network
from .series import SeriesVerdict, analyze_series
from .simulate import (
    Outcome,
    SimConfig,
    Trajectory,
    empirical_occupancy,
    monte_carlo_jump_rate,
    ssa_batch,
    ssa_run,
    tv_distance,
)
from .stationary import (
    balance_residual,
    birth_death_stationary,
    embedded_stationarity_residual,
    expected_jump_rate,
    product_form_poisson,
)
from .structure import (
    check_complex_balanced,
    deficiency,
    find_complex_balanced_equilibrium,
    is_weakly_reversible,
    structure_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
