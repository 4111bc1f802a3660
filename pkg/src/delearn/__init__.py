"""Dynamic epistemic logic kernel and learners for partially observable domains."""

from .domain import (
    BudgetExceeded,
    Domain,
    Observation,
    behavioural_equivalence_domain,
    comp,
    compatibility_domain,
    enumerate_bisimilar,
    eval_on_state,
    induced_domain,
    induced_epistemic_model,
    isomorphic,
    obs_bisimilar,
    sync_compose,
    trace_equivalent,
    validate,
)
from .epistemic import (
    EpistemicModel,
    Event,
    EventModel,
    Post,
    canonicalize,
    eval_formula,
    eval_global,
    models_bisimilar,
    product_update,
)
from .explicit import learn_explicit, observation_formula
from .formula import parse_formula, render_formula
from .implicit import History, domain_of_histories, histories, learn_domains, learn_implicit
from .planner import plan
from .traces import (
    ExecutionTrace,
    ObservationTrace,
    ObservedTransition,
    execute,
    observe,
    sound_complete_traces,
    sound_complete_transitions,
)

__version__ = "0.1.0"
