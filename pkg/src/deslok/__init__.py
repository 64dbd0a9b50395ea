"""Supervisor synthesis, reduction, localization and event-reduction analysis
for discrete-event systems."""

from .automaton import (
    Alphabet,
    AlphabetMismatchError,
    Automaton,
    Event,
    FlagConflictError,
    InternalInvariantError,
    PreconditionError,
    des_isomorphism,
    language_equal,
    language_equal_witness,
    language_subset,
    language_subset_witness,
    prefix_closure,
    project,
    selfloop_lift,
    sync_all,
    sync_product,
    sync_product_map,
    trim,
)
from .eventred import (
    AgentWitness,
    CommunicationReport,
    DecompositionResult,
    EventAnalysis,
    PipelineResult,
    RandomParams,
    Theorem1Report,
    Verdict,
    analyze_events,
    check_theorem1,
    communication_report,
    decomposability,
    is_decomposable,
    localizability_verdict,
    random_instance,
    run_pipeline,
    vacuous_events,
)
from .localization import Localization, is_local_controller, localize, localize_agent
from .models import CaseStudy, ExpectedRecord, guideway, mutex_spec, shared_resource, transfer_line
from .reduction import (
    Congruence,
    ControlData,
    build_congruence,
    compute_control_data,
    consistent,
    induce_generator,
    is_normal_supervisor,
    supreduce,
)
from .synthesis import (
    SynthesisResult,
    control_equivalent,
    is_controllable,
    language_normal,
    marked_language_normal,
    observability_check,
    supcon,
)

__version__ = "0.1.0"
