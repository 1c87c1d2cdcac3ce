"""Runtime verification of safety constraints via violation-prefix detectors.

Constraints are given as prefix-free languages of minimal bad prefixes;
detectors watch a token stream and fault exactly when such a prefix has
been read.  The package provides the word/stream vocabulary, detector
construction from explicit sets, automata, predicates, enumerations and a
small spec language, exact lasso monitoring, online monitoring, and
bisimulation checking.
"""

from .sequences import (
    Alphabet,
    AlphabetMismatchError,
    EpsilonViolation,
    FiniteWordSet,
    LassoStream,
    PrefixFreeViolation,
    Word,
    concat,
    decompose,
    derivative_set,
    is_prefix_free,
    require_prefix_free,
    slice_from,
    slice_range,
)
from .systems import (
    FAULT,
    INFINITE,
    SSystem,
    TSystem,
    TerminationTime,
    check_s_morphism,
    check_t_morphism,
    s_anamorphism,
    stream_system,
    t_anamorphism,
    t_iterate,
)
from .detector import (
    UNKNOWN,
    BudgetExhausted,
    DetectorHandle,
    FiniteDetector,
    FiniteDetectorHandle,
    RegularPrefixFreeSet,
    SetHandle,
    anamorphism_regular,
    canonical_form,
    check_detector_morphism,
    detector_from_explicit_set,
    detector_from_text,
    detector_to_text,
    extend,
    final_step,
    minimal_violation_words,
)
from .families import (
    DecisionProcedure,
    EilenbergMachine,
    EnumeratedPrefixFreeSet,
    Enumerator,
    check_universal_family,
    decidable_detector,
    machine_derivative,
    machine_from_text,
    machine_to_detector,
    machine_to_text,
    re_detector,
    universal_detector_for,
)
from .monitor import (
    OK,
    CertifiedSafe,
    FeedUnknown,
    FeedViolation,
    MonitorClosedError,
    MonitorVerdict,
    OnlineMonitor,
    Unknown,
    Violation,
    constr_member,
    join,
    join_map,
    monitor_lasso,
    monitor_online,
    transfer_to_universal,
)
from .bisim import (
    StatePairRelation,
    bisimilar,
    largest_detector_bisimulation,
    largest_s_bisimulation,
)
from .speclang import (
    ConstraintSpec,
    SpecError,
    parse,
    pattern_is_prefix_free,
    prefix_free_kernel,
    pretty,
)
from .speclang import compile as compile_spec

__version__ = "0.1.0"
