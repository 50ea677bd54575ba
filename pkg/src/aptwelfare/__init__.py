"""Rationalizability tests, primitives, and welfare bounds for binary
discrete-choice data on a price/income grid.

The pipeline: load a dataset (:func:`load_csv`, :func:`as_choice_dataset`),
test it (:func:`check_apt`, :func:`check_qrum`), construct primitives
(:func:`apt_rationalize`, :func:`qrum_construct`), and bound the
equivalent-variation distribution of a price increase
(:func:`ev_distribution_apt`, :func:`ev_distribution_rum`,
:func:`fosd_check`). :mod:`aptwelfare.simulate` provides an independent
consumer-level oracle for all of it.
"""

from .axioms import (
    AXIOM_DESCRIPTIONS,
    AxiomReport,
    AxiomSuiteResult,
    Witness,
    check_apt,
    check_axiom_a,
    check_axiom_b,
    check_axiom_c,
    check_axiom_d,
    check_axiom_e,
    check_qrum,
    income_invariant_curve,
)
from .config import (
    COORD_ATOL,
    DEFAULT_BISECTION_TOL,
    DEFAULT_CONTINUITY_MODULUS,
    DEFAULT_EQ_TOL,
    DEFAULT_JUMP_THRESHOLD,
    DEFAULT_MAX_BISECTION_ITER,
    DEFAULT_QUANTILE_MESH,
    SCHEMA,
    RunConfig,
)
from .dataset import (
    CSV_HEADER,
    ChoiceDataset,
    JumpReport,
    PriceGrid,
    as_choice_dataset,
    dataset_from_function,
    load_csv,
    save_csv,
    uniform_grid,
)
from .demo import demo_dataset, run_demo
from .errors import (
    AptWelfareError,
    ConvergenceError,
    CoverageError,
    CsvFormatError,
    DomainError,
    GridLookupError,
    IncomeVarianceError,
    NotApplicableError,
    NotRationalizableError,
    NoZeroPriceError,
    ProvenanceError,
    VerificationError,
    WellDefinednessError,
)
from .estimators import APTRationalizer, QRUMRationalizer
from .piecewise import AttentionCDF, MonotoneCurve
from .rationalize import (
    QRUMPrimitives,
    UtilityPair,
    apt_rationalize,
    construct_g,
    construct_u0,
    construct_u1,
    qrum_construct,
    qrum_quantile,
)
from .simulate import (
    ConsumerEV,
    Population,
    consumer_ev,
    forward_choice_prob,
    monte_carlo_ev,
    population_from_spec,
    reservation_price,
)
from .welfare import (
    EVDistribution,
    FosdResult,
    IntervalMass,
    PriceChange,
    ReservationBound,
    ev_distribution_apt,
    ev_distribution_rum,
    fosd_check,
    p10_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "AptWelfareError",
    "ConvergenceError",
    "CoverageError",
    "CsvFormatError",
    "DomainError",
    "GridLookupError",
    "IncomeVarianceError",
    "NotApplicableError",
    "NotRationalizableError",
    "NoZeroPriceError",
    "ProvenanceError",
    "VerificationError",
    "WellDefinednessError",
    # config
    "COORD_ATOL",
    "DEFAULT_BISECTION_TOL",
    "DEFAULT_CONTINUITY_MODULUS",
    "DEFAULT_EQ_TOL",
    "DEFAULT_JUMP_THRESHOLD",
    "DEFAULT_MAX_BISECTION_ITER",
    "DEFAULT_QUANTILE_MESH",
    "SCHEMA",
    "RunConfig",
    # data
    "CSV_HEADER",
    "ChoiceDataset",
    "JumpReport",
    "PriceGrid",
    "as_choice_dataset",
    "dataset_from_function",
    "load_csv",
    "save_csv",
    "uniform_grid",
    # curves
    "AttentionCDF",
    "MonotoneCurve",
    # axioms
    "AXIOM_DESCRIPTIONS",
    "AxiomReport",
    "AxiomSuiteResult",
    "Witness",
    "check_apt",
    "check_axiom_a",
    "check_axiom_b",
    "check_axiom_c",
    "check_axiom_d",
    "check_axiom_e",
    "check_qrum",
    "income_invariant_curve",
    # rationalization
    "QRUMPrimitives",
    "UtilityPair",
    "apt_rationalize",
    "construct_g",
    "construct_u0",
    "construct_u1",
    "qrum_construct",
    "qrum_quantile",
    # welfare
    "EVDistribution",
    "FosdResult",
    "IntervalMass",
    "PriceChange",
    "ReservationBound",
    "ev_distribution_apt",
    "ev_distribution_rum",
    "fosd_check",
    "p10_bounds",
    # simulation
    "ConsumerEV",
    "Population",
    "consumer_ev",
    "forward_choice_prob",
    "monte_carlo_ev",
    "population_from_spec",
    "reservation_price",
    # estimators
    "APTRationalizer",
    "QRUMRationalizer",
    # demo
    "demo_dataset",
    "run_demo",
]
