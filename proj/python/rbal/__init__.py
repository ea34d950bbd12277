"""Risk-based active learning with multiclass relevance vector machines."""

from ._core import (  # noqa: F401
    ConfigError,
    ContractError,
    DecisionProcess,
    DegenerateTraining,
    GmmModel,
    MrvmModel,
    NumericalError,
    ParseError,
    assign_labels,
    decide,
    evpi,
    expected_utility,
    generate_stream,
    gmm_fit,
    macro_f1,
    meu,
    meu_perfect_info,
    percentile,
    run_campaign,
    run_experiment,
    should_query,
    train_mrvm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
