"""Fibonacci-anyon braid compilation by estimation-of-distribution search."""

from .braid import (
    BraidParseError,
    BraidWord,
    GeneratorSet,
    InvalidSymbolError,
    braid_error,
    braid_product,
    effective_length,
    fibonacci_generators,
    format_braid_text,
    free_reduce,
    parse_braid_text,
)
from .fitness import (
    BraidEvaluation,
    FitnessSpec,
    Recoding,
    Variant,
    eval_effective,
    eval_plain,
    eval_prefix_best,
    evaluate,
    recode,
    sk_length_estimate,
)
from .boltzmann import (
    BoltzmannTable,
    MarginalSet,
    enumerate_boltzmann,
    marginals,
    pairwise_fitness_scatter,
)
from .models import (
    MarkovChainModel,
    PartialMode,
    TreeModel,
    UnivariateModel,
    learn_markov,
    learn_tree,
    learn_univariate,
    sample_full,
    sample_partial,
)
from .eda import (
    EdaConfig,
    FunctionMode,
    ModelType,
    RunRecord,
    SamplingMode,
    greedy_improve,
    greedy_search,
    random_search,
    run_eda,
    truncation_select,
)

__version__ = "0.1.0"
