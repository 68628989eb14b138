"""Significance tests for partially labeled high-dimensional data.

The headline test, :func:`sigpal`, asks whether two classes are really
present when only a fraction of the class labels is observed.  It compares
a semi-supervised 2-cluster fit of the data against fits of Gaussian null
draws that re-place the observed label counts at random.  The unlabeled
baseline :func:`sigclust` and the fully labeled permutation baseline
:func:`diproperm` ship alongside, together with the closed-form population
theory and a reproducible simulation harness.
"""

from .assigners import (
    AssignerSpec,
    Direction,
    assign_by_direction,
    cop_kmeans,
    derive_constraints,
    l1_lda_fit,
    run_assigner,
    s3lda_fit,
    two_means,
)
from .cluster_index import ClusterAssignment, brute_force_min_ci, cluster_index
from .dataset import (
    NEG,
    POS,
    UNLABELED,
    PartiallyLabeledDataset,
    RotationResult,
    center,
    load_csv,
    rotate_to_diagonal,
    write_csv,
)
from .engines import TestResult, diproperm, empirical_pvalue, sigclust, sigpal
from .errors import (
    CsvFormatError,
    DatasetError,
    DegenerateDataError,
    EngineError,
    InfeasibleConstraintsError,
    SigPalError,
    ZeroDirectionError,
)
from .harness import (
    ExperimentReport,
    GeneratorSpec,
    MethodConfig,
    gen_mixture,
    gen_one_cluster,
    run_experiment,
)
from .presets import available_presets, load_preset, load_preset_file
from .spectrum import (
    EigenSpectrum,
    background_noise,
    hard_threshold,
    known_spectrum,
    sample_eigenvalues,
    simulate_null,
    soft_threshold,
)
from .theory import (
    AsymptoticStudyConfig,
    AsymptoticStudyResult,
    EigenBias,
    asymptotic_pvalue_study,
    eigen_bias,
    monte_carlo_tci,
    tci_difference,
    tci_sigclust,
    tci_sigpal,
)

__version__ = "0.1.0"

__all__ = [
    "AssignerSpec",
    "AsymptoticStudyConfig",
    "AsymptoticStudyResult",
    "ClusterAssignment",
    "CsvFormatError",
    "DatasetError",
    "DegenerateDataError",
    "Direction",
    "EigenBias",
    "EigenSpectrum",
    "EngineError",
    "ExperimentReport",
    "GeneratorSpec",
    "InfeasibleConstraintsError",
    "MethodConfig",
    "NEG",
    "POS",
    "PartiallyLabeledDataset",
    "RotationResult",
    "SigPalError",
    "TestResult",
    "UNLABELED",
    "ZeroDirectionError",
    "assign_by_direction",
    "asymptotic_pvalue_study",
    "available_presets",
    "background_noise",
    "brute_force_min_ci",
    "center",
    "cluster_index",
    "cop_kmeans",
    "derive_constraints",
    "diproperm",
    "eigen_bias",
    "empirical_pvalue",
    "gen_mixture",
    "gen_one_cluster",
    "hard_threshold",
    "known_spectrum",
    "l1_lda_fit",
    "load_csv",
    "load_preset",
    "load_preset_file",
    "monte_carlo_tci",
    "rotate_to_diagonal",
    "run_assigner",
    "run_experiment",
    "s3lda_fit",
    "sample_eigenvalues",
    "sigclust",
    "sigpal",
    "simulate_null",
    "soft_threshold",
    "tci_difference",
    "tci_sigclust",
    "tci_sigpal",
    "two_means",
    "write_csv",
]
