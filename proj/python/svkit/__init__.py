"""Shapley-value toolkit: cooperative games, estimators, privacy masks, attacks."""

import json as _json

try:
    from . import _svkit
except ImportError:  # in-tree builds leave the extension next to the build dir
    import _svkit

__version__ = _svkit.__version__

exact_values = _svkit.exact_values
dp_mask = _svkit.dp_mask
qt_mask = _svkit.qt_mask
dr_mask = _svkit.dr_mask
spearman_correlation = _svkit.spearman_correlation
ranking_variance = _svkit.ranking_variance
auroc = _svkit.auroc


def run(config_path="", **options):
    """Run the full pipeline. Keyword arguments are the CLI/config keys
    (task, estimator, sampling, optimization_strategy, privacy_protection_measure,
    rows, features, players, seed, ...); a JSON config file may supply defaults.
    Returns the result record as a dict."""
    return _json.loads(_svkit.run_json(_json.dumps(options), config_path))


def estimate_table(by_mask, **options):
    """Run one estimator on an explicit utility table indexed by coalition bit
    mask. Options: estimator, sampling, seed, tau, mc_marginals, exhaustive."""
    return _json.loads(_svkit.estimate_table_json(list(by_mask), **options))


def fia_experiment(**options):
    """Feature-inference attack experiment; returns the report as a dict."""
    return _json.loads(_svkit.fia_experiment_json(**options))


def mia_experiment(**options):
    """Membership-inference attack experiment; returns the report as a dict."""
    return _json.loads(_svkit.mia_experiment_json(**options))


__all__ = [
    "__version__",
    "auroc",
    "dp_mask",
    "dr_mask",
    "estimate_table",
    "exact_values",
    "fia_experiment",
    "mia_experiment",
    "qt_mask",
    "ranking_variance",
    "run",
    "spearman_correlation",
]
