"""Python access to the clutter_em C++ core.

Configurations, mixture parameters and results cross the boundary as JSON,
using the same schemas as the command-line tool. The helpers here accept and
return plain dicts.
"""

import json

try:
    from . import _clutter_em as _core
except ImportError:
    import _clutter_em as _core

Error = _core.Error
ConfigError = _core.ConfigError
DataFormatError = _core.DataFormatError
StructuralError = _core.StructuralError
NumericalError = _core.NumericalError
ClassCollapseError = _core.ClassCollapseError

covar_ar1 = _core.covar_ar1
steering_vector = _core.steering_vector
covar_patches = _core.covar_patches
classification_error = _core.classification_error
rmsce = _core.rmsce


def _dumps(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def generate(scenario):
    """Draw a labeled range profile. Returns (Z, labels, true_params) with Z of shape (N, K)."""
    z, labels, params = _core.generate(_dumps(scenario))
    return z, labels, json.loads(params)


def log_likelihood(z, params):
    return _core.log_likelihood(z, _dumps(params))


def e_step(z, params):
    return _core.e_step(z, _dumps(params))


def fit(z, fit_config, init_seed=0):
    return json.loads(_core.fit(z, _dumps(fit_config), init_seed))


def monte_carlo(scenario, fit_config, trials, seed, matching="PowerOrder", threads=1):
    return json.loads(_core.monte_carlo(_dumps(scenario), _dumps(fit_config), trials, seed, matching, threads))


__all__ = [
    "Error", "ConfigError", "DataFormatError", "StructuralError", "NumericalError", "ClassCollapseError",
    "covar_ar1", "steering_vector", "covar_patches", "generate", "log_likelihood", "e_step", "fit",
    "classification_error", "rmsce", "monte_carlo",
]
