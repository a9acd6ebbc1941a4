"""Size limits and job-count configuration.

Limits come from (in order of precedence): explicit function arguments,
environment variables, built-in defaults.  Environment variables:
LQFLAB_MAX_NODES, LQFLAB_MAX_SUBSET_NODES, LQFLAB_JOBS.
"""

import os

# Maximal-schedule / maximal-clique enumeration refuses above this node count.
DEFAULT_MAX_NODES = 24
# Full subset sweeps (2^n - 1 subsets) refuse above this node count.
DEFAULT_MAX_SUBSET_NODES = 16


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def max_nodes(override=None):
    if override is not None:
        return override
    return _env_int("LQFLAB_MAX_NODES", DEFAULT_MAX_NODES)


def max_subset_nodes(override=None):
    if override is not None:
        return override
    return _env_int("LQFLAB_MAX_SUBSET_NODES", DEFAULT_MAX_SUBSET_NODES)


def jobs(override=None):
    if override is not None:
        return override
    return _env_int("LQFLAB_JOBS", os.cpu_count() or 1)
