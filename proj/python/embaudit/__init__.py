"""Group-association audit for contrastive image-text embeddings."""

import json as _json

from ._core import (  # noqa: F401
    NumericError,
    ValidationError,
    __version__,
    average_templates,
    bias_all,
    bootstrap_category_ci,
    bootstrap_statement_ci,
    expand_prompts,
    l2_normalize,
    label_swap_null,
    load_embeddings,
    ratio_table,
    save_embeddings,
    similarity_matrices,
    top_k,
    validate,
)
from ._core import run_audit as _run_audit


def run_audit(*args, **kwargs):
    """Run an audit; returns the report as a dict (see report.json)."""
    return _json.loads(_run_audit(*args, **kwargs))
