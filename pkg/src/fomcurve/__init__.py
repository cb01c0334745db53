"""Topic decomposition of central-bank statements and yield-curve factor
estimation, with event-study regressions linking the two."""

from . import (  # noqa: F401
    coherence,
    econometrics,
    lda,
    nmf,
    optimize,
    pipeline,
    statespace,
    termstructure,
    textprep,
)

__version__ = "0.1.0"
