"""Transcript-anchored B-roll editing engine.

Subpackages split along the pipeline: transcript parsing and word timing,
per-word featurization, the keyword classifier, editor-agreement analytics,
recommendation generation, the edit session/EDL model, search providers,
and the HTTP service. Heavy numeric loops live in :mod:`cutaway.accel`.
"""

__version__ = "0.1.0"
