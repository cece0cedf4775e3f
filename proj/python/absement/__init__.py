"""Acoustic absement: DTW distance between MFCC sequences and a template-based
isolated-word recognizer built on it."""

from ._absement import *  # noqa: F401,F403
from ._absement import __doc__  # noqa: F401

__version__ = "0.1.0"
