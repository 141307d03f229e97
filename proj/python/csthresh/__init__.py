from ._csthresh import *  # noqa: F401,F403
