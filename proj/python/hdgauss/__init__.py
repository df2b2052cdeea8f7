from ._hdgauss import *  # noqa: F401,F403
