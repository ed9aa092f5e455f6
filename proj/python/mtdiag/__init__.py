"""Machine-translation diagnostics: token activation rate, output noise,
rank correlations with leave-one-out sweeps, BLEU and chrF++.

The heavy lifting lives in the _mtdiag extension module; this package
re-exports its surface.
"""

try:
    from ._mtdiag import *  # noqa: F401,F403  (installed layout)
    from ._mtdiag import __version__  # noqa: F401
except ImportError:  # in-build layout: extension next to the package on sys.path
    from _mtdiag import *  # noqa: F401,F403
    from _mtdiag import __version__  # noqa: F401
