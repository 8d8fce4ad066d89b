"""rlift - exact lifts and braidings of quasitriangular Lie bialgebras."""

try:
    from rlift._version import __version__
except ImportError:
    # Fallback for editable installs without build
    __version__ = "0.0.0.dev0"
