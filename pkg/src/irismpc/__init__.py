"""irismpc: three-party secret-shared iris code membership queries."""

__version__ = "0.1"
