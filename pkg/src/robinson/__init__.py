"""Numerical certification of Robinson structures, null congruences, CR charts
and twistor identities on sampled coordinate charts."""

__version__ = "0.1.0"
