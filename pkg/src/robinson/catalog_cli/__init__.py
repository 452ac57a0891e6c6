"""Model catalog, check runner and command-line interface."""

from .checks import CHECKS, Config, Outcome, Report, run_checks
from .loader import (CatalogEntry, ExpectedVerdict, Model, ModelError, build_model,
                     catalog_entries, find_model, load_model)

__all__ = ["CHECKS", "CatalogEntry", "Config", "ExpectedVerdict", "Model", "ModelError", "Outcome",
           "Report", "build_model", "catalog_entries", "find_model", "load_model", "run_checks"]
