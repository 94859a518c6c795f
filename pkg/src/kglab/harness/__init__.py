"""Scenario configuration, execution, reporting and the command line."""

from kglab.harness.config import ESTIMATES, ScenarioConfig, load_config, parse_config
from kglab.harness.scenarios import EstimateReport, run_scenario, run_sweep

__all__ = ["ESTIMATES", "ScenarioConfig", "load_config", "parse_config", "EstimateReport", "run_scenario", "run_sweep"]
