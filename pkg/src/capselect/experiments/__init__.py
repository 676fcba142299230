"""Synthetic reproduction of the satellite-plus-ground selection experiments."""
from .config import PRESETS, ExperimentConfig, load_config, preset
from .report import report_csv, write_run
from .runner import RunArtifacts, run_experiment, run_many
from .truth import export_egm2008, load_egm2008, random_potential

__all__ = ["PRESETS", "ExperimentConfig", "load_config", "preset", "report_csv", "write_run",
           "RunArtifacts", "run_experiment", "run_many", "export_egm2008", "load_egm2008",
           "random_potential"]
