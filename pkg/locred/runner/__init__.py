from locred.runner.field_generators import FieldSpec, Rect, generate_f, generate_kappa
from locred.runner.config import ExperimentConfig, config_from_flat, load_config, parse_key_values
from locred.runner.pipeline import ExperimentPipeline, run_experiment, setup_logging
from locred.runner.cli import main
