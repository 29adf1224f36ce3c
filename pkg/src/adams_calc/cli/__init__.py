from .config import Config, ConfigError, default_config, load_config
from .evaluate import EvalError, Evaluator
from .parser import ParseError, parse_expr, to_source
from .tasks import Operations, Report, run_all, run_task, serialize_report

__all__ = [
    "Config", "ConfigError", "EvalError", "Evaluator", "Operations", "ParseError",
    "Report", "default_config", "load_config", "parse_expr", "run_all", "run_task",
    "serialize_report", "to_source",
]
