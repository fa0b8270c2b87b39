from locred.base.base_stage import BaseStage, ProcessLog, StageStatus
from locred.base.exceptions import ConfigError, ExtensionError, LocredError, OutputError, SolverError
