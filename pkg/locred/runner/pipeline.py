import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from locred.base.base_stage import ProcessLog, StageStatus
from locred.base.exceptions import LocredError, OutputError
from locred.diagnostics.checks import compare_traces
from locred.diagnostics.output import emit_dat
from locred.diagnostics.records import EnrichmentTrace
from locred.enrichment.state import Algorithm, RunStatus
from locred.runner.config import ExperimentConfig, dump_key_values
from locred.runner.stages import DecompositionStage, DiscretizationStage, EnrichmentStage, VerificationStage

SUMMARY_FILE = "summary.txt"
PROCESS_LOG_FILE = "process_log.json"
LOG_FILE = "locred.log"

# worst status wins when both algorithms run
STATUS_SEVERITY = {RunStatus.CONVERGED: 0, RunStatus.MAX_ITER: 1, RunStatus.STAGNATED: 2}


def setup_logging(log_dir: Path, level: int = logging.INFO):
    log_dir = Path(log_dir)
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / LOG_FILE, mode="w")
    except OSError as e:
        raise OutputError(log_dir / LOG_FILE, e) from e
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[file_handler, logging.StreamHandler()],
        force=True,
    )


def _number(value: Optional[float]) -> str:
    return "none" if value is None else "%.17g" % value


def worst_status(traces: List[EnrichmentTrace]) -> RunStatus:
    return max((t.status for t in traces), key=STATUS_SEVERITY.__getitem__)


class ExperimentPipeline:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.process_log = ProcessLog()
        self.logger = logging.getLogger("ExperimentPipeline")

        self.pipeline_stages = [
            {
                "name": DiscretizationStage.name,
                "stage": DiscretizationStage(),
                "description": "Mesh, fields, assembly and reference solve",
            },
            {
                "name": DecompositionStage.name,
                "stage": DecompositionStage(),
                "description": "Subdomains, partition of unity and rate constants",
            },
        ]
        for algorithm in config.algorithms:
            enrichment, verification = EnrichmentStage(algorithm), VerificationStage(algorithm)
            self.pipeline_stages += [
                {
                    "name": enrichment.name,
                    "stage": enrichment,
                    "description": f"{algorithm.value} online enrichment",
                },
                {
                    "name": verification.name,
                    "stage": verification,
                    "description": f"{algorithm.value} trace verification",
                },
            ]

    def _generate_pipeline_summary(self) -> Dict[str, Any]:
        completed = [e["stage"] for e in self.process_log.entries if e["status"] in ("completed", "verified")]
        failed = [e["stage"] for e in self.process_log.entries if e["status"] == "failed"]
        return {
            "pipeline_status": "COMPLETED" if not failed else "FAILED",
            "completed_stages": completed,
            "failed_stages": failed,
            "total_stages": len(self.pipeline_stages),
            "wall_time_seconds": round(self.process_log.elapsed_seconds(), 3),
            "stage_seconds": self.process_log.stage_durations(),
            "started_at": self.process_log.start_time.isoformat(),
            "completed_at": datetime.now().isoformat(),
        }

    def summary_pairs(self, results: Dict[str, Dict[str, Any]], status: RunStatus) -> List[Tuple[str, str]]:
        """Resolved config followed by result.* keys; no timing, so equal runs give equal files."""
        discretization = results[DiscretizationStage.name]
        decomposition = results[DecompositionStage.name]
        theory = decomposition["theory"]
        pairs = list(self.config.to_flat(execution=False))
        pairs += [
            ("result.status", status.value),
            ("result.n_nodes", str(discretization["n_nodes"])),
            ("result.n_free", str(discretization["n_free"])),
            ("result.contrast", _number(discretization["contrast"])),
            ("result.reference_energy", _number(discretization["reference_energy"])),
            ("result.N_D", str(decomposition["N_D"])),
            ("result.J", str(decomposition["J"])),
            ("result.max_grad_sq", _number(theory.max_grad_sq)),
            ("result.max_val_sq", _number(theory.max_val_sq)),
            ("result.cpu_sq_bound", _number(theory.cpu_sq_bound)),
            ("result.cpu_sq_sample", _number(decomposition["cpu_sq_sample"])),
            ("result.c", _number(theory.c)),
            ("result.one_minus_c", _number(theory.one_minus_c)),
        ]
        for algorithm in self.config.algorithms:
            enrichment = results[f"enrichment_{algorithm.value}"]
            verification = results[f"verification_{algorithm.value}"]
            prefix = f"result.{algorithm.value}"
            pairs += [
                (f"{prefix}.status", enrichment["status"]),
                (f"{prefix}.iterations", str(enrichment["iterations"])),
                (f"{prefix}.final_rel_error", _number(enrichment["final_rel_error"])),
                (f"{prefix}.verified", str(verification["verified"]).lower()),
                (f"{prefix}.issues", str(len(verification["issues"]))),
            ]
        return pairs

    def _save_results(self, traces: List[EnrichmentTrace], summary_text: str) -> List[Path]:
        written = []
        for trace in traces:
            if trace.records:
                written += emit_dat(trace, self.output_dir)
            else:
                self.logger.warning(f"{trace.algorithm.value} recorded no iterations, no .dat files written")
        summary_path = self.output_dir / SUMMARY_FILE
        try:
            with open(summary_path, "w", newline="") as f:
                f.write(summary_text)
        except OSError as e:
            raise OutputError(summary_path, e) from e
        written.append(summary_path)
        self.logger.info(f"Results saved to {self.output_dir}")
        return written

    def _save_process_log(self):
        path = self.output_dir / PROCESS_LOG_FILE
        try:
            self.process_log.save_to_file(path)
        except OSError as e:
            raise OutputError(path, e) from e

    def execute(self) -> Dict[str, Any]:
        """Run every stage in order; LocredError subclasses propagate after being logged."""
        setup_logging(self.output_dir)
        self.logger.info(f"Starting experiment: {self.config.algorithm}, {self.config.n_squares}x"
                         f"{self.config.n_squares} squares, output {self.output_dir}")
        self.process_log.log("ExperimentPipeline", "pipeline_start", self.config.to_dict(), StageStatus.RUNNING)

        results: Dict[str, Dict[str, Any]] = {}
        for stage in self.pipeline_stages:
            stage_name = stage["name"]
            self.logger.info(f"Starting stage: {stage_name} - {stage['description']}")
            try:
                results[stage_name] = stage["stage"].execute(self.process_log, config=self.config)
            except LocredError as e:
                self.logger.error(f"Stage {stage_name} failed: {e}")
                self.process_log.log("ExperimentPipeline", stage_name, {"error": str(e)}, StageStatus.FAILED, str(e))
                self._save_process_log()
                raise

        traces = [results[f"enrichment_{a.value}"]["trace"] for a in self.config.algorithms]
        status = worst_status(traces)
        summary_text = dump_key_values(self.summary_pairs(results, status))
        files = self._save_results(traces, summary_text)

        comparison = compare_traces(*traces, tol_rel=self.config.tol_rel) if len(traces) == 2 else None
        pipeline_summary = self._generate_pipeline_summary()
        self.process_log.log("ExperimentPipeline", "pipeline_completion",
                             {"pipeline_summary": pipeline_summary, "comparison": comparison},
                             StageStatus.COMPLETED, f"{status.value}, {len(files)} files written")
        self._save_process_log()
        return {
            "status": status,
            "summary": summary_text,
            "files": files,
            "traces": traces,
            "comparison": comparison,
            "pipeline_summary": pipeline_summary,
        }


def run_experiment(config: ExperimentConfig) -> Dict[str, Any]:
    return ExperimentPipeline(config).execute()
