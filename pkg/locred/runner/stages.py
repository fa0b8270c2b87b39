from typing import Any, Dict

from locred.base.base_stage import BaseStage, ProcessLog, StageStatus
from locred.decomposition.constants import theory_constants
from locred.decomposition.partition_of_unity import build_pu, cpu_rayleigh_sample
from locred.decomposition.subdomains import build_decomposition
from locred.diagnostics.checks import TraceChecker
from locred.enrichment.algorithms import run
from locred.enrichment.state import Algorithm
from locred.fem.mesh import build_mesh
from locred.fem.problem import discretize
from locred.runner.config import ExperimentConfig
from locred.runner.field_generators import generate_f, generate_kappa


class DiscretizationStage(BaseStage):
    """Mesh, coefficient fields, assembled system and the reference solution."""

    name = "discretization"

    def execute(self, process_log: ProcessLog, config: ExperimentConfig = None, **kwargs) -> Dict[str, Any]:
        process_log.log(self.__class__.__name__, self.name, None, StageStatus.RUNNING)
        mesh = build_mesh(config.n_squares)
        kappa = generate_kappa(config.kappa, mesh)
        f = generate_f(config.f, mesh)
        problem = discretize(mesh, kappa, f)
        result = {
            "mesh": mesh,
            "problem": problem,
            "n_nodes": mesh.n_nodes,
            "n_free": mesh.n_free,
            "contrast": kappa.contrast,
            "reference_energy": problem.reference_energy,
        }
        process_log.log(self.__class__.__name__, self.name, result, StageStatus.COMPLETED,
                        f"{mesh.n_nodes} nodes, {mesh.n_free} free, |u|_a = {problem.reference_energy:.6e}")
        return result


class DecompositionStage(BaseStage):
    """Subdomains, partition of unity and the constants of the convergence estimate."""

    name = "decomposition"

    def execute(self, process_log: ProcessLog, config: ExperimentConfig = None, **kwargs) -> Dict[str, Any]:
        process_log.log(self.__class__.__name__, self.name, None, StageStatus.RUNNING)
        discretization = process_log.require(DiscretizationStage.name)
        mesh, problem = discretization["mesh"], discretization["problem"]
        dd = build_decomposition(mesh, config.subdomain_size, config.subdomain_step)
        pu = build_pu(dd, mesh)
        theory = theory_constants(dd, pu, problem.kappa, c_f=config.c_f)
        cpu_sq_sample = None
        if config.cpu_samples > 0:
            cpu_sq_sample = cpu_rayleigh_sample(pu, problem.A, config.cpu_samples, seed=0, extra=[problem.u])
        result = {
            "dd": dd,
            "pu": pu,
            "theory": theory,
            "N_D": dd.N_D,
            "J": dd.J,
            "cpu_sq_bound": theory.cpu_sq_bound,
            "cpu_sq_sample": cpu_sq_sample,
            "c": theory.c,
            "one_minus_c": theory.one_minus_c,
        }
        process_log.log(self.__class__.__name__, self.name, result, StageStatus.COMPLETED,
                        f"N_D={dd.N_D}, J={dd.J}, c_pu^2 <= {theory.cpu_sq_bound:.6e}, 1-c = {theory.one_minus_c:.6e}")
        return result


class EnrichmentStage(BaseStage):
    def __init__(self, algorithm: Algorithm):
        super().__init__()
        self.algorithm = Algorithm(algorithm)
        self.name = f"enrichment_{self.algorithm.value}"

    def execute(self, process_log: ProcessLog, config: ExperimentConfig = None, **kwargs) -> Dict[str, Any]:
        process_log.log(self.__class__.__name__, self.name, None, StageStatus.RUNNING)
        discretization = process_log.require(DiscretizationStage.name)
        decomposition = process_log.require(DecompositionStage.name)
        problem = discretization["problem"]
        trace = run(self.algorithm, problem.mesh, problem.kappa, problem.f, decomposition["dd"], config.stopping,
                    problem=problem, theory=decomposition["theory"], threads=config.threads,
                    coupled_dual_norms=config.coupled_dual_norms, config=config.to_dict())
        result = {
            "trace": trace,
            "status": trace.status.value,
            "iterations": trace.iterations,
            "final_rel_error": trace.final_rel_error,
        }
        process_log.log(self.__class__.__name__, self.name, result, StageStatus.COMPLETED,
                        f"{trace.status.value} after {trace.iterations} iterations, "
                        f"rel error {trace.final_rel_error:.6e}")
        return result


class VerificationStage(BaseStage):
    """Checks a trace against the estimate; reports, never aborts the run."""

    def __init__(self, algorithm: Algorithm, checker: TraceChecker = None):
        super().__init__()
        self.algorithm = Algorithm(algorithm)
        self.name = f"verification_{self.algorithm.value}"
        self.checker = checker or TraceChecker()

    def execute(self, process_log: ProcessLog, config: ExperimentConfig = None, **kwargs) -> Dict[str, Any]:
        process_log.log(self.__class__.__name__, self.name, None, StageStatus.RUNNING)
        decomposition = process_log.require(DecompositionStage.name)
        trace = process_log.require(f"enrichment_{self.algorithm.value}")["trace"]
        trace_check = self.checker.check_trace(trace)
        theory_check = self.checker.check_theory(decomposition["theory"], decomposition["dd"], decomposition["pu"])
        issues = trace_check["issues"] + theory_check["issues"]
        result = {
            "verified": not issues,
            "issues": issues,
            "records_checked": trace_check["records_checked"],
        }
        if issues:
            self.logger.warning(f"{len(issues)} issues in {self.algorithm.value} trace")
            process_log.log(self.__class__.__name__, self.name, result, StageStatus.COMPLETED, f"{len(issues)} issues")
        else:
            process_log.log(self.__class__.__name__, self.name, result, StageStatus.VERIFIED,
                            f"{trace_check['records_checked']} records consistent with the estimate")
        return result
