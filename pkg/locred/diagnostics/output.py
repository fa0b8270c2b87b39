"""Plain-text .dat tables, one row per iteration, for external plotting tools."""
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from locred.base.exceptions import ConfigError, OutputError
from locred.diagnostics.records import EnrichmentTrace
from locred.enrichment.state import Algorithm

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

INEQ_HEADER = (
    "# (|u_n-u|_a^2 - |R_n|_{O_k'}^2)/|u_{n+1}-u|_a^2 "
    "max_i |R_n|_{O_i'}^2/mean_i |R_n|_{O_i'}^2 "
    "c_pu^2 sum_i |R_n|_{O_i'}^2/|R_n|_{V'}^2 ; >= 1 holds, = 1 is sharp\n"
)

DAT_FILES: Dict[Algorithm, Dict[str, List[str]]] = {
    Algorithm.RESIDUAL_BASED: {
        "errors.dat": ["rel_energy_error"],
        "convergence.dat": ["rate_metric"],
        "ineq.dat": ["sharpness_chungend", "sharpness_r1", "sharpness_r2"],
    },
    Algorithm.GLOBALLY_COUPLED: {
        "errors_g_c.dat": ["rel_energy_error"],
        "convergence_g_c.dat": ["rate_metric"],
    },
}


def emit_dat(trace: EnrichmentTrace, directory: Union[str, Path]) -> List[Path]:
    if not trace.records:
        raise ConfigError("cannot write .dat files for an empty trace")
    directory = Path(directory)
    frame = trace.to_frame()
    written = []
    for name, columns in DAT_FILES[trace.algorithm].items():
        path = directory / name
        try:
            directory.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as fh:
                if name == "ineq.dat":
                    fh.write(INEQ_HEADER)
                frame[columns].to_csv(fh, sep=" ", header=False, index=False, float_format=FLOAT_FORMAT,
                                      na_rep="nan", lineterminator="\n")
        except OSError as e:
            raise OutputError(path, e) from e
        written.append(path)
    logger.info(f"wrote {', '.join(p.name for p in written)} to {directory}")
    return written


def read_dat(path: Union[str, Path]) -> np.ndarray:
    """Rows of a .dat file as a 2D float array, comment lines skipped."""
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            rows.append([float(token) for token in line.split()])
    return np.array(rows)
