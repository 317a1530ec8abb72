"""Fit the logistic SSIM model to measured samples."""

import logging
from dataclasses import asdict
from pathlib import Path

import pandas as pd
import yaml
from omegaconf import DictConfig

from jscc.core.exceptions import SchemaError
from jscc.core.fitting import fit_logistic
from jscc.core.system import LogisticParams, parse_ratio
from jscc.toolkit.cli.config import conf_validator, input_path, make_hydra_cli

log = logging.getLogger(__name__)

SAMPLE_COLUMNS = ["snr_db", "ssim"]


def fit(cfg: DictConfig) -> LogisticParams:
    """Fit ``fit.samples_file`` and write the parameters as YAML."""
    cfg = conf_validator(cfg)
    if not cfg.fit.samples_file:
        raise SchemaError("fit.samples_file", "a CSV of (snr_db, ssim) samples is required")
    samples = pd.read_csv(input_path(cfg.fit.samples_file))
    missing = set(SAMPLE_COLUMNS) - set(samples.columns)
    if missing:
        raise SchemaError("fit.samples_file", f"missing columns {sorted(missing)}")
    params = fit_logistic(samples[SAMPLE_COLUMNS].to_numpy())
    log.info("Fitted %s on %d samples", params, len(samples))

    entry = {k: float(v) for k, v in asdict(params).items()}
    if cfg.fit.compression_ratio is not None:
        entry = {"compression_ratio": parse_ratio(cfg.fit.compression_ratio), **entry}
    Path(cfg.fit.output_file).write_text(yaml.safe_dump(entry, sort_keys=False))
    log.info("Parameters written to %s", Path(cfg.fit.output_file).resolve())
    return params


fit_cli = make_hydra_cli(fit)

if __name__ == "__main__":
    fit_cli()
