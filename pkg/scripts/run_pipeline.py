#!/usr/bin/env python3
"""
Headless experiment runner for steel-inverse.

Runs the full pipeline for a list of seeds (from the config or the command
line) and logs everything, for use from cron or a batch queue.

Usage: run_pipeline.py [CONFIG.yaml] [SEED ...]
"""

import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

# Add the src directory to the path
src_dir = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_dir))

from steelinv.config.settings import load_run_config
from steelinv.pipeline import run_pipeline
from steelinv.utils.logging import get_logger, setup_logger
from steelinv.utils.system import format_duration, get_system_info


def parse_args(argv: list[str]) -> tuple[Optional[str], list[int]]:
    config_path = None
    seeds = []
    for arg in argv:
        if arg.endswith((".yaml", ".yml")):
            config_path = arg
        else:
            seeds.append(int(arg))
    return config_path, seeds


def run_batch(argv: list[str]) -> None:
    """Run every seed and write the combined report."""
    logger = setup_logger()
    logger.info("=" * 60)
    logger.info(f"Batch run started at {datetime.now().isoformat()}")
    logger.info("=" * 60)

    host = get_system_info()
    logger.info(f"Host {host.hostname}: {host.cpu_count} cores, numpy {host.numpy_version}")

    config_path, seeds = parse_args(argv)
    cfg = load_run_config(config_path)
    seeds = seeds or [cfg.seed]
    out_dir = Path(cfg.output_dir)
    logger.info(f"Seeds: {', '.join(str(s) for s in seeds)}; output in {out_dir}")

    def progress(message: str, fraction: float) -> None:
        if fraction >= 1.0:
            logger.info(message)

    start_time = datetime.now()
    report = run_pipeline(cfg, seeds, out_dir, progress=progress)
    duration = (datetime.now() - start_time).total_seconds()

    logger.info("\n" + "=" * 60)
    logger.info("Run Summary")
    logger.info("=" * 60)
    best = report.best()
    if best is not None:
        logger.info(f"Best functional model: {best.model_name} (MSE {best.mse:.4g})")
    for row in report.rows:
        if report.notes(row):
            logger.info(f"  {row.model_name} {row.protocol.value}/{row.split.value}: "
                        f"{report.notes(row)}")
    logger.info(f"Duration: {format_duration(duration)}")
    logger.info(f"Batch run completed at {datetime.now().isoformat()}")


def main():
    """Main entry point for batch runs."""
    try:
        run_batch(sys.argv[1:])
    except Exception as e:
        logger = get_logger()
        logger.error(f"Fatal error in batch run: {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
