"""Main entry point of the command line tools.

Plans a scenario and validates the plan with the channel simulator.
"""

from omegaconf import DictConfig

from jscc.toolkit.cli.config import make_hydra_cli
from jscc.toolkit.cli.plan import plan
from jscc.toolkit.cli.simulate import simulate


def main(cfg: DictConfig) -> None:
    """Plan then simulate sequentially."""
    report = plan(cfg)
    simulate(cfg, report)


main_cli = make_hydra_cli(main)

if __name__ == "__main__":
    main_cli()
