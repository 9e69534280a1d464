from esetlab.utils import EXPERIMENT_IDS
from exceptional_sets.experiments import THEOREM_EXPERIMENTS
from exceptional_sets.exceptions import InvalidInput

from ._base import LabCommand


class Command(LabCommand):
    help = "Run a full experiment and compare it with its bound"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        target = parser.add_mutually_exclusive_group()
        target.add_argument("--theorem", choices=sorted(THEOREM_EXPERIMENTS))
        target.add_argument("--experiment", choices=EXPERIMENT_IDS)
        parser.add_argument("--pdf", action="store_true", help="also write a PDF summary")

    def run(self, **options):
        if options["theorem"]:
            name = THEOREM_EXPERIMENTS[options["theorem"]]
        elif options["experiment"]:
            name = options["experiment"]
        elif not options["config"]:
            raise InvalidInput("give --theorem, --experiment or --config")
        else:
            name = None
        config = self.load(options, name)
        if name is not None and config.experiment != name:
            raise InvalidInput(f"config runs {config.experiment!r}, not {name!r}")
        self.run_and_report(config, options, pdf=options["pdf"])
