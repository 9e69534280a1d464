import json
from pathlib import Path

from exceptional_sets.exceptions import InvalidInput
from exceptional_sets.logderiv_bounds import cartan_discs

from ._base import LabCommand


class Command(LabCommand):
    help = "Cartan discs for a point set, or the seeded Cartan experiment"
    experiment = "cartan"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--points", help="JSON list of [re, im] pairs")
        parser.add_argument("--d", type=float, help="total radius budget is 2d")

    def run(self, **options):
        if not options["points"]:
            self.run_and_report(self.load(options), options)
            return
        if options["d"] is None:
            raise InvalidInput("--points needs --d")
        try:
            pairs = json.loads(Path(options["points"]).read_text(encoding="utf-8"))
            points = [complex(re, im) for re, im in pairs]
        except (OSError, ValueError, TypeError) as e:
            raise InvalidInput(f"Unable to read points {options['points']}: {e}") from e
        discs = cartan_discs(points, options["d"])
        self.emit(
            {
                "d": options["d"],
                "radius_sum": sum(d.radius for d in discs),
                "discs": [d.to_dict() for d in discs],
            }
        )
