from exceptional_sets import gauges
from exceptional_sets.exceptions import InvalidInput
from exceptional_sets.measure_lab import IntervalUnion, Projection, gauge_integral, projection

from ._base import LabCommand


class Command(LabCommand):
    help = "Measure and gauge integral of an interval union or of a collection's projection"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--interval", type=float, nargs=2, action="append", metavar=("LO", "HI"))
        parser.add_argument("--collection")
        parser.add_argument("--along", choices=[p.value for p in Projection], default=Projection.MODULUS.value)
        parser.add_argument("--tail", action="store_true", help="project the tail discs only")
        parser.add_argument("--gauge", help="gauge spec; defaults to the collection's gauge")

    def run(self, **options):
        if options["collection"]:
            col = self.read_collection(options["collection"])
            E = projection(col, Projection(options["along"]), col.tail() if options["tail"] else None)
            gauge = gauges.from_spec(options["gauge"]) if options["gauge"] else col.gauge
        elif options["interval"]:
            E = IntervalUnion.from_intervals(options["interval"])
            if not options["gauge"]:
                raise InvalidInput("--gauge is required with --interval")
            gauge = gauges.from_spec(options["gauge"])
        else:
            raise InvalidInput("give --interval or --collection")
        integral = gauge_integral(E, gauge)
        self.emit(
            {
                "intervals": E.to_list(),
                "measure": E.measure,
                "integral": integral.value,
                "error": integral.error,
                "converged": integral.converged,
                "lower_bound": integral.lower_bound,
            }
        )
