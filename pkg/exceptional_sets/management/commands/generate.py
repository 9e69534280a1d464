from exceptional_sets import disc_sets, gauges
from exceptional_sets.exceptions import InvalidInput
from exceptional_sets.gauges import Ambient

from ._base import LabCommand

KINDS = ["random", "horocycle", "cantor", "example1", "example2", "rapid"]


class Command(LabCommand):
    help = "Generate a disc collection and print it as JSON (or CSV)"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("kind", choices=KINDS)
        parser.add_argument("--gauge", default="concave_power:a=0.5")
        parser.add_argument("--ambient", choices=[a.value for a in Ambient], default=None)
        parser.add_argument("--count", type=int, default=500)
        parser.add_argument("--epsilon", type=float, default=disc_sets.DEFAULT_EPSILON)
        parser.add_argument("--envelope-m", type=float, default=1.0)
        parser.add_argument("--levels", type=int, default=12)
        parser.add_argument("--n-max", type=int, default=20)
        parser.add_argument("--k-max", type=int, default=20)

    def run(self, **options):
        kind = options["kind"]
        seed = options["seed"]
        if kind == "random":
            if seed is None:
                raise InvalidInput("random collections need --seed")
            gauge = gauges.from_spec(options["gauge"])
            ambient = Ambient(options["ambient"]) if options["ambient"] else gauge.ambient
            col = disc_sets.gen_random(
                ambient, gauge, options["count"], options["epsilon"], options["envelope_m"], seed
            )
        elif kind == "horocycle":
            col = disc_sets.gen_horocycle_lset(options["n_max"], options["epsilon"])
        elif kind == "cantor":
            col = disc_sets.gen_cantor_rset(options["levels"], seed, options["epsilon"])
        elif kind == "example1":
            col = disc_sets.gen_example1(options["n_max"], options["k_max"], options["epsilon"])
        elif kind == "example2":
            col = disc_sets.gen_example2(options["n_max"], options["k_max"], options["epsilon"])
        else:
            if seed is None:
                raise InvalidInput("rapid instances need --seed")
            col = disc_sets.gen_rapid_instance(options["n_max"], seed)
        self.emit(col.to_csv() if options["format"] == "csv" else col.to_dict())
