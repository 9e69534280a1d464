import csv
import io

from exceptional_sets.curve_geometry import Branch
from exceptional_sets.measure_lab import exceptional_c_measure

from ._base import LabCommand

COLUMNS = ["disc", "branch", "c_lo", "c_hi", "width", "width_bound", "satisfied"]


class Command(LabCommand):
    help = "Per-disc c-interval report over the tail of a collection"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("collection")
        parser.add_argument("--phi", type=float, default=0.0)
        parser.add_argument("--zeta", type=float, nargs=2, default=[1.0, 0.0], metavar=("RE", "IM"))
        parser.add_argument("--envelope-m", type=float, default=1.0)

    def run(self, **options):
        col = self.read_collection(options["collection"])
        direction = complex(*options["zeta"]) if col.gauge.is_unit else options["phi"]
        report = exceptional_c_measure(col.gauge, direction, col, Branch.BOTH, options["envelope_m"])
        rows = [
            [r.disc_index, "upper" if sign > 0 else "lower", r.c_lo, r.c_hi, r.width, r.width_bound, r.satisfied]
            for r, sign in zip(report.reports, report.signs)
        ]
        if options["format"] == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(COLUMNS)
            writer.writerows(rows)
            self.emit(buffer.getvalue())
        else:
            self.emit(dict(report.to_dict(), rows=[dict(zip(COLUMNS, row)) for row in rows]))
