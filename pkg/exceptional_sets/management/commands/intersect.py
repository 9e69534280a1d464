from django.conf import settings

from exceptional_sets.curve_geometry import Branch, CurveFamily, intersecting_indices

from ._base import LabCommand


class Command(LabCommand):
    help = "Indices of the discs met by one gauge curve"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("collection")
        parser.add_argument("--c", type=float, required=True)
        parser.add_argument("--phi", type=float, default=0.0)
        parser.add_argument("--zeta", type=float, nargs=2, default=[1.0, 0.0], metavar=("RE", "IM"))
        parser.add_argument("--branch", choices=[b.value for b in Branch], default=Branch.BOTH.value)
        parser.add_argument("--workers", type=int, default=settings.LAB["workers"])

    def run(self, **options):
        col = self.read_collection(options["collection"])
        fam = CurveFamily(
            col.gauge,
            options["c"],
            phi=options["phi"],
            zeta=complex(*options["zeta"]),
            branch=Branch(options["branch"]),
        )
        hits = intersecting_indices(fam, col, workers=options["workers"])
        if options["format"] == "csv":
            self.emit("".join(f"{i}\n" for i in ["index", *hits]))
        else:
            self.emit({"c": fam.c, "branch": fam.branch.value, "hits": hits, "count": len(hits)})
