from exceptional_sets.disc_sets import validate
from exceptional_sets.exceptions import BoundViolation

from ._base import LabCommand


class Command(LabCommand):
    help = "Check a disc collection against its gauge-weighted tail budget"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("collection", help="collection JSON written by generate")

    def run(self, **options):
        report = validate(self.read_collection(options["collection"]))
        self.emit(report.to_dict())
        if not report.valid:
            raise BoundViolation(f"collection is not valid: {sorted(report.offending)}")
