from ._base import LabCommand


class Command(LabCommand):
    help = "Run the plane and unit-disc avoidance instances"
    experiment = "avoidance"

    def run(self, **options):
        self.run_and_report(self.load(options), options)
