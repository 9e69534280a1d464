from ._base import LabCommand


class Command(LabCommand):
    help = "Check the unit-disc logarithmic derivative bound"
    experiment = "logderiv_disc"

    def run(self, **options):
        self.run_and_report(self.load(options), options)
