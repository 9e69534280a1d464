from ._base import LabCommand


class Command(LabCommand):
    help = "Check the logarithmic derivative bound outside the Cartan exceptional set"
    experiment = "logderiv"

    def run(self, **options):
        self.run_and_report(self.load(options), options)
