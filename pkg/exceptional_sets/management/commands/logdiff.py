from ._base import LabCommand


class Command(LabCommand):
    help = "Check the logarithmic difference bound outside the Cartan exceptional set"
    experiment = "logdiff"

    def run(self, **options):
        self.run_and_report(self.load(options), options)
