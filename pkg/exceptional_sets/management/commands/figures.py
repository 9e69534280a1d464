from pathlib import Path

from django.conf import settings

from esetlab.utils import write_text
from exceptional_sets.curve_geometry import Branch
from exceptional_sets.figures import FAMILIES, all_figures, c_strip_svg, figure_instance
from exceptional_sets.measure_lab import exceptional_c_measure

from ._base import LabCommand


class Command(LabCommand):
    help = "Write SVG figures of every gauge curve family and an exceptional c-set strip"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--family", action="append", choices=sorted(FAMILIES))

    def run(self, **options):
        seed = options["seed"] if options["seed"] is not None else 0
        out = Path(options["out"] or settings.ESETLAB_OUT) / "figures"
        written = []
        for name, svg in all_figures(seed, options["family"]).items():
            written.append(str(write_text(out / name, svg)))
        col = figure_instance("concave", seed)
        report = exceptional_c_measure(col.gauge, 0.0, col, Branch.BOTH)
        written.append(str(write_text(out / "c_set.svg", c_strip_svg(report))))
        self.emit({"figures": written})
