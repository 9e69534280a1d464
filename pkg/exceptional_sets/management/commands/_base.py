import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from django.core.management.base import BaseCommand, CommandError

from esetlab.schemas import artifact_kind, validate_artifact
from esetlab.utils import ExperimentConfig, bundled_config, dump_json, load_config, write_text
from exceptional_sets.disc_sets import DiscCollection
from exceptional_sets.exceptions import BoundViolation, InvalidInput, LabError
from exceptional_sets.experiments import ExperimentResult, run_experiment
from exceptional_sets.figures import c_strip_svg, summary_pdf

logger = logging.getLogger(__name__)


class LabCommand(BaseCommand):
    """Shared flags, error reporting and artifact writing for every subcommand."""

    # bundled config used when --config is absent
    experiment: Optional[str] = None

    def add_arguments(self, parser):
        parser.add_argument("--config", help="experiment config JSON")
        parser.add_argument("--seed", type=int, help="override the config seed")
        parser.add_argument("--out", help="output directory (default: $ESETLAB_OUT)")
        parser.add_argument("--format", choices=["json", "csv"], default="json")
        parser.add_argument("--svg", action="store_true", help="also write SVG figures")

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except LabError as e:
            logger.error(f"{type(e).__name__}: {e}", exc_info=True)
            self.stderr.write(dump_json(validate_artifact("error", e.to_dict())), ending="")
            raise CommandError(str(e), returncode=e.exit_code) from e

    def run(self, **options):
        raise NotImplementedError

    def emit(self, payload: Any) -> None:
        self.stdout.write(payload if isinstance(payload, str) else dump_json(payload), ending="")

    def load(self, options: Dict[str, Any], name: Optional[str] = None) -> ExperimentConfig:
        if options.get("config"):
            config = load_config(options["config"])
        else:
            config = bundled_config(name or self.experiment)
        return config.with_overrides(seed=options.get("seed"), out_dir=options.get("out"))

    def read_collection(self, path: str) -> DiscCollection:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidInput(f"Unable to read collection {path}: {e}") from e
        return DiscCollection.from_dict(validate_artifact("collection", payload))

    def write_result(self, config: ExperimentConfig, result: ExperimentResult, svg: bool = False) -> Path:
        out = config.output_dir()
        write_text(out / "config.json", dump_json(config.to_dict()))
        write_text(out / "result.json", dump_json(validate_artifact("result", result.to_dict())))
        for name, payload in sorted(result.artifacts.items()):
            kind = artifact_kind(name)
            if kind is not None:
                validate_artifact(kind, payload)
            write_text(out / name, payload if isinstance(payload, str) else dump_json(payload))
        if svg and result.exceptional is not None:
            write_text(out / "c_set.svg", c_strip_svg(result.exceptional, title=f"{result.experiment} c-set"))
        return out

    def run_and_report(self, config: ExperimentConfig, options: Dict[str, Any], pdf: bool = False) -> ExperimentResult:
        result = run_experiment(config)
        out = self.write_result(config, result, svg=options.get("svg", False))
        if pdf:
            path = out / "summary.pdf"
            path.write_bytes(summary_pdf([result], title=f"{result.experiment} summary"))
            logger.info(f"Wrote {path}")
        if options.get("format") == "csv":
            row = result.to_row()
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(row)
            writer.writerow(row.values())
            self.emit(buffer.getvalue())
        else:
            self.emit(result.to_dict())
        if not result.passed:
            raise BoundViolation(f"{result.experiment} failed its checks; see {out / 'result.json'}")
        return result
