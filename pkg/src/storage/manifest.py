import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from uuid import uuid4

from src import __version__
from src.errors import DataIOError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def iso_now():
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


class RunManifest:
    """
    Metadata of one CLI run, written once per output directory

    argv is the full command line after the program name, so replaying it reproduces
    the outputs.
    """

    def __init__(self, command, argv, config=None, seed=None, inputs=None, outputs=None,
                 started=None, finished=None, run_id=None, version=__version__):
        self._command = command
        self._argv = list(argv)
        self._config = config or {}
        self._seed = seed
        self._inputs = dict(inputs or {})
        self._outputs = dict(outputs or {})
        self._started = started or iso_now()
        self._finished = finished
        self._run_id = run_id or str(uuid4())
        self._version = version

    @property
    def command(self):
        return self._command

    @property
    def argv(self):
        return list(self._argv)

    @property
    def config(self):
        return self._config

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value):
        self._seed = None if value is None else int(value)

    @property
    def inputs(self):
        return dict(self._inputs)

    @property
    def outputs(self):
        return dict(self._outputs)

    @property
    def run_id(self):
        return self._run_id

    def add_input(self, name, path):
        self._inputs[name] = str(path)

    def update_config(self, values):
        self._config.update(values)

    def add_output(self, name, path):
        self._outputs[name] = str(path)

    def finish(self):
        self._finished = iso_now()

    def to_dict(self):
        return {
            "run_id": self._run_id,
            "command": self._command,
            "argv": self._argv,
            "config": self._config,
            "seed": self._seed,
            "tool_version": self._version,
            "inputs": self._inputs,
            "outputs": self._outputs,
            "started": self._started,
            "finished": self._finished,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["command"], data["argv"], data.get("config"), data.get("seed"), data.get("inputs"),
                   data.get("outputs"), data.get("started"), data.get("finished"), data.get("run_id"),
                   data.get("tool_version", __version__))

    def write(self, directory):
        """Write manifest.json into directory, replacing an earlier one"""
        path = Path(directory) / MANIFEST_NAME
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(self.to_dict(), f, indent=2)
                f.write("\n")
        except OSError as exc:
            raise DataIOError(f"cannot write manifest {path}: {exc}") from exc
        logger.info("Wrote run manifest %s", path)
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        try:
            with open(path, "r", encoding="utf-8") as f:
                return cls.from_dict(json.load(f))
        except OSError as exc:
            raise DataIOError(f"cannot read manifest {path}: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise DataIOError(f"{path}: malformed manifest: {exc}") from exc
