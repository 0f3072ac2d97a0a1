"""
File formats, run configurations and run manifests
"""

from src.storage.event_log_io import read_event_log, read_event_log_csv, write_event_log, write_event_log_csv
from src.storage.config import (
    HawkesRunConfig,
    load_config,
    load_hawkes_config,
    load_netsim_config,
    parse_config,
)
from src.storage.manifest import RunManifest
