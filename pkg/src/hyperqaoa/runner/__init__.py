from .campaign import CampaignConfig, ConfigError, build_instances, magic_config, read_records, run_campaign
from .report import Row, aggregate, read_csv, render_svg, report, write_csv

__all__ = [
    "CampaignConfig",
    "ConfigError",
    "Row",
    "aggregate",
    "build_instances",
    "magic_config",
    "read_csv",
    "read_records",
    "render_svg",
    "report",
    "run_campaign",
    "write_csv",
]
