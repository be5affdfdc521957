"""fimpipe: curriculum- and context-augmented FIM dataset pipeline plus the
offline metric, telemetry, and multi-line infilling benchmark toolkit."""

__version__ = "0.1.0"
