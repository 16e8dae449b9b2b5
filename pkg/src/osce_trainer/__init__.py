"""OSCE training backend: simulated patient, checklist-scoring tutor, benchmarks."""

from importlib import resources


def fixture_path(name: str):
    """Path to a bundled fixture file (scenario or script)."""
    return resources.files("osce_trainer").joinpath(f"fixtures/{name}")


__all__ = ["fixture_path"]
