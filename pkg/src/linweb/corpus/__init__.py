"""Example programs shipped with the package."""
from pathlib import Path

DIR = Path(__file__).parent


def path(name: str) -> Path:
    return DIR / name


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
