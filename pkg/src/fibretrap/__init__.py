"""Two-colour nanofibre optical trap for diatomic molecules."""

__version__ = "0.1.0"
