from .cli import main

__version__ = "0.1.0"
