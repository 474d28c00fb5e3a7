"""Module entry point: python -m gammatail ..."""
from .cli import main_entry

main_entry()
