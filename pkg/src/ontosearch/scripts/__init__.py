from .ontosearch_cli import main
