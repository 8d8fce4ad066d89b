"""Entry point for running rlift as a module."""

from rlift.cli.app import app

if __name__ == "__main__":
    app()
