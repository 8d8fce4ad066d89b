"""CLI module for rlift."""
