"""Utilities module for rlift."""
