"""Tests for rlift."""
