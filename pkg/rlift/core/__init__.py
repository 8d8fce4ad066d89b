"""Core module for rlift - data models, documents and configuration."""
