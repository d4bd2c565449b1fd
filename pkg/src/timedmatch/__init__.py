"""Timed pattern matching with zone outputs and region-based skipping."""
