"""Command Line Interface of the planning engine."""
