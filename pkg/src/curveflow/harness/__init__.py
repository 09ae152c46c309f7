"""Configuration, preset catalog, experiment and sweep runners, and the command-line interface."""
