"""Bundled molecule definitions, loadable as `preset:<name>`."""
