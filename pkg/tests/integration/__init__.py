"""Integration tests running full scenarios through the runner and CLI."""
