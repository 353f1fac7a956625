"""Command-line entry points: bebopc and bebop-bench."""
