"""
Apps - Application Entry Points

This package contains the command line and the reduction demo.

Available apps:
- larr.py: Command line (show, table, validate, demo, bench)
- reduction_demo.py: Synthetic event reduction pipeline
"""
