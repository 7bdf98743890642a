"""Broken translator: silently loses any line reading DROP."""

import sys

for line in sys.stdin:
    if line.strip() != "DROP":
        sys.stdout.write(line)
