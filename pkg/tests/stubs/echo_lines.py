"""Identity translator: copies stdin to stdout, optionally prefixing a tag."""

import sys

prefix = sys.argv[1] + " " if len(sys.argv) > 1 else ""
for line in sys.stdin:
    sys.stdout.write(prefix + line)
