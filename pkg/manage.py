#!/usr/bin/env python
"""Administrative entry point; behaves like the ``esetlab`` console script."""
from esetlab.cli import main

if __name__ == "__main__":
    main()
