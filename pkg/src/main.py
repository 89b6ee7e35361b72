# enable logging for the toolkit; diagnostics go to stderr, data to stdout
import logging
import sys

naqc_logger = logging.getLogger("src")
naqc_logger.addHandler(logging.StreamHandler())
naqc_logger.setLevel(logging.INFO)

from .app import main

sys.exit(main())
