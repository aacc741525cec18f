import logging
import logging.config
import sys

from qclscape.cli import main as cli_main
from qclscape.tasks.config import log_config


def main():
    try:
        return cli_main()
    except Exception:
        logging.config.dictConfig(log_config('DEBUG'))
        log = logging.getLogger(__name__)
        log.exception("Caught exception")
        return 1


if __name__ == '__main__':
    sys.exit(main())
