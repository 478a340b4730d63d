import sys

from dotenv import load_dotenv

from harness.cli import SERVICE_NAME, cli_main
from monitoring.logging_config import StructuredLogger

# Load environment variables from .env file
load_dotenv()


def main() -> int:
    StructuredLogger(SERVICE_NAME)
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
