import io
import logging

from django.core.management.base import BaseCommand, CommandError

from ..exceptions import IsodrumError

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
CHECK_FAILED = 1


class DrumsCommand(BaseCommand):
    """Maps library errors onto exit codes: 2 for bad input, 1 for a failed check."""

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except CommandError:
            raise
        except IsodrumError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR)
        except OSError as exc:
            raise CommandError(f"Cannot access {exc.filename or 'file'}: {exc.strerror}", returncode=USAGE_ERROR)
        except Exception:
            logger.error("Command %s failed", self.__class__.__module__, exc_info=True)
            raise

    def run(self, *args, **options):
        raise NotImplementedError

    def fail(self, message: str):
        raise CommandError(message, returncode=CHECK_FAILED)

    def emit(self, text: str, path=None):
        """Write ``text`` to ``path``, or to stdout when no path (or ``-``) is given."""
        if path and path != "-":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            logger.info("Wrote %s", path)
        else:
            self.stdout.write(text, ending="")

    @staticmethod
    def render(writer, *args) -> str:
        buffer = io.StringIO()
        writer(buffer, *args)
        return buffer.getvalue()

    def usage_error(self, message: str):
        raise CommandError(message, returncode=USAGE_ERROR)
