from typing import Callable


def safe_log(on_log: Callable[[str], None] | None, message: str):
    """Hand `message` to the caller's log callback; a failing callback never stops the run."""
    if on_log:
        try:
            on_log(message)
        except Exception:
            pass
