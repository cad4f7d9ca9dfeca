import json
import os
import sys
from datetime import datetime, timezone
from typing import Callable, Iterable, Optional, Tuple

import click

STATUS_FILE = "status.json"

# set by the CLI from the settings
VERBOSE = False
STATE_DIR: Optional[str] = None


def configure(state_dir: Optional[str] = None, verbose: bool = False):
    global STATE_DIR, VERBOSE
    STATE_DIR = state_dir
    VERBOSE = verbose


def _status_path() -> str:
    if STATE_DIR:
        return os.path.join(STATE_DIR, STATUS_FILE)
    return STATUS_FILE


def update_status(status, detail=None):
    """Update status.json with status, timestamp, and optional detail."""
    data = {
        "status": status,
        "last_updated": datetime.now(timezone.utc).isoformat(),
        "detail": detail,
    }
    try:
        path = _status_path()
        if os.path.dirname(path):
            os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as f:
            json.dump(data, f, indent=2)
        if VERBOSE:
            click.echo(f"[STATUS] {status} | {detail or 'N/A'}", err=True)
    except OSError as e:
        click.echo(f"[!] Failed to update status: {e}", err=True)


def get_current_status():
    """Read and return the current status data from status.json."""
    try:
        with open(_status_path(), "r") as f:
            return json.load(f)
    except FileNotFoundError:
        log("Status file not found.", level="warning")
        return None
    except json.JSONDecodeError:
        log("Status file corrupted or empty.", level="warning")
        return None


def log(message, level="info"):
    if level == "warning":
        click.echo(f"[!] {message}", err=True)
    elif VERBOSE:
        click.echo(f"[+] {message}", err=True)


Check = Tuple[str, Callable[[], None]]


def run_checks_live(checks: Iterable[Check], log_file_path="check.log") -> int:
    """Run named checks in order, streaming one line per check to stdout and the log file.

    A check passes when it returns without raising. Returns the number of failures.
    """
    update_status("starting")
    failures = 0
    log_file = None
    try:
        if log_file_path:
            log_file = open(log_file_path, "w")
        for name, check in checks:
            try:
                check()
                line = f"[+] {name} ... ok"
            except AssertionError as e:
                failures += 1
                line = f"[!] {name} ... FAILED: {e or 'assertion failed'}"
            except Exception as e:
                failures += 1
                line = f"[!] {name} ... FAILED: {type(e).__name__}: {e}"
            click.echo(line)
            sys.stdout.flush()
            if log_file:
                log_file.write(line + "\n")
                log_file.flush()
    except KeyboardInterrupt:
        click.echo("\n[!] Interrupted.")
        update_status("manually_stopped")
        raise
    finally:
        if log_file:
            log_file.write(f"\n[+] Checks finished with {failures} failure(s)\n")
            log_file.close()

    if failures:
        update_status(f"failed_{failures}")
    else:
        update_status("completed")
    return failures
