"""
Persistent state for aromakit: cached dimensions and matrix ranks keyed by
(kind, N, n, p, divfree), kept in <state_dir>/state.json across sessions.
"""

import json
import os
from datetime import datetime
from typing import Dict, Optional

from core.status import log


class StateManager:
    """
    Cache of computed dimensions and ranks

    Args:
        state_dir: Directory holding state.json (created on first save)
        enabled: When False, lookups miss and writes are dropped
    """

    STATE_FILE = "state.json"

    def __init__(self, state_dir: str, enabled: bool = True):
        self.state_dir = os.path.expanduser(state_dir)
        self.state_file = os.path.join(self.state_dir, self.STATE_FILE)
        self.enabled = enabled

    @staticmethod
    def key(kind: str, N: int, n: int, p: int, divfree: bool = False) -> str:
        return f"{kind}:{N}:{n}:{p}:{'divfree' if divfree else 'standard'}"

    def _load_state(self) -> Dict:
        """Load state from JSON file"""
        if not os.path.exists(self.state_file):
            return {"entries": {}}
        try:
            with open(self.state_file, "r") as f:
                state = json.load(f)
        except json.JSONDecodeError:
            log(f"State file {self.state_file} corrupted, starting empty.", level="warning")
            return {"entries": {}}
        state.setdefault("entries", {})
        return state

    def _save_state(self, state: Dict):
        """Save state to JSON file"""
        state["last_updated"] = datetime.now().isoformat()
        os.makedirs(self.state_dir, exist_ok=True)
        with open(self.state_file, "w") as f:
            json.dump(state, f, indent=2, sort_keys=True)

    def get_dims(self, kind: str, N: int, n: int, p: int, divfree: bool = False) -> Optional[int]:
        if not self.enabled:
            return None
        return self._load_state()["entries"].get(self.key(kind, N, n, p, divfree))

    def put_dims(self, kind: str, N: int, n: int, p: int, value: int, divfree: bool = False):
        if not self.enabled:
            return
        state = self._load_state()
        state["entries"][self.key(kind, N, n, p, divfree)] = int(value)
        self._save_state(state)

    def cached(self, kind: str, N: int, n: int, p: int, compute, divfree: bool = False) -> int:
        """Return the stored value or compute, store and return it."""
        value = self.get_dims(kind, N, n, p, divfree)
        if value is None:
            value = int(compute())
            self.put_dims(kind, N, n, p, value, divfree)
        return value

    def clear(self) -> int:
        """Drop every cached entry; returns how many were removed."""
        state = self._load_state()
        removed = len(state["entries"])
        state["entries"] = {}
        self._save_state(state)
        return removed

    def summary(self) -> Dict:
        state = self._load_state()
        kinds: Dict[str, int] = {}
        for k in state["entries"]:
            kind = k.split(":", 1)[0]
            kinds[kind] = kinds.get(kind, 0) + 1
        return {
            "state_file": self.state_file,
            "entries": len(state["entries"]),
            "by_kind": kinds,
            "last_updated": state.get("last_updated"),
        }
