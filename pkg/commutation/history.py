"""
Event logging utilities for the commutation toolkit
Records the steps of a rewrite run so they can be replayed or printed
"""

import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewriteEvent:
    step: int
    rule: str
    before: str
    after: str

    def to_json(self):
        return {"step": self.step, "rule": self.rule, "before": self.before, "after": self.after}


def log_event(trace, rule, before, after):
    """
    Appends one rewrite step to a trace list.
    rule is the tag of the rule that fired, before/after are word texts.
    """
    event = RewriteEvent(step=len(trace) + 1, rule=str(rule), before=before, after=after)
    trace.append(event)
    logger.debug("step %d  %s  %s -> %s", event.step, event.rule, before or "1", after or "1")
    return event


def format_trace(events):
    """One line per step: rule, before and after separated by tabs."""
    return "\n".join(f"{e.rule}\t{e.before or '1'}\t{e.after or '1'}" for e in events)
