"""Line-oriented run reports with a versioned header.

A report body is deterministic for fixed inputs and seed; the timing line is
kept apart so that two runs can be compared byte for byte after dropping it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

FORMAT_VERSION = 1
HEADER = f"rmk-report v{FORMAT_VERSION}"

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2
EXIT_OVERFLOW = 3


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    seed: int | None = None
    verdicts: list = field(default_factory=list)
    facts: list = field(default_factory=list)  # (key, value) lines specific to the command
    counterexamples: list = field(default_factory=list)
    caveats: list = field(default_factory=list)
    error: str | None = None
    exit_code: int = EXIT_OK
    timing: float = 0.0
    figures: list = field(default_factory=list)
    format: str = "text"

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.verdicts.append(Verdict(name, passed, detail))
        if not passed and self.exit_code == EXIT_OK:
            self.exit_code = EXIT_VERDICT

    def fact(self, key: str, value) -> None:
        self.facts.append((key, str(value)))

    def caveat(self, text: str) -> None:
        if text not in self.caveats:
            self.caveats.append(text)

    def fail(self, code: int, message: str) -> None:
        self.exit_code = code
        self.error = message

    @property
    def status(self) -> str:
        return {EXIT_OK: "ok", EXIT_VERDICT: "fail", EXIT_INPUT: "input-error", EXIT_OVERFLOW: "overflow"}[self.exit_code]

    # rendering ----------------------------------------------------------------

    def body_lines(self) -> list[str]:
        lines = [HEADER, f"command: {self.command}"]
        lines += [f"input: {p}" for p in self.inputs]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        if self.bounds:
            lines.append("bounds: " + " ".join(f"{k}={v}" for k, v in self.bounds.items()))
        lines += [f"{k}: {v}" for k, v in self.facts]
        for v in self.verdicts:
            mark = "PASS" if v.passed else "FAIL"
            lines.append(f"verdict: {mark} {v.name}" + (f" | {v.detail}" if v.detail else ""))
        lines += [f"counterexample: {c}" for c in self.counterexamples]
        lines += [f"caveat: {c}" for c in self.caveats]
        lines += [f"figure: {f}" for f in self.figures]
        if self.error:
            lines.append(f"error: {self.error}")
        lines.append(f"status: {self.status} (exit {self.exit_code})")
        return lines

    def render_text(self) -> str:
        return "\n".join(self.body_lines() + [f"timing: {self.timing:.3f}s"]) + "\n"

    def to_dict(self) -> dict:
        return {
            "format": HEADER,
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "bounds": self.bounds,
            "facts": [list(f) for f in self.facts],
            "verdicts": [{"name": v.name, "passed": v.passed, "detail": v.detail} for v in self.verdicts],
            "counterexamples": self.counterexamples,
            "caveats": self.caveats,
            "figures": self.figures,
            "error": self.error,
            "status": self.status,
            "exit_code": self.exit_code,
            "timing": round(self.timing, 3),
        }

    def render_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str = "text") -> str:
        return self.render_json() if fmt == "json-like" else self.render_text()


def strip_timing(text: str) -> str:
    """Drop timing lines or keys so two reports can be compared."""
    return "\n".join(l for l in text.splitlines() if not l.startswith("timing:") and '"timing"' not in l)
