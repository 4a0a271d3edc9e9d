import json
from typing import Dict, List, Union

from pydantic import BaseModel, Field

ParamValue = Union[int, str]


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class VerificationReport(BaseModel):
    name: str
    seed: int
    trials: int
    parameters: Dict[str, ParamValue] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> CheckResult:
        check = CheckResult(name=name, passed=bool(passed), detail=detail)
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for check in other.checks:
            self.add(f"{prefix}{check.name}", check.passed, check.detail)

    def render(self) -> str:
        header = f"verify {self.name} seed={self.seed} trials={self.trials}"
        if self.parameters:
            header += " " + " ".join(f"{key}={value}" for key, value in self.parameters.items())
        lines = [header]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            line = f"[{status}] {check.name}"
            if check.detail:
                line += f": {check.detail}"
            lines.append(line)
        lines.append("ALL CHECKS PASSED" if self.passed else "CHECKS FAILED")
        return "\n".join(lines)

    def to_json(self) -> str:
        payload = self.model_dump()
        payload["passed"] = self.passed
        return json.dumps(payload, separators=(",", ":"))


class ErrorPayload(BaseModel):
    """Machine-readable error emitted by the CLI under --json."""
    error: str
    message: str

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), separators=(",", ":"))
