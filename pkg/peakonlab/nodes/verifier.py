"""
Verifier Node - 결과에 대한 불변량 검사

각 결과 (peakons / pde / certificate / traces / reduction / probe) 에서
CheckResult 목록을 만든다. 실패는 run 을 멈추지 않고 보고만 한다.
"""
from typing import Any, Dict, List, Optional

from peakonlab.config import ScenarioConfig
from peakonlab.log_utils import log_execution
from peakonlab.state import CheckResult, ScenarioState


def _check(name: str, passed: bool, value=None, threshold=None, detail: str = "") -> CheckResult:
    return CheckResult(
        name=name, passed=bool(passed),
        value=None if value is None else float(value),
        threshold=None if threshold is None else float(threshold),
        detail=detail,
    )


class Verifier:
    """Invariant checks on finished results"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def check_peakons(self, cfg: ScenarioConfig, res: Dict[str, Any]) -> List[CheckResult]:
        s = res["summary"]
        checks = []
        tol = cfg.integrator.rtol
        checks.append(_check("peakon_h1_drift", s["h1_drift"] < 10 * tol, s["h1_drift"], 10 * tol))
        if "q_error" in s:
            checks.append(_check("single_peakon_position", s["q_error"] < 1e-8, s["q_error"], 1e-8))
            checks.append(_check("single_peakon_amplitude", s["p_drift"] < 1e-10, s["p_drift"], 1e-10))
        if "transformed_max_diff" in s:
            v = s["transformed_max_diff"]
            checks.append(_check("two_peakon_transformed", v < 1e-7, v, 1e-7))
        for i, r in enumerate(res["residuals"]):
            checks.append(_check(f"weak_residual_{i}", r.within_bound, abs(r.value), r.bound))
        return checks

    def check_pde(self, res: Dict[str, Any]) -> List[CheckResult]:
        s = res["summary"]
        checks = []
        if s["status"] == "complete":
            checks.append(_check("pde_h1_drift", s["h1_drift"] < 1e-6, s["h1_drift"], 1e-6))
        if s["sign_checks_active"]:
            checks.append(_check("m_bound", not s["m_bound_breach"], s["M_max"], s["m_bound"]))
            checks.append(_check("sign_positivity", not s["positivity_breach"], s["m_min"]))
        if "T_ratio" in s:
            ratio = s["T_ratio"]
            checks.append(_check("breaking_time_bound", ratio is not None and ratio <= 1.05, ratio, 1.05,
                                 detail="observed breakdown time over T_upper"))
        if s["status"] == "breakdown":
            rate = s.get("rate_product")
            checks.append(_check("rate_product", rate is not None and rate <= -0.4, rate, -0.4,
                                 detail="report grade"))
            checks.append(_check("criterion_superlinear", s["criterion_superlinear"]))
        return checks

    def check_traces(self, traces) -> List[CheckResult]:
        checks = []
        resolved = [tr for tr in traces if not tr.truncated]
        worst_qx = max((tr.max_qx_rel_error for tr in resolved), default=0.0)
        worst_m = max((tr.max_m_rel_error for tr in resolved), default=0.0)
        checks.append(_check("trace_qx_dual", worst_qx < 1e-5, worst_qx, 1e-5))
        checks.append(_check("trace_m_dual", worst_m < 1e-5, worst_m, 1e-5))
        checks.append(_check("trace_qx_positive", all(tr.qx_positive for tr in traces)))
        checks.append(_check("trace_m_sign", all(tr.m_sign_preserved for tr in traces)))
        return checks

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        results = state.get("results", {})
        checks: List[CheckResult] = []

        if "peakons" in results:
            checks += self.check_peakons(cfg, results["peakons"])
        if "pde" in results:
            checks += self.check_pde(results["pde"])
        if "traces" in results:
            checks += self.check_traces(results["traces"])
        if "reduction" in results:
            rows = results["reduction"]
            checks.append(_check("reductions_exact", all(r.exact for r in rows),
                                 max(r.max_error for r in rows), 1e-12))
        if "certificate" in results:
            cert = results["certificate"]
            consistent = (not cert.satisfied) or all(cert.preconditions.values())
            checks.append(_check("certificate_preconditions", consistent, detail=cert.status))
        if "probe" in results:
            report = results["probe"]
            checks.append(_check("probe_report", not report.aborted, report.slope, report.beta, detail=report.reason))

        for c in checks:
            tag = "PASS" if c.passed else "FAIL"
            value = "" if c.value is None else f" value={c.value:.3e}"
            print(f"[VERIFY] {tag} {c.name}{value}")

        failed = [c for c in checks if not c.passed]
        update = {"checks": checks, "status": "verified" if not failed else "verified_with_failures"}
        log_execution(self.run_dir, "verifier", update)
        return update
