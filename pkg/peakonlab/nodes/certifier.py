"""
Certifier Node - breaking certificate 평가

[breaking] point 가 있으면 점 값 (u0, u0_x, m0) 으로, 없으면 [initial] 의 u0 로 평가.
"""
from typing import Any, Dict, Optional

from peakonlab.breaking import certify_gradient_breaking, certify_rate, thm17_certificate, thm18_certificate
from peakonlab.config import ScenarioConfig
from peakonlab.log_utils import log_execution
from peakonlab.state import BreakingCertificate, ScenarioState


class Certifier:
    """Evaluates the gradient-breaking or blow-up-rate certificate"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def certify(self, cfg: ScenarioConfig, initial: Dict[str, Any]) -> BreakingCertificate:
        b = cfg.breaking
        params = initial["params"]
        if b.point is not None:
            u0, ux0, m0 = b.point
            if b.theorem == "T1.7":
                return certify_gradient_breaking(u0, ux0, m0, params, point=b.x0)
            return certify_rate(u0, ux0, m0, b.h1_norm, params, b.c2, point=b.x0)
        if b.theorem == "T1.7":
            return thm17_certificate(initial["u0"], b.x0, params)
        return thm18_certificate(initial["u0"], b.x0, params, b.c2)

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        cert = self.certify(cfg, state["initial"])

        print(f"[CERTIFY] {cert.theorem}: {cert.status}")
        if cert.lhs is not None:
            print(f"[CERTIFY] lhs={cert.lhs:.6g} rhs={cert.rhs:.6g} margin={cert.margin:.3g}")
        if cert.T_upper is not None:
            print(f"[CERTIFY] T_upper={cert.T_upper:.6g}")
        if cert.t_minus is not None:
            print(f"[CERTIFY] t-={cert.t_minus:.6g} t+={cert.t_plus:.6g}")
        for name, ok in cert.preconditions.items():
            if not ok:
                print(f"[CERTIFY] precondition failed: {name}")

        results = dict(state.get("results", {}))
        results["certificate"] = cert
        update = {"results": results, "status": f"certificate_{cert.status}"}
        log_execution(self.run_dir, "certifier", update,
                      metadata={"theorem": cert.theorem, "margin": cert.margin, "T_upper": cert.T_upper})
        return update
