from typing import Any, Dict, Optional

from peakonlab.log_utils import log_execution
from peakonlab.peakons import reduction_table
from peakonlab.state import ScenarioState


class Reducer:
    """Speed-relation reduction table against the closed forms"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        rows = reduction_table()
        for row in rows:
            mark = "OK" if row.exact else "--"
            print(f"[REDUCE] [{mark}] {row.name:<16} {row.domain:<6} c={row.c:g} "
                  f"roots={[round(v, 12) for v in row.computed]} err={row.max_error:.1e}")
        exact = sum(r.exact for r in rows)
        print(f"[REDUCE] {exact}/{len(rows)} reductions exact")

        results = dict(state.get("results", {}))
        results["reduction"] = rows
        update = {"results": results, "status": "reduction_complete"}
        log_execution(self.run_dir, "reducer", update, metadata={"exact": exact, "rows": len(rows)})
        return update
