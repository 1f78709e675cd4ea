from langgraph.graph import StateGraph, END

from peakonlab.state import ScenarioState
from peakonlab.nodes import (
    Initializer, PeakonRunner, PdeRunner, Certifier, Reducer, Prober, Tracer, Verifier, ArtifactWriter,
)


KIND_ROUTES = {
    "peakon-sim": "peakons",
    "periodic-peakon-sim": "peakons",
    "pde-sim": "pde",
    "characteristics": "pde",
    "breaking-check": "certify",
    "reduce-check": "reduce",
    "holder-probe": "probe",
}


def route_by_kind(state: ScenarioState) -> str:
    """Routing after initialization: one branch per scenario kind"""
    kind = state["config"].scenario.kind
    route = KIND_ROUTES[kind]
    print(f"[ROUTING] {kind} → {route}")
    return route


def should_simulate_after_certify(state: ScenarioState) -> str:
    """
    Routing after the certificate

    satisfied + [breaking] simulate + field datum → pde (observe the breaking time)
    otherwise → verify
    """
    cfg = state["config"]
    cert = state["results"]["certificate"]
    if cfg.breaking.simulate and cert.satisfied and "u0" in state["initial"]:
        print(f"[ROUTING] Certificate satisfied → simulate")
        return "pde"
    print(f"[ROUTING] Certificate {cert.status} → verify")
    return "verify"


def should_trace_after_pde(state: ScenarioState) -> str:
    if state["config"].scenario.kind == "characteristics":
        print(f"[ROUTING] PDE done → trace characteristics")
        return "trace"
    print(f"[ROUTING] PDE done → verify")
    return "verify"


def build_pipeline(run_dir: str = "run"):
    """Build the scenario pipeline

    Args:
        run_dir: Directory receiving logs and artifacts of this run
    """
    graph = StateGraph(ScenarioState)

    graph.add_node("initialize", Initializer(run_dir))
    graph.add_node("peakons", PeakonRunner(run_dir))
    graph.add_node("pde", PdeRunner(run_dir))
    graph.add_node("certify", Certifier(run_dir))
    graph.add_node("reduce", Reducer(run_dir))
    graph.add_node("probe", Prober(run_dir))
    graph.add_node("trace", Tracer(run_dir))
    graph.add_node("verify", Verifier(run_dir))
    graph.add_node("write", ArtifactWriter(run_dir))

    graph.set_entry_point("initialize")
    graph.add_conditional_edges(
        "initialize",
        route_by_kind,
        {"peakons": "peakons", "pde": "pde", "certify": "certify", "reduce": "reduce", "probe": "probe"}
    )
    graph.add_conditional_edges(
        "certify",
        should_simulate_after_certify,
        {"pde": "pde", "verify": "verify"}
    )
    graph.add_conditional_edges(
        "pde",
        should_trace_after_pde,
        {"trace": "trace", "verify": "verify"}
    )
    graph.add_edge("peakons", "verify")
    graph.add_edge("reduce", "verify")
    graph.add_edge("probe", "verify")
    graph.add_edge("trace", "verify")
    graph.add_edge("verify", "write")
    graph.add_edge("write", END)

    return graph.compile()


def run_pipeline(config, run_dir: str) -> ScenarioState:
    """Invoke the compiled pipeline on one validated ScenarioConfig"""
    pipeline = build_pipeline(run_dir)
    initial: ScenarioState = {"config": config, "run_dir": run_dir, "status": "initializing"}
    return pipeline.invoke(initial, config={"recursion_limit": 50})
