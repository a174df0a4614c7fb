//! Python bindings.
//!
//! Exposes the architecture model, failure traces, the simulator and the
//! experiment drivers. Planner and failure kinds are passed as strings.

use healsim::experiments::{run_analytical, Scenario};
use healsim::model::{ElementRef, FailureKind};
use healsim::planners::{calibrated_planning_s, validate::validate_rule_set, PlannerConfig, PlannerId};
use healsim::profiles::{generate_synthetic, named_trace, FailureTrace as CoreTrace, TraceLength};
use healsim::rules::RuleSet;
use healsim::sim::{run_simulation, PlanningTimeMode, SimulationConfig, SimulationResult as CoreResult};
use healsim::utility::{total_utility, UtilityLedger};
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn planner_id(name: &str) -> PyResult<PlannerId> {
    name.parse().map_err(value_err)
}

/// Runtime model of a multi-shop marketplace.
#[pyclass(module = "healsim_py")]
pub struct ArchitectureModel {
    inner: healsim::model::ArchitectureModel,
    ledger: UtilityLedger,
}

#[pymethods]
impl ArchitectureModel {
    #[new]
    #[pyo3(signature = (shops, seed = 0))]
    fn new(shops: usize, seed: u64) -> Self {
        let inner = healsim::model::ArchitectureModel::build(shops, seed);
        let ledger = UtilityLedger::new(&inner);
        ArchitectureModel { inner, ledger }
    }

    #[getter]
    fn shops(&self) -> usize {
        self.inner.shops().len()
    }

    #[getter]
    fn components(&self) -> usize {
        self.inner.live_component_count()
    }

    #[getter]
    fn connectors(&self) -> usize {
        self.inner.connectors().len()
    }

    /// Incrementally maintained utility.
    fn utility(&self) -> f64 {
        self.ledger.total()
    }

    /// Utility by full pattern search.
    fn recompute_utility(&self) -> f64 {
        total_utility(&self.inner)
    }

    /// Injects a CF1, CF2 or CF3 failure at `(shop, slot)`; returns the number of change events.
    fn inject(&mut self, kind: &str, shop: usize, slot: usize) -> PyResult<usize> {
        let kind: FailureKind = kind.parse().map_err(value_err)?;
        let id = *self
            .inner
            .shops()
            .get(shop)
            .and_then(|s| s.components.get(slot))
            .ok_or_else(|| PyIndexError::new_err(format!("no component at shop {shop} slot {slot}")))?;
        let events = self
            .inner
            .inject_failure(kind, ElementRef::Component(id), 0.0)
            .map_err(value_err)?;
        self.ledger.observe(&self.inner, &events);
        Ok(events.len())
    }

    /// Current issues as `(kind, element)` pairs.
    fn issues(&self) -> Vec<(String, String)> {
        healsim::analyzer::issue_oracle(&self.inner)
            .into_iter()
            .map(|(key, kind)| (kind.to_string(), key.anchor.to_string()))
            .collect()
    }

    fn snapshot(&self) -> String {
        self.inner.snapshot()
    }
}

/// A failure trace: timed failure entries grouped into bursts.
#[pyclass(module = "healsim_py", skip_from_py_object)]
#[derive(Clone)]
pub struct FailureTrace {
    inner: CoreTrace,
}

#[pymethods]
impl FailureTrace {
    /// Trace of a named model or variant (`grid5000`, `lri`, `deug`, `uniform`, `single`, `bigburst`).
    #[staticmethod]
    #[pyo3(signature = (name, seed, length = "short"))]
    fn named(name: &str, seed: u64, length: &str) -> PyResult<Self> {
        let length: TraceLength = length.parse().map_err(value_err)?;
        let inner = named_trace(name, length, seed).map_err(value_err)?;
        Ok(FailureTrace { inner })
    }

    /// `runs` groups of `fgs` simultaneous failures, `iat_s` apart.
    #[staticmethod]
    #[pyo3(signature = (fgs, runs, iat_s, seed = 0))]
    fn synthetic(fgs: usize, runs: usize, iat_s: f64, seed: u64) -> PyResult<Self> {
        let inner = generate_synthetic(fgs, runs, iat_s, seed).map_err(value_err)?;
        Ok(FailureTrace { inner })
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        let inner = CoreTrace::from_csv(text).map_err(value_err)?;
        Ok(FailureTrace { inner })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn density(&self) -> usize {
        self.inner.density()
    }

    #[getter]
    fn duration_s(&self) -> f64 {
        self.inner.duration_s
    }

    fn group_sizes(&self) -> Vec<usize> {
        self.inner.group_sizes()
    }

    fn __len__(&self) -> usize {
        self.inner.entries.len()
    }
}

/// Outcome of one simulation.
#[pyclass(module = "healsim_py")]
pub struct SimulationResult {
    inner: CoreResult,
}

#[pymethods]
impl SimulationResult {
    #[getter]
    fn reward(&self) -> f64 {
        self.inner.reward()
    }

    #[getter]
    fn initial_utility(&self) -> f64 {
        self.inner.initial_utility
    }

    #[getter]
    fn final_utility(&self) -> f64 {
        self.inner.final_utility
    }

    #[getter]
    fn runs(&self) -> usize {
        self.inner.runs.len()
    }

    #[getter]
    fn injected(&self) -> usize {
        self.inner.injected
    }

    #[getter]
    fn rules_ok(&self) -> usize {
        self.inner.rules_ok
    }

    #[getter]
    fn rules_failed(&self) -> usize {
        self.inner.rules_failed
    }

    #[getter]
    fn unresolved(&self) -> usize {
        self.inner.unresolved
    }

    /// Utility breakpoints as `(time_s, utility)` pairs.
    fn timeline(&self) -> Vec<(f64, f64)> {
        self.inner.timeline.points().to_vec()
    }

    /// Executed rules as `(start_s, end_s, failure, action, success)`.
    fn executions(&self) -> Vec<(f64, f64, String, String, bool)> {
        self.inner
            .executions
            .iter()
            .map(|e| (e.start_s, e.end_s, e.failure.to_string(), e.action.to_string(), e.success))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SimulationResult(reward={:.3}, final_utility={:.3}, runs={})",
            self.inner.reward(),
            self.inner.final_utility,
            self.inner.runs.len()
        )
    }
}

/// Simulates one planner over a trace.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (trace, planner = "udriven", shops = 100, seed = 0, likelihood = 1.0, k = 100, planning_time_mode = "calibrated"))]
fn simulate(
    py: Python<'_>,
    trace: &FailureTrace,
    planner: &str,
    shops: usize,
    seed: u64,
    likelihood: f64,
    k: usize,
    planning_time_mode: &str,
) -> PyResult<SimulationResult> {
    let mut config = SimulationConfig::new(shops, PlannerConfig::default_for(planner_id(planner)?), seed);
    config.likelihood = likelihood;
    config.k = k;
    config.planning_time_mode = planning_time_mode.parse::<PlanningTimeMode>().map_err(value_err)?;
    let trace = trace.inner.clone();
    let inner = py
        .detach(move || run_simulation(&config, &trace))
        .map_err(runtime_err)?;
    Ok(SimulationResult { inner })
}

/// Replays a pinned scenario (`fig10a`, `fig10b`, `fig11`, `fig14`) for every planner.
#[pyfunction]
fn analytical(scenario: &str) -> PyResult<Vec<(String, SimulationResult)>> {
    let scenario: Scenario = scenario.parse().map_err(value_err)?;
    let outcome = run_analytical(scenario).map_err(runtime_err)?;
    Ok(outcome
        .results
        .into_iter()
        .map(|(p, inner)| (p.to_string(), SimulationResult { inner }))
        .collect())
}

/// Planning time in seconds interpolated from the reference measurements.
#[pyfunction]
fn calibrated_planning_time(planner: &str, components: usize, issues: usize) -> PyResult<f64> {
    Ok(calibrated_planning_s(planner_id(planner)?, components, issues))
}

/// Violated rule assumptions of the shipped rule set, one line each.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn validate_rules(seed: u64) -> Vec<String> {
    validate_rule_set(&RuleSet::default(), seed)
        .violations
        .iter()
        .map(|v| format!("{} violated by {}: {}", v.assumption, v.template, v.detail))
        .collect()
}

#[pymodule]
fn healsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ArchitectureModel>()?;
    m.add_class::<FailureTrace>()?;
    m.add_class::<SimulationResult>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(analytical, m)?)?;
    m.add_function(wrap_pyfunction!(calibrated_planning_time, m)?)?;
    m.add_function(wrap_pyfunction!(validate_rules, m)?)?;
    Ok(())
}
