//! Runs every solver on one instance and checks that they agree.
//!
//! Exact methods must match the recursive value with zero tolerance.
//! Stochastic methods must land within `sigmas` standard errors. The
//! ε-perturbation at the default ε must be within `epsilon_tolerance`
//! (absolute, since the exact value can be tiny).

use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::hypervolume::estimate_volume;
use crate::instance::{group, Instance};
use crate::montecarlo::{simulate, Policy, SimConfig};
use crate::rational::{format_decimal, ratio, Probability, Rational};
use crate::recursive::p_a_wins_recursive;
use crate::residue::{default_epsilon, p_a_wins_auto, p_a_wins_closed_form, p_a_wins_epsilon};

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckConfig {
    pub trials: u64,
    pub samples: u64,
    pub seed: u64,
    pub policy: Policy,
    pub sigmas: f64,
    pub epsilon_tolerance: Rational,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self {
            trials: 200_000,
            samples: 1_000_000,
            seed: 0,
            policy: Policy::Frontmost,
            sigmas: 4.0,
            epsilon_tolerance: ratio(1, 1000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodRow {
    pub method: String,
    /// Exact `p/q` for deterministic methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrosscheckReport {
    pub exact: Probability,
    pub rows: Vec<MethodRow>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_disagreement: Option<String>,
}

fn exact_row(method: &str, value: &Probability, exact: &Probability) -> MethodRow {
    MethodRow {
        method: method.to_string(),
        value: Some(value.to_string()),
        decimal: value.decimal(),
        std_error: None,
        agrees: value == exact,
    }
}

fn stochastic_row(method: &str, estimate: f64, std_error: f64, agrees: bool) -> MethodRow {
    MethodRow {
        method: method.to_string(),
        value: None,
        decimal: format!("{estimate:.6}"),
        std_error: Some(std_error),
        agrees,
    }
}

pub fn crosscheck(inst: &Instance, cfg: &CrosscheckConfig) -> Result<CrosscheckReport> {
    inst.require_both_sides()?;
    let exact = p_a_wins_recursive(inst)?;
    let grouped = group(inst);
    let mut rows = vec![exact_row("recursive", &exact, &exact)];

    let residue = p_a_wins_auto(inst)?;
    rows.push(exact_row(residue.method.as_str(), &residue.value, &exact));

    if let Ok(closed) = p_a_wins_closed_form(&grouped) {
        rows.push(exact_row(closed.method.as_str(), &closed.value, &exact));
    }

    let eps = default_epsilon(&grouped);
    let approx = p_a_wins_epsilon(&grouped, &eps)?;
    let abs_error = (approx.value.value() - exact.value()).abs();
    rows.push(MethodRow {
        method: "epsilon".to_string(),
        value: Some(approx.value.to_string()),
        decimal: approx.value.decimal(),
        std_error: None,
        agrees: abs_error <= cfg.epsilon_tolerance,
    });

    let sim = simulate(inst, &SimConfig::new(cfg.trials, cfg.seed).with_policy(cfg.policy))?;
    rows.push(stochastic_row(
        "montecarlo",
        sim.estimate,
        sim.std_error,
        sim.agrees_with(exact.value(), cfg.sigmas),
    ));

    let vol = estimate_volume(inst, cfg.samples, cfg.seed)?;
    rows.push(stochastic_row(
        "hypervolume",
        vol.estimate,
        vol.std_error,
        vol.agrees_with(exact.value(), cfg.sigmas),
    ));

    let first_disagreement = rows.iter().find(|r| !r.agrees).map(|r| {
        format!(
            "{} gave {} but the exact value is {} ({})",
            r.method,
            r.value.clone().unwrap_or_else(|| r.decimal.clone()),
            exact,
            format_decimal(exact.value()),
        )
    });
    Ok(CrosscheckReport {
        ok: first_disagreement.is_none(),
        exact,
        rows,
        first_disagreement,
    })
}

impl CrosscheckReport {
    /// Fixed-width table, one method per line; the exact value comes last
    /// since ε-perturbed fractions can be long.
    pub fn table(&self) -> String {
        let mut out = format!("{:<16} {:<18} {:<10} {:<7} {}\n", "method", "decimal", "std-error", "agrees", "value");
        for r in &self.rows {
            let se = r.std_error.map(|s| format!("{s:.2e}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<16} {:<18} {:<10} {:<7} {}\n",
                r.method,
                r.decimal,
                se,
                if r.agrees { "yes" } else { "NO" },
                r.value.as_deref().unwrap_or("-"),
            ));
        }
        out
    }
}
