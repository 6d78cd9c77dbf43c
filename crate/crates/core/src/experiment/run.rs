use serde::Serialize;

use crate::ambient::AmbientKind;
use crate::chain::{assemble_blocks, chain_report_from, roundness_deficit, ChainReport};
use crate::diagnostics::{
    crucial_identity_residual, dt_int_h2_identity, geroch_worst_drop, h_concentration, integrated_crucial,
    length_bounds, sandwich_check, weak_ricci_identity, TestFunction,
};
use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowTrace, InitialSurface};

use super::report::{per_time_table, Table};
use super::{ExperimentConfig, Member, ScenarioKind, Tolerances, SCHEMA_VERSION};

/// One assertion on a run: `value` must not exceed `limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

/// Per-member results. Field order is the summary CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub member: usize,
    pub parameter: f64,
    pub mass: f64,
    pub passed: bool,
    /// Names of failed checks, `;`-separated.
    pub failed_checks: String,
    pub error: String,
    pub m_h_initial: f64,
    pub m_h_final: f64,
    pub h_min: f64,
    pub a_max: f64,
    pub class_violations: usize,
    pub outside_class: bool,
    pub area_law_max: f64,
    pub lemma22_max: f64,
    pub crucial_max: f64,
    pub weak_ricci_max: f64,
    pub slack_statement: f64,
    pub slack_proof: f64,
    pub geroch_worst_drop: f64,
    pub sandwich_lower: f64,
    pub sandwich_upper: f64,
    pub length_lower: f64,
    pub length_upper: f64,
    pub roundness_max: f64,
    pub h_concentration_mid: f64,
    pub moser_density_error: f64,
    pub d_hat_g_g1: f64,
    pub d_g1_g2: f64,
    pub d_g1_g2prime: f64,
    pub d_g2_g3: f64,
    pub d_g3_target: f64,
    pub d_hat_g_g3: f64,
    pub d_hat_g_target: f64,
    pub triangle_total: f64,
    pub triangle_bound: f64,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub(crate) fn blank(member: &Member) -> Self {
        let nan = f64::NAN;
        Self {
            schema_version: SCHEMA_VERSION,
            member: member.index,
            parameter: member.parameter,
            mass: member.mass,
            passed: false,
            failed_checks: String::new(),
            error: String::new(),
            m_h_initial: nan,
            m_h_final: nan,
            h_min: nan,
            a_max: nan,
            class_violations: 0,
            outside_class: false,
            area_law_max: nan,
            lemma22_max: nan,
            crucial_max: nan,
            weak_ricci_max: nan,
            slack_statement: nan,
            slack_proof: nan,
            geroch_worst_drop: nan,
            sandwich_lower: nan,
            sandwich_upper: nan,
            length_lower: nan,
            length_upper: nan,
            roundness_max: nan,
            h_concentration_mid: nan,
            moser_density_error: nan,
            d_hat_g_g1: nan,
            d_g1_g2: nan,
            d_g1_g2prime: nan,
            d_g2_g3: nan,
            d_g3_target: nan,
            d_hat_g_g3: nan,
            d_hat_g_target: nan,
            triangle_total: nan,
            triangle_bound: nan,
            checks: Vec::new(),
        }
    }

    /// Largest of the identity residuals.
    pub fn worst_identity_residual(&self) -> f64 {
        [self.lemma22_max, self.crucial_max, self.weak_ricci_max]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub(crate) fn finish(&mut self) {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        self.failed_checks = failed.join(";");
        self.passed = self.error.is_empty() && failed.is_empty() && !self.checks.is_empty();
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub table: Table,
}

/// Flow, diagnostics and chain for one member. Failures end up in `summary.error`.
pub fn run_member(cfg: &ExperimentConfig, member: &Member) -> RunOutput {
    let mut summary = RunSummary::blank(member);
    let mut table = Table::default();
    if let Err(e) = evaluate(cfg, member, &mut summary, &mut table) {
        log::warn!("{} member {}: {e}", cfg.name, member.index);
        summary.error = e.to_string();
    }
    summary.finish();
    RunOutput { summary, table }
}

fn weak_ricci_functions(t_final: f64) -> [TestFunction; 3] {
    [
        TestFunction {
            a: 0.1 * t_final,
            b: 0.9 * t_final,
            l: 0,
            m: 0,
        },
        TestFunction {
            a: 0.0,
            b: t_final,
            l: 2,
            m: 0,
        },
        TestFunction {
            a: 0.2 * t_final,
            b: 0.7 * t_final,
            l: 1,
            m: 1,
        },
    ]
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn identities(trace: &FlowTrace, tol: &Tolerances, s: &mut RunSummary) -> Result<()> {
    let d = &trace.diagnostics;
    let a0 = d[0].area;
    s.area_law_max = max_of(d.iter().map(|r| {
        let want = a0 * r.t.exp();
        (r.area - want).abs() / want
    }));
    s.checks.push(Check::at_most("area_law", s.area_law_max, tol.area));
    if d.len() >= 3 {
        let interior = 1..d.len() - 1;
        let mut l22 = 0.0_f64;
        let mut cr = 0.0_f64;
        for k in interior {
            let (l, r) = dt_int_h2_identity(trace, k)?;
            l22 = l22.max((l - r).abs());
            cr = cr.max(crucial_identity_residual(trace, k)?.residual);
        }
        s.lemma22_max = l22;
        s.crucial_max = cr;
        s.checks.push(Check::at_most("lemma22", l22, tol.lemma22));
        s.checks.push(Check::at_most("crucial", cr, tol.crucial));
    }
    let t_final = d.last().expect("non-empty").t;
    let mut wr = 0.0_f64;
    for phi in weak_ricci_functions(t_final) {
        let (l, r) = weak_ricci_identity(trace, &phi)?;
        wr = wr.max((l - r).abs());
    }
    s.weak_ricci_max = wr;
    s.checks.push(Check::at_most("weak_ricci", wr, tol.weak_ricci));
    let ic = integrated_crucial(trace);
    s.slack_statement = ic.slack_statement;
    s.slack_proof = ic.slack_proof;
    s.checks.push(Check::at_most("slack_statement", -ic.slack_statement, tol.slack));
    s.checks.push(Check::at_most("slack_proof", -ic.slack_proof, tol.slack));
    s.geroch_worst_drop = geroch_worst_drop(trace);
    s.checks.push(Check::at_most("geroch", s.geroch_worst_drop, tol.geroch));
    Ok(())
}

fn bounds(trace: &FlowTrace, tol: &Tolerances, s: &mut RunSummary) -> Result<()> {
    let sw = sandwich_check(trace);
    s.sandwich_lower = sw.lower_margin;
    s.sandwich_upper = sw.upper_margin;
    s.checks.push(Check::at_most("sandwich", -sw.lower_margin.min(sw.upper_margin), tol.bounds));
    let lb = length_bounds(trace)?;
    s.length_lower = lb.lower_margin;
    s.length_upper = lb.upper_margin;
    s.checks.push(Check::at_most("length", -lb.lower_margin.min(lb.upper_margin), tol.bounds));
    Ok(())
}

fn record_chain(c: &ChainReport, s: &mut RunSummary) {
    let v: Vec<f64> = c.pairs.iter().map(|p| p.value).collect();
    [
        s.d_hat_g_g1,
        s.d_g1_g2,
        s.d_g1_g2prime,
        s.d_g2_g3,
        s.d_g3_target,
        s.d_hat_g_g3,
        s.d_hat_g_target,
    ] = [v[0], v[1], v[2], v[3], v[4], v[5], v[6]];
    s.triangle_total = c.triangle.total;
    s.triangle_bound = c.triangle.bound;
    s.moser_density_error = c.density_error;
}

/// Round start in a rotationally symmetric model: the chain must be exact.
fn is_exact_model(member: &Member) -> bool {
    matches!(
        member.flow.ambient.kind(),
        AmbientKind::Euclidean | AmbientKind::Schwarzschild
    ) && matches!(member.flow.initial, InitialSurface::Sphere { .. })
}

fn evaluate(cfg: &ExperimentConfig, member: &Member, s: &mut RunSummary, table: &mut Table) -> Result<()> {
    let trace = run_flow(&member.flow)?;
    if trace.diagnostics.is_empty() {
        return Err(Error::InvalidParameter("flow produced no diagnostics rows".into()));
    }
    let tol = cfg.tolerances();
    let d = &trace.diagnostics;
    s.m_h_initial = d[0].m_h;
    s.m_h_final = d[d.len() - 1].m_h;
    (s.h_min, s.a_max) = trace.recorded_bounds();
    s.class_violations = trace.class_violations.len();
    s.outside_class = trace.outside_class;
    let r0 = cfg.r0.unwrap_or(trace.r0);
    let roundness = roundness_deficit(&trace, r0)?;
    s.roundness_max = max_of(roundness.iter().copied());
    let mid = 0.5 * cfg.t_final;
    let k_mid = (0..trace.states.len())
        .min_by(|&a, &b| (trace.states[a].t - mid).abs().total_cmp(&(trace.states[b].t - mid).abs()))
        .expect("non-empty");
    s.h_concentration_mid = h_concentration(&trace.states[k_mid]);
    *table = per_time_table(member, d, &roundness, None)?;

    identities(&trace, &tol, s)?;
    bounds(&trace, &tol, s)?;

    let scenario = cfg.chain_scenario(member.mass);
    let chain = chain_report_from(&assemble_blocks(&trace, member.mass, r0)?, scenario)?;
    record_chain(&chain, s);
    s.checks.push(Check {
        name: "triangle".into(),
        value: chain.triangle.total,
        limit: chain.triangle.bound,
        passed: chain.triangle.holds(),
    });
    if cfg.scenario == ScenarioKind::IdentitySuite && is_exact_model(member) {
        let worst = max_of(chain.pairs.iter().map(|p| p.value));
        s.checks.push(Check::at_most("chain_exact", worst, tol.chain));
    }
    *table = per_time_table(member, d, &roundness, Some(&chain))?;
    Ok(())
}
