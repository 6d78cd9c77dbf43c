//! Block metrics on Σ×[0,T] built from a flow, their pairwise L² distances,
//! and the curvature quantities used to compare the spatial slices with a
//! round sphere.

mod moser;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Scenario;
use crate::error::{Error, Result};
use crate::field::{Sym2, SymTensorField2};
use crate::flow::FlowTrace;
use crate::geometry::{gauss_curvature, intrinsic_gauss_curvature};
use crate::grid::SphericalGrid;
use crate::timeseries;

pub use moser::{moser_reparam, reparameterize, ReparamMap, Slice, AREA_TOL, MOSER_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    HatG,
    G1,
    G2,
    G2Prime,
    G3Flat,
    G3Schwarz,
    Delta,
    GS,
}

impl BlockKind {
    pub const ALL: [BlockKind; 8] = [
        BlockKind::HatG,
        BlockKind::G1,
        BlockKind::G2,
        BlockKind::G2Prime,
        BlockKind::G3Flat,
        BlockKind::G3Schwarz,
        BlockKind::Delta,
        BlockKind::GS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::HatG => "hat_g",
            BlockKind::G1 => "g1",
            BlockKind::G2 => "g2",
            BlockKind::G2Prime => "g2prime",
            BlockKind::G3Flat => "g3_flat",
            BlockKind::G3Schwarz => "g3_schwarz",
            BlockKind::Delta => "delta",
            BlockKind::GS => "g_s",
        }
    }
}

/// lapse² dt² + g(x, t), sampled at the flow output times.
#[derive(Debug, Clone)]
pub struct MetricBlock {
    pub kind: BlockKind,
    pub grid: Arc<SphericalGrid>,
    pub times: Vec<f64>,
    /// `lapse_sq[k][node]`.
    pub lapse_sq: Vec<Vec<f64>>,
    /// `spatial[k][node]`.
    pub spatial: Vec<Vec<Sym2>>,
}

impl MetricBlock {
    fn validate(&self) -> Result<()> {
        for (l, g) in self.lapse_sq.iter().zip(&self.spatial) {
            for (node, (l, g)) in l.iter().zip(g).enumerate() {
                if !(*l > 0.0 && l.is_finite() && g.is_positive_definite()) {
                    return Err(Error::NotPositiveDefinite { node });
                }
            }
        }
        Ok(())
    }

    /// √(lapse² det g) / sin θ at time index k: the density of dV against dσ dt.
    pub fn volume_density(&self, k: usize) -> Vec<f64> {
        self.lapse_sq[k]
            .iter()
            .zip(&self.spatial[k])
            .zip(&self.grid.node_sines())
            .map(|((l, g), s)| (l * g.det()).sqrt() / s)
            .collect()
    }

    /// Total volume of Σ×[0,T].
    pub fn volume(&self) -> f64 {
        let per: Vec<f64> = (0..self.times.len())
            .map(|k| self.grid.integrate_round(&self.volume_density(k)))
            .collect();
        timeseries::simpson(&self.times, &per)
    }

    fn same_sampling(&self, o: &Self) -> bool {
        self.grid == o.grid && self.times == o.times
    }
}

/// The eight comparison blocks for one flow, in the area-preserving labels.
#[derive(Debug, Clone)]
pub struct ChainBlocks {
    pub r0: f64,
    pub m: f64,
    pub reparam: ReparamMap,
    pub h_bar: Vec<f64>,
    pub blocks: Vec<MetricBlock>,
}

impl ChainBlocks {
    pub fn get(&self, kind: BlockKind) -> &MetricBlock {
        self.blocks
            .iter()
            .find(|b| b.kind == kind)
            .expect("every kind is assembled")
    }
}

/// (r₀²/4)(1 − 2m e^{−t/2}/r₀)^{−1} e^t.
pub fn schwarzschild_lapse_sq(t: f64, r0: f64, m: f64) -> f64 {
    0.25 * r0 * r0 * t.exp() / (1.0 - 2.0 * m / r0 * (-0.5 * t).exp())
}

pub fn flat_lapse_sq(t: f64, r0: f64) -> f64 {
    0.25 * r0 * r0 * t.exp()
}

pub fn assemble_blocks(trace: &FlowTrace, m: f64, r0: f64) -> Result<ChainBlocks> {
    if !(m >= 0.0) || 2.0 * m >= r0 {
        return Err(Error::InvalidParameter(format!(
            "Schwarzschild lapse needs 0 <= 2m < r0 (m = {m}, r0 = {r0})"
        )));
    }
    let reparam = moser_reparam(&trace.states[0].g, r0)?;
    let slices = reparameterize(trace, &reparam)?;
    let grid = trace.grid().clone();
    let times: Vec<f64> = slices.iter().map(|s| s.t).collect();
    let t_final = *times.last().expect("non-empty trace");
    let mut h_bar = Vec::with_capacity(slices.len());
    for s in &slices {
        let hd: Vec<f64> = s.h.iter().zip(&s.density).map(|(h, d)| h * d).collect();
        let v = grid.integrate_round(&hd) / grid.integrate_round(&s.density);
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("average mean curvature {v} at t = {}", s.t)));
        }
        h_bar.push(v);
    }
    let n = grid.len();
    let round: Vec<Sym2> = SymTensorField2::round(grid.clone(), 1.0).values;
    let g0 = &slices[0].g;
    let g_final = &slices.last().expect("non-empty trace").g;
    let scaled = |g: &[Sym2], c: f64| -> Vec<Sym2> { g.iter().map(|m| m.scale(c)).collect() };
    let constant = |f: &dyn Fn(f64) -> f64| -> Vec<Vec<f64>> { times.iter().map(|&t| vec![f(t); n]).collect() };
    let block = |kind, lapse_sq: Vec<Vec<f64>>, spatial: Vec<Vec<Sym2>>| MetricBlock {
        kind,
        grid: grid.clone(),
        times: times.clone(),
        lapse_sq,
        spatial,
    };
    let from_h_bar: Vec<Vec<f64>> = h_bar.iter().map(|h| vec![1.0 / (h * h); n]).collect();
    let current: Vec<Vec<Sym2>> = slices.iter().map(|s| s.g.clone()).collect();
    let frozen: Vec<Vec<Sym2>> = times.iter().map(|t| scaled(g0, t.exp())).collect();
    let frozen_final: Vec<Vec<Sym2>> = times.iter().map(|t| scaled(g_final, (t - t_final).exp())).collect();
    let model: Vec<Vec<Sym2>> = times.iter().map(|t| scaled(&round, r0 * r0 * t.exp())).collect();
    let flat = constant(&|t| flat_lapse_sq(t, r0));
    let schw = constant(&|t| schwarzschild_lapse_sq(t, r0, m));
    let blocks = vec![
        block(
            BlockKind::HatG,
            slices.iter().map(|s| s.h.iter().map(|h| 1.0 / (h * h)).collect()).collect(),
            current.clone(),
        ),
        block(BlockKind::G1, from_h_bar.clone(), current),
        block(BlockKind::G2, from_h_bar.clone(), frozen.clone()),
        block(BlockKind::G2Prime, from_h_bar, frozen_final),
        block(BlockKind::G3Flat, flat.clone(), frozen.clone()),
        block(BlockKind::G3Schwarz, schw.clone(), frozen),
        block(BlockKind::Delta, flat, model.clone()),
        block(BlockKind::GS, schw, model),
    ];
    for b in &blocks {
        b.validate()?;
    }
    Ok(ChainBlocks {
        r0,
        m,
        reparam,
        h_bar,
        blocks,
    })
}

/// How |A − B|² is measured.
#[derive(Debug, Clone, Copy)]
pub enum Norm<'a> {
    /// (ΔA_tt)² + |ΔA_spatial|²_σ: raw coefficients, spatial part against the unit round metric.
    Coefficient,
    /// Full block norm N^{μα}N^{νβ}ΔA_{μν}ΔA_{αβ}.
    Metric(&'a MetricBlock),
}

/// ∫_Σ |A − B|² dV_t at every sampled time, dV taken from `volume`.
pub fn l2_block_profile(a: &MetricBlock, b: &MetricBlock, norm: Norm<'_>, volume: &MetricBlock) -> Result<Vec<f64>> {
    if !a.same_sampling(b) || !a.same_sampling(volume) {
        return Err(Error::SamplingMismatch);
    }
    if let Norm::Metric(nb) = norm {
        if !a.same_sampling(nb) {
            return Err(Error::SamplingMismatch);
        }
    }
    let grid = &a.grid;
    let sin2: Vec<f64> = grid.node_sines().iter().map(|s| s * s).collect();
    Ok((0..a.times.len())
        .map(|k| {
            let dv = volume.volume_density(k);
            let f: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let dl = a.lapse_sq[k][i] - b.lapse_sq[k][i];
                    let ds = a.spatial[k][i].sub(&b.spatial[k][i]);
                    let v = match norm {
                        Norm::Coefficient => dl * dl + ds.norm_sq_with(&Sym2::new(1.0, 0.0, 1.0 / sin2[i])),
                        Norm::Metric(nb) => {
                            let r = dl / nb.lapse_sq[k][i];
                            r * r + ds.norm_sq_with(&nb.spatial[k][i].inverse())
                        }
                    };
                    v * dv[i]
                })
                .collect();
            grid.integrate_round(&f)
        })
        .collect())
}

/// ∫₀ᵀ∫_Σ |A − B|² dV, Simpson in time.
pub fn l2_block_distance(a: &MetricBlock, b: &MetricBlock, norm: Norm<'_>, volume: &MetricBlock) -> Result<f64> {
    let p = l2_block_profile(a, b, norm, volume)?;
    Ok(timeseries::simpson(&a.times, &p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormChoice {
    Coefficient,
    Metric(BlockKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeForm {
    /// dμ dt / H.
    HatG,
    /// r₀³e^{3t/2}/2 dσ dt.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convention {
    pub norm: NormChoice,
    pub volume: VolumeForm,
}

impl Convention {
    pub const DELTA: Convention = Convention {
        norm: NormChoice::Metric(BlockKind::Delta),
        volume: VolumeForm::Delta,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance {
    pub a: BlockKind,
    pub b: BlockKind,
    pub convention: Convention,
    pub value: f64,
    /// Spatial integral at each output time.
    pub profile: Vec<f64>,
}

impl PairDistance {
    pub fn label(&self) -> String {
        format!("{}~{}", self.a.name(), self.b.name())
    }
}

/// Minkowski check in one fixed convention: total ≤ (Σ√leg)².
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCheck {
    pub legs: Vec<f64>,
    pub total: f64,
    pub bound: f64,
}

impl TriangleCheck {
    pub fn holds(&self) -> bool {
        self.total <= self.bound * (1.0 + 1e-10) + 1e-300
    }
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub scenario: Scenario,
    pub r0: f64,
    pub m: f64,
    pub times: Vec<f64>,
    pub pairs: Vec<PairDistance>,
    pub triangle: TriangleCheck,
    pub density_error: f64,
}

impl ChainReport {
    pub fn distance(&self, a: BlockKind, b: BlockKind) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| (p.a, p.b) == (a, b) || (p.a, p.b) == (b, a))
            .map(|p| p.value)
    }

    /// |ĝ − δ|²_δ (pmt) or |ĝ − g_s|²_δ (rpi).
    pub fn target_distance(&self) -> f64 {
        let (_, target) = scenario_kinds(self.scenario);
        self.distance(BlockKind::HatG, target).expect("always reported")
    }
}

fn scenario_kinds(s: Scenario) -> (BlockKind, BlockKind) {
    match s {
        Scenario::Pmt => (BlockKind::G3Flat, BlockKind::Delta),
        Scenario::Rpi => (BlockKind::G3Schwarz, BlockKind::GS),
    }
}

fn pair(blocks: &ChainBlocks, a: BlockKind, b: BlockKind, convention: Convention) -> Result<PairDistance> {
    let norm = match convention.norm {
        NormChoice::Coefficient => Norm::Coefficient,
        NormChoice::Metric(k) => Norm::Metric(blocks.get(k)),
    };
    let volume = match convention.volume {
        VolumeForm::HatG => blocks.get(BlockKind::HatG),
        VolumeForm::Delta => blocks.get(BlockKind::Delta),
    };
    let (ba, bb) = (blocks.get(a), blocks.get(b));
    let profile = l2_block_profile(ba, bb, norm, volume)?;
    Ok(PairDistance {
        a,
        b,
        convention,
        value: timeseries::simpson(&ba.times, &profile),
        profile,
    })
}

/// Pairwise distances along ĝ → g₁ → g₂ → g₃ → model, each with the norm and
/// volume of its own estimate, the totals, and a same-convention triangle check.
pub fn chain_report_from(blocks: &ChainBlocks, scenario: Scenario) -> Result<ChainReport> {
    use BlockKind::*;
    let (g3, target) = scenario_kinds(scenario);
    let coeff = Convention {
        norm: NormChoice::Coefficient,
        volume: VolumeForm::HatG,
    };
    let g3_norm = Convention {
        norm: NormChoice::Metric(G3Flat),
        volume: VolumeForm::HatG,
    };
    let pairs = vec![
        pair(blocks, HatG, G1, coeff)?,
        pair(blocks, G1, G2, g3_norm)?,
        pair(blocks, G1, G2Prime, g3_norm)?,
        pair(blocks, G2, g3, coeff)?,
        pair(blocks, g3, target, Convention::DELTA)?,
        pair(
            blocks,
            HatG,
            g3,
            Convention {
                norm: NormChoice::Metric(g3),
                volume: VolumeForm::HatG,
            },
        )?,
        pair(blocks, HatG, target, Convention::DELTA)?,
    ];
    let legs = [(HatG, G1), (G1, G2), (G2, g3), (g3, target)]
        .iter()
        .map(|&(a, b)| pair(blocks, a, b, Convention::DELTA).map(|p| p.value))
        .collect::<Result<Vec<f64>>>()?;
    let total = pairs.last().expect("non-empty").value;
    let bound = legs.iter().map(|v| v.sqrt()).sum::<f64>().powi(2);
    Ok(ChainReport {
        scenario,
        r0: blocks.r0,
        m: blocks.m,
        times: blocks.get(HatG).times.clone(),
        pairs,
        triangle: TriangleCheck { legs, total, bound },
        density_error: blocks.reparam.density_error,
    })
}

/// Assembles the blocks with r₀ from the initial area and reports the chain.
pub fn chain_report(trace: &FlowTrace, m: f64, scenario: Scenario) -> Result<ChainReport> {
    chain_report_from(&assemble_blocks(trace, m, trace.r0)?, scenario)
}

/// (16/|Σ_t|) ∫ (K − e^{−t}/r₀²)² dμ at each output time.
pub fn roundness_deficit(trace: &FlowTrace, r0: f64) -> Result<Vec<f64>> {
    trace
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let k_vals = match trace.fields.get(k) {
                Some(f) => f.gauss.clone(),
                None => gauss_curvature(s, &trace.ambient)?.extrinsic.values,
            };
            let lambda = (-s.t).exp() / (r0 * r0);
            let d: Vec<f64> = k_vals.iter().map(|k| (k - lambda).powi(2)).collect();
            Ok(16.0 * s.integrate(&d) / s.area)
        })
        .collect()
}

/// Scalar curvature of (r₀²e^t/4)dt² + e^t g₀ with g₀ of Gauss curvature K.
pub fn warped_scalar(k: f64, t: f64, r0: f64) -> f64 {
    let s2 = r0 * r0 * t.exp();
    (-2.0 + 2.0 * k * r0 * r0) / s2
}

/// Scalar curvature of a flat-lapse g₃ block at every (t, node), K taken from
/// its t = 0 slice.
pub fn warped_scalar_curvature(g3: &MetricBlock, r0: f64) -> Result<Vec<Vec<f64>>> {
    if g3.kind != BlockKind::G3Flat {
        return Err(Error::InvalidParameter(format!(
            "warped scalar curvature needs a g3_flat block, got {}",
            g3.kind.name()
        )));
    }
    let t0 = g3.times[0];
    let g0: Vec<Sym2> = g3.spatial[0].iter().map(|m| m.scale((-t0).exp())).collect();
    let k = intrinsic_gauss_curvature(&SymTensorField2::new(g3.grid.clone(), g0))?;
    Ok(g3
        .times
        .iter()
        .map(|&t| k.values.iter().map(|&k| warped_scalar(k, t, r0)).collect())
        .collect())
}

/// Volume of the flat annulus r₀ ≤ s ≤ r₀e^{T/2}.
pub fn annulus_volume(r0: f64, t_final: f64) -> f64 {
    4.0 * PI / 3.0 * r0.powi(3) * ((1.5 * t_final).exp() - 1.0)
}
