//! Seeded ensembles over Rayleigh fading.
//!
//! Draws are independent work units evaluated in parallel; every aggregate is
//! reduced in draw-index order, so the summary is bit-identical regardless of
//! scheduling.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics;
use crate::channel::{sample_channel, FadingConfig};
use crate::schemes::{self, Protected, RatePoint, RegionCurve, Scheme, SecondHop};
use crate::{Error, RateUnit, Result};

/// Slack used when comparing regions of different schemes.
pub const CONTAINMENT_TOL: f64 = 1e-9;

const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstHopCap {
    pub p_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub fading: FadingConfig,
    pub n_draws: usize,
    pub p_r: f64,
    /// Explicit power splits; takes precedence over `alpha_points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default = "default_alpha_points")]
    pub alpha_points: usize,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_first_hop: Option<FirstHopCap>,
    #[serde(default)]
    pub unit: RateUnit,
}

fn default_alpha_points() -> usize {
    schemes::DEFAULT_ALPHA_POINTS
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

impl EnsembleConfig {
    pub fn new(fading: FadingConfig, n_draws: usize, p_r: f64) -> Self {
        Self {
            fading,
            n_draws,
            p_r,
            alpha_grid: None,
            alpha_points: default_alpha_points(),
            schemes: default_schemes(),
            cap_first_hop: None,
            unit: RateUnit::Bits,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        match &self.alpha_grid {
            Some(g) => {
                schemes::validate_alpha_grid(g)?;
                Ok(g.clone())
            }
            None => schemes::uniform_alpha_grid(self.alpha_points),
        }
    }

    /// Enabled schemes, deduplicated, in canonical order.
    fn enabled(&self) -> Vec<Scheme> {
        let mut s = self.schemes.clone();
        s.sort();
        s.dedup();
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.fading.validate()?;
        if self.n_draws == 0 {
            return Err(Error::invalid("n_draws must be at least 1"));
        }
        if !(self.p_r > 0.0) || !self.p_r.is_finite() {
            return Err(Error::invalid(format!("p_r must be positive, got {}", self.p_r)));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("no schemes enabled"));
        }
        if let Some(cap) = &self.cap_first_hop {
            if !(cap.p_s > 0.0) {
                return Err(Error::invalid(format!("p_s must be positive, got {}", cap.p_s)));
            }
        }
        self.grid()?;
        Ok(())
    }
}

/// Everything computed for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawResult {
    pub index: u64,
    /// One region per enabled scheme, in canonical scheme order.
    pub regions: Vec<RegionCurve>,
    /// Mean over the alpha grid of the larger per-receiver gap between the
    /// outer bound and double null-space (when both are enabled).
    pub outer_double_gap: Option<f64>,
    /// Large-`M` relative gap at `alpha = 0.5` (needs two or more relays).
    pub large_m_gap: Option<f64>,
}

impl DrawResult {
    pub fn region(&self, scheme: Scheme) -> Option<&RegionCurve> {
        self.regions.iter().find(|r| r.scheme == scheme)
    }

    fn contains(&self, outer: Scheme, inner: Scheme) -> Option<bool> {
        Some(self.region(outer)?.contains(self.region(inner)?, CONTAINMENT_TOL))
    }
}

/// Mean over matched samples of `max(outer - double)` across both receivers.
pub fn outer_double_gap(outer: &RegionCurve, double: &RegionCurve) -> f64 {
    let n = outer.samples.len().min(double.samples.len());
    let total: f64 = outer
        .samples
        .iter()
        .zip(&double.samples)
        .map(|(o, d)| (o.point.r_d - d.point.r_d).max(o.point.r_e - d.point.r_e))
        .sum();
    total / n as f64
}

/// Evaluate every enabled scheme on realization `index`.
pub fn evaluate_draw(cfg: &EnsembleConfig, index: u64) -> Result<DrawResult> {
    let draw = || -> Result<DrawResult> {
        let grid = cfg.grid()?;
        let realization = sample_channel(&cfg.fading, index)?;
        let link = SecondHop::from(&realization);
        let cap = match &cfg.cap_first_hop {
            Some(c) => Some(realization.first_hop_capacity(c.p_s, cfg.unit)?),
            None => None,
        };
        let mut regions = Vec::new();
        for scheme in cfg.enabled() {
            let mut region = schemes::build_region(scheme, &link, cfg.p_r, &grid, cfg.unit)?;
            if let Some(c1) = cap {
                region = schemes::apply_first_hop_cap(&region, c1)?;
            }
            regions.push(region);
        }
        let mut result = DrawResult {
            index,
            regions,
            outer_double_gap: None,
            large_m_gap: None,
        };
        if let (Some(o), Some(d)) = (result.region(Scheme::Outer), result.region(Scheme::DoubleNull)) {
            result.outer_double_gap = Some(outer_double_gap(o, d));
        }
        if link.m() >= 2 {
            result.large_m_gap = Some(asymptotics::large_m_gap(&link, 0.5, cfg.p_r)?);
        }
        Ok(result)
    };
    draw().map_err(|e| Error::Draw {
        index,
        source: Box::new(e),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSample {
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protected: Option<Protected>,
    pub r_d: f64,
    pub r_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFrontier {
    pub scheme: Scheme,
    pub samples: Vec<MeanSample>,
}

/// Number of draws in which each containment held; `None` when one of the
/// two schemes was not enabled.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContainmentCounts {
    pub outer_contains_single_union: Option<u64>,
    pub single_union_contains_double: Option<u64>,
    pub double_contains_tdma: Option<u64>,
    /// Outer contains single union and single union contains double.
    pub outer_single_double_chain: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub draws: u64,
    pub m: usize,
    pub p_r: f64,
    pub unit: RateUnit,
    /// Pointwise mean of every sample over draws, matched by position.
    pub mean_frontier: Vec<MeanFrontier>,
    pub containment: ContainmentCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_double_gap: Option<GapStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_m_gap: Option<GapStats>,
}

impl EnsembleSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

struct Accumulator {
    draws: u64,
    sums: Vec<(Scheme, Vec<MeanSample>)>,
    counts: [u64; 4],
    gap: Option<(f64, f64)>,
    large_m: Option<(f64, f64)>,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            draws: 0,
            sums: Vec::new(),
            counts: [0; 4],
            gap: None,
            large_m: None,
        }
    }

    fn add(&mut self, d: &DrawResult) {
        if self.draws == 0 {
            self.sums = d
                .regions
                .iter()
                .map(|r| {
                    let zeros = r
                        .samples
                        .iter()
                        .map(|s| MeanSample {
                            alpha: s.alpha,
                            protected: s.protected,
                            r_d: 0.0,
                            r_e: 0.0,
                        })
                        .collect();
                    (r.scheme, zeros)
                })
                .collect();
        }
        for ((_, acc), region) in self.sums.iter_mut().zip(&d.regions) {
            for (a, s) in acc.iter_mut().zip(&region.samples) {
                a.r_d += s.point.r_d;
                a.r_e += s.point.r_e;
            }
        }
        let os = d.contains(Scheme::Outer, Scheme::SingleNullUnion);
        let sd = d.contains(Scheme::SingleNullUnion, Scheme::DoubleNull);
        let dt = d.contains(Scheme::DoubleNull, Scheme::Tdma);
        let chain = os.zip(sd).map(|(a, b)| a && b);
        for (slot, flag) in self.counts.iter_mut().zip([os, sd, dt, chain]) {
            *slot += u64::from(flag == Some(true));
        }
        let fold = |acc: Option<(f64, f64)>, v: Option<f64>| match (acc, v) {
            (_, None) => acc,
            (None, Some(v)) => Some((v, v)),
            (Some((s, m)), Some(v)) => Some((s + v, m.max(v))),
        };
        self.gap = fold(self.gap, d.outer_double_gap);
        self.large_m = fold(self.large_m, d.large_m_gap);
        self.draws += 1;
    }

    fn finish(self, cfg: &EnsembleConfig) -> EnsembleSummary {
        let n = self.draws as f64;
        let enabled = cfg.enabled();
        let has = |s: Scheme| enabled.contains(&s);
        let count = |i: usize, ok: bool| ok.then_some(self.counts[i]);
        EnsembleSummary {
            draws: self.draws,
            m: cfg.fading.m,
            p_r: cfg.p_r,
            unit: cfg.unit,
            mean_frontier: self
                .sums
                .into_iter()
                .map(|(scheme, samples)| MeanFrontier {
                    scheme,
                    samples: samples
                        .into_iter()
                        .map(|s| MeanSample {
                            r_d: s.r_d / n,
                            r_e: s.r_e / n,
                            ..s
                        })
                        .collect(),
                })
                .collect(),
            containment: ContainmentCounts {
                outer_contains_single_union: count(0, has(Scheme::Outer) && has(Scheme::SingleNullUnion)),
                single_union_contains_double: count(1, has(Scheme::SingleNullUnion) && has(Scheme::DoubleNull)),
                double_contains_tdma: count(2, has(Scheme::DoubleNull) && has(Scheme::Tdma)),
                outer_single_double_chain: count(
                    3,
                    has(Scheme::Outer) && has(Scheme::SingleNullUnion) && has(Scheme::DoubleNull),
                ),
            },
            outer_double_gap: self.gap.map(|(s, m)| GapStats { mean: s / n, max: m }),
            large_m_gap: self.large_m.map(|(s, m)| GapStats { mean: s / n, max: m }),
        }
    }
}

/// Aggregate per-draw results in draw-index order, whatever order they
/// arrive in.
pub fn aggregate(cfg: &EnsembleConfig, mut draws: Vec<DrawResult>) -> EnsembleSummary {
    draws.sort_by_key(|d| d.index);
    let mut acc = Accumulator::new();
    for d in &draws {
        acc.add(d);
    }
    acc.finish(cfg)
}

pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleSummary> {
    run_ensemble_with(cfg, |_| Ok(()))
}

/// Run the ensemble and write one region CSV per draw into `dir`, named by
/// the zero-padded draw index.
pub fn run_ensemble_to_dir(cfg: &EnsembleConfig, dir: &Path) -> Result<EnsembleSummary> {
    std::fs::create_dir_all(dir)?;
    run_ensemble_with(cfg, |d| {
        let path = dir.join(format!("draw_{:06}.csv", d.index));
        std::fs::write(path, schemes::region_csv(&d.regions, false))?;
        Ok(())
    })
}

fn run_ensemble_with(
    cfg: &EnsembleConfig,
    mut per_draw: impl FnMut(&DrawResult) -> Result<()>,
) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let mut acc = Accumulator::new();
    let n = cfg.n_draws as u64;
    let mut start = 0u64;
    while start < n {
        let end = (start + CHUNK as u64).min(n);
        let batch: Vec<Result<DrawResult>> = (start..end).into_par_iter().map(|i| evaluate_draw(cfg, i)).collect();
        for r in batch {
            let d = r?;
            per_draw(&d)?;
            acc.add(&d);
        }
        start = end;
    }
    Ok(acc.finish(cfg))
}

/// Per-receiver sample means, handy for tests and reports.
pub fn mean_point(points: &[RatePoint]) -> RatePoint {
    let n = points.len() as f64;
    let (d, e) = points.iter().fold((0.0, 0.0), |(d, e), p| (d + p.r_d, e + p.r_e));
    RatePoint { r_d: d / n, r_e: e / n }
}
