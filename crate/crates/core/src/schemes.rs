//! Secrecy rate regions of the four relay strategies.
//!
//! All point operations take the relay power budget `p_r` and the split
//! `alpha` in `[0, 1]`: the stream for `D` gets `alpha * p_r` and the stream
//! for `E` the rest (for TDMA `alpha` is a time fraction instead). Rates are
//! clamped at zero.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::format::fmt_f64_12;
use crate::pencil::{self, PencilSpec};
use crate::{cx, Error, RateUnit, Result};

/// Second-hop channels seen by both receivers.
#[derive(Debug, Clone, Copy)]
pub struct SecondHop<'a> {
    h: &'a [Complex64],
    z: &'a [Complex64],
    n0: f64,
}

impl<'a> SecondHop<'a> {
    pub fn new(h: &'a [Complex64], z: &'a [Complex64], n0: f64) -> Result<Self> {
        if h.is_empty() || h.len() != z.len() {
            return Err(Error::invalid(format!(
                "h and z must have equal nonzero length (got {} and {})",
                h.len(),
                z.len()
            )));
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::invalid(format!("n0 must be positive, got {n0}")));
        }
        Ok(Self { h, z, n0 })
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &'a [Complex64] {
        self.h
    }

    pub fn z(&self) -> &'a [Complex64] {
        self.z
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    fn swapped(&self) -> Self {
        Self {
            h: self.z,
            z: self.h,
            n0: self.n0,
        }
    }
}

impl<'a> From<&'a ChannelRealization> for SecondHop<'a> {
    fn from(r: &'a ChannelRealization) -> Self {
        Self {
            h: r.h(),
            z: r.z(),
            n0: r.n0(),
        }
    }
}

/// Relay weights for the two streams and the power split they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingWeights {
    pub w: Vec<Complex64>,
    pub u: Vec<Complex64>,
    pub alpha: f64,
}

impl BeamformingWeights {
    /// Total relay transmit power `|w|^2 + |u|^2`.
    pub fn power(&self) -> f64 {
        cx::norm_sqr(&self.w) + cx::norm_sqr(&self.u)
    }

    /// Whether the weights respect the split of `p_r` they claim.
    pub fn respects_budget(&self, p_r: f64, tol: f64) -> bool {
        cx::norm_sqr(&self.w) <= self.alpha * p_r + tol && cx::norm_sqr(&self.u) <= (1.0 - self.alpha) * p_r + tol
    }

    /// Roles of `D` and `E` exchanged.
    fn swapped(self) -> Self {
        Self {
            w: self.u,
            u: self.w,
            alpha: 1.0 - self.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r_d: f64,
    pub r_e: f64,
}

impl RatePoint {
    pub fn new(r_d: f64, r_e: f64) -> Self {
        Self {
            r_d: r_d.max(0.0),
            r_e: r_e.max(0.0),
        }
    }

    /// Componentwise `>=` with at least one strict inequality.
    pub fn dominates(&self, other: &RatePoint) -> bool {
        self.r_d >= other.r_d && self.r_e >= other.r_e && (self.r_d > other.r_d || self.r_e > other.r_e)
    }

    /// Componentwise `>=` up to an absolute slack.
    pub fn covers(&self, other: &RatePoint, tol: f64) -> bool {
        self.r_d >= other.r_d - tol && self.r_e >= other.r_e - tol
    }

    fn swapped(self) -> Self {
        Self {
            r_d: self.r_e,
            r_e: self.r_d,
        }
    }
}

/// Which receiver's stream is zero-forced away from the other receiver in
/// single null-space beamforming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protected {
    /// `u` lies in the null space of `h†`; `w` solves the pencil.
    E,
    /// `w` lies in the null space of `z†`; `u` solves the pencil.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SingleNullD,
    SingleNullE,
    SingleNullUnion,
    DoubleNull,
    Tdma,
    Outer,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::SingleNullD,
        Scheme::SingleNullE,
        Scheme::SingleNullUnion,
        Scheme::DoubleNull,
        Scheme::Tdma,
        Scheme::Outer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SingleNullD => "single_null_d",
            Scheme::SingleNullE => "single_null_e",
            Scheme::SingleNullUnion => "single_null_union",
            Scheme::DoubleNull => "double_null",
            Scheme::Tdma => "tdma",
            Scheme::Outer => "outer",
        }
    }

    /// Schemes that zero-force at least one stream need two or more relays.
    pub fn needs_null_space(self) -> bool {
        !matches!(self, Scheme::Tdma | Scheme::Outer)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_power(p_r: f64) -> Result<()> {
    if !(p_r > 0.0) || !p_r.is_finite() {
        return Err(Error::invalid(format!("relay power must be positive, got {p_r}")));
    }
    Ok(())
}

fn check_null_space(link: &SecondHop<'_>) -> Result<()> {
    if link.m() < 2 {
        return Err(Error::dimension(format!(
            "null-space beamforming needs at least 2 relays, got {}",
            link.m()
        )));
    }
    Ok(())
}

/// Component of `x` orthogonal to `v`. Two deflation passes keep the
/// residual at rounding level even when `x` is nearly parallel to `v`.
fn deflate(v: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
    let once = pencil::null_projector_apply(v, x)?;
    pencil::null_projector_apply(v, &once)
}

/// Secrecy rates achieved by arbitrary weights, treating the other stream as
/// interference at the intended receiver and as the eavesdropper's target at
/// the other:
///
/// ```text
/// R_d = log(1 + |h†w|^2 / (n0 + |h†u|^2)) - log(1 + |z†w|^2 / n0)
/// R_e = log(1 + |z†u|^2 / (n0 + |z†w|^2)) - log(1 + |h†u|^2 / n0)
/// ```
pub fn achievable_rates(link: &SecondHop<'_>, weights: &BeamformingWeights, unit: RateUnit) -> Result<RatePoint> {
    let m = link.m();
    if weights.w.len() != m || weights.u.len() != m {
        return Err(Error::invalid(format!(
            "weights of length {}/{} for {m} relays",
            weights.w.len(),
            weights.u.len()
        )));
    }
    let n0 = link.n0;
    let hw = cx::dot(link.h, &weights.w).norm_sqr();
    let hu = cx::dot(link.h, &weights.u).norm_sqr();
    let zw = cx::dot(link.z, &weights.w).norm_sqr();
    let zu = cx::dot(link.z, &weights.u).norm_sqr();
    let r_d = (hw / (n0 + hu)).ln_1p() - (zw / n0).ln_1p();
    let r_e = (zu / (n0 + zw)).ln_1p() - (hu / n0).ln_1p();
    Ok(RatePoint::new(unit.from_nats(r_d), unit.from_nats(r_e)))
}

/// Single null-space beamforming at one power split.
///
/// With `Protected::E` the weight for `D` maximizes the pencil
/// `(n0 I + alpha p_r h h†, n0 I + alpha p_r z z†)` and the weight for `E` is
/// the projection of `z` onto the null space of `h†`, so `D` hears nothing of
/// `E`'s stream. `Protected::D` is the mirror image.
pub fn single_null_point(
    link: &SecondHop<'_>,
    p_r: f64,
    alpha: f64,
    protected: Protected,
    unit: RateUnit,
) -> Result<(RatePoint, BeamformingWeights)> {
    check_null_space(link)?;
    check_alpha(alpha)?;
    check_power(p_r)?;
    match protected {
        Protected::E => single_null_e(link, p_r, alpha, unit),
        Protected::D => {
            let (pt, wts) = single_null_e(&link.swapped(), p_r, 1.0 - alpha, unit)?;
            Ok((pt.swapped(), BeamformingWeights { alpha, ..wts.swapped() }))
        }
    }
}

fn single_null_e(
    link: &SecondHop<'_>,
    p_r: f64,
    alpha: f64,
    unit: RateUnit,
) -> Result<(RatePoint, BeamformingWeights)> {
    let n0 = link.n0;
    let p_w = alpha * p_r;
    let p_u = (1.0 - alpha) * p_r;

    let (r_d, w) = if p_w > 0.0 {
        let spec = PencilSpec::new(link.h, link.z, p_w, p_w, n0)?;
        let eig = pencil::pencil_eigmax(&spec);
        (unit.log1p(eig.excess), cx::with_power(&eig.eigvec, p_w))
    } else {
        (0.0, vec![Complex64::new(0.0, 0.0); link.m()])
    };

    let n_t = n0 + cx::dot(link.z, &w).norm_sqr();
    let dir = deflate(link.h, link.z)?;
    let c_e = cx::norm_sqr(&dir);
    let u = cx::with_power(&dir, p_u);
    let r_e = unit.log1p(p_u * c_e / n_t);

    Ok((RatePoint::new(r_d, r_e), BeamformingWeights { w, u, alpha }))
}

/// Double null-space beamforming: each stream is zero-forced at the other
/// receiver, leaving two interference-free parallel links.
pub fn double_null_point(
    link: &SecondHop<'_>,
    p_r: f64,
    alpha: f64,
    unit: RateUnit,
) -> Result<(RatePoint, BeamformingWeights)> {
    check_null_space(link)?;
    check_alpha(alpha)?;
    check_power(p_r)?;
    let n0 = link.n0;
    let p_w = alpha * p_r;
    let p_u = (1.0 - alpha) * p_r;

    let dir_w = deflate(link.z, link.h)?;
    let dir_u = deflate(link.h, link.z)?;
    let w = cx::with_power(&dir_w, p_w);
    let u = cx::with_power(&dir_u, p_u);
    let r_d = unit.log1p(p_w * cx::norm_sqr(&dir_w) / n0);
    let r_e = unit.log1p(p_u * cx::norm_sqr(&dir_u) / n0);
    Ok((RatePoint::new(r_d, r_e), BeamformingWeights { w, u, alpha }))
}

/// Time sharing between the two MISO wiretap links, each at full power.
pub fn tdma_point(link: &SecondHop<'_>, p_r: f64, alpha: f64, unit: RateUnit) -> Result<RatePoint> {
    check_alpha(alpha)?;
    check_power(p_r)?;
    let to_d = pencil::pencil_eigmax(&PencilSpec::new(link.h, link.z, p_r, p_r, link.n0)?);
    let to_e = pencil::pencil_eigmax(&PencilSpec::new(link.z, link.h, p_r, p_r, link.n0)?);
    Ok(RatePoint::new(
        alpha * unit.log1p(to_d.excess),
        (1.0 - alpha) * unit.log1p(to_e.excess),
    ))
}

/// Outer bound: two simultaneous MISO wiretap links with powers
/// `alpha p_r` and `(1 - alpha) p_r` and no cross-stream interference.
pub fn outer_bound_point(link: &SecondHop<'_>, p_r: f64, alpha: f64, unit: RateUnit) -> Result<RatePoint> {
    check_alpha(alpha)?;
    check_power(p_r)?;
    let p_w = alpha * p_r;
    let p_u = (1.0 - alpha) * p_r;
    let r_d = if p_w > 0.0 {
        unit.log1p(pencil::pencil_eigmax(&PencilSpec::new(link.h, link.z, p_w, p_w, link.n0)?).excess)
    } else {
        0.0
    };
    let r_e = if p_u > 0.0 {
        unit.log1p(pencil::pencil_eigmax(&PencilSpec::new(link.z, link.h, p_u, p_u, link.n0)?).excess)
    } else {
        0.0
    };
    Ok(RatePoint::new(r_d, r_e))
}

/// `n` uniformly spaced power splits from 0 to 1 inclusive.
pub fn uniform_alpha_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid(format!("alpha grid needs at least 2 points, got {n}")));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / last).collect())
}

pub const DEFAULT_ALPHA_POINTS: usize = 101;

pub fn validate_alpha_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::invalid(format!(
            "alpha grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    for &a in grid {
        check_alpha(a)?;
    }
    if grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::invalid("alpha grid must be strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample {
    pub alpha: f64,
    pub point: RatePoint,
    pub weights: Option<BeamformingWeights>,
    /// Set for single null-space samples.
    pub protected: Option<Protected>,
}

/// Sampled boundary of one scheme's region. The region itself is the union
/// of the rectangles `[0, r_d] x [0, r_e]` over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCurve {
    pub scheme: Scheme,
    pub samples: Vec<RegionSample>,
    /// Indices into `samples` of the Pareto-nondominated points, ascending.
    pub frontier: Vec<usize>,
}

impl RegionCurve {
    fn from_samples(scheme: Scheme, samples: Vec<RegionSample>) -> Self {
        let points: Vec<RatePoint> = samples.iter().map(|s| s.point).collect();
        let frontier = pareto_frontier(&points);
        Self {
            scheme,
            samples,
            frontier,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = RatePoint> + '_ {
        self.samples.iter().map(|s| s.point)
    }

    pub fn frontier_points(&self) -> impl Iterator<Item = RatePoint> + '_ {
        self.frontier.iter().map(|&i| self.samples[i].point)
    }

    pub fn is_on_frontier(&self, index: usize) -> bool {
        self.frontier.binary_search(&index).is_ok()
    }

    /// Whether `p` lies in this region, reading the samples as a parametric
    /// curve in `alpha`: consecutive samples of the same variant are joined
    /// by straight segments and `p` is covered if some point of some segment
    /// dominates it up to `tol`.
    pub fn covers_point(&self, p: &RatePoint, tol: f64) -> bool {
        let mut chains: Vec<(Option<Protected>, Vec<RatePoint>)> = Vec::new();
        for s in &self.samples {
            match chains.iter_mut().find(|(k, _)| *k == s.protected) {
                Some((_, pts)) => pts.push(s.point),
                None => chains.push((s.protected, vec![s.point])),
            }
        }
        chains.iter().any(|(_, pts)| {
            pts.iter().any(|q| q.covers(p, tol)) || pts.windows(2).any(|seg| segment_covers(seg[0], seg[1], p, tol))
        })
    }

    /// Whether this region contains `other`: every frontier corner of
    /// `other` is covered in the sense of [`RegionCurve::covers_point`].
    /// Reading the samples as a curve rather than a staircase of rectangles
    /// keeps grid notches from hiding containment between near-identical
    /// regions.
    pub fn contains(&self, other: &RegionCurve, tol: f64) -> bool {
        other.frontier_points().all(|p| self.covers_point(&p, tol))
    }

    /// Vertices of the upper-right convex hull of the samples, i.e. the
    /// frontier after time sharing between power splits.
    pub fn time_sharing_frontier(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.frontier.clone();
        idx.sort_by(|&a, &b| {
            let (pa, pb) = (self.samples[a].point, self.samples[b].point);
            pa.r_d.total_cmp(&pb.r_d).then(pb.r_e.total_cmp(&pa.r_e))
        });
        // Monotone chain over points sorted by r_d (r_e descending along the
        // frontier); keep only right turns.
        let mut hull: Vec<usize> = Vec::new();
        for i in idx {
            while hull.len() >= 2 {
                let o = self.samples[hull[hull.len() - 2]].point;
                let a = self.samples[hull[hull.len() - 1]].point;
                let b = self.samples[i].point;
                let cross = (a.r_d - o.r_d) * (b.r_e - o.r_e) - (a.r_e - o.r_e) * (b.r_d - o.r_d);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        hull.sort_unstable();
        hull
    }
}

/// Is there `t` in `[0, 1]` with `a + t (b - a) >= p - tol` componentwise?
fn segment_covers(a: RatePoint, b: RatePoint, p: &RatePoint, tol: f64) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (start, end, target) in [(a.r_d, b.r_d, p.r_d - tol), (a.r_e, b.r_e, p.r_e - tol)] {
        let slope = end - start;
        let need = target - start;
        if slope > 0.0 {
            lo = lo.max(need / slope);
        } else if slope < 0.0 {
            hi = hi.min(need / slope);
        } else if need > 0.0 {
            return false;
        }
    }
    lo <= hi
}

/// Indices of the points not dominated by any other point. Of several
/// identical points only the first is kept.
pub fn pareto_frontier(points: &[RatePoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    // r_d descending, then r_e descending, then index ascending.
    order.sort_by(|&a, &b| {
        points[b]
            .r_d
            .total_cmp(&points[a].r_d)
            .then(points[b].r_e.total_cmp(&points[a].r_e))
            .then(a.cmp(&b))
    });
    let mut best_e = f64::NEG_INFINITY;
    let mut keep = Vec::new();
    for i in order {
        if points[i].r_e > best_e {
            keep.push(i);
            best_e = points[i].r_e;
        }
    }
    keep.sort_unstable();
    keep
}

/// Evaluate `scheme` over `alpha_grid`.
///
/// `SingleNullUnion` evaluates both protected variants at every alpha (the
/// `D` sample first) and extracts one frontier from the merged set.
pub fn build_region(
    scheme: Scheme,
    link: &SecondHop<'_>,
    p_r: f64,
    alpha_grid: &[f64],
    unit: RateUnit,
) -> Result<RegionCurve> {
    validate_alpha_grid(alpha_grid)?;
    let mut samples = Vec::with_capacity(alpha_grid.len() * 2);
    for &alpha in alpha_grid {
        match scheme {
            Scheme::SingleNullD | Scheme::SingleNullE | Scheme::SingleNullUnion => {
                let variants: &[Protected] = match scheme {
                    Scheme::SingleNullD => &[Protected::D],
                    Scheme::SingleNullE => &[Protected::E],
                    _ => &[Protected::D, Protected::E],
                };
                for &prot in variants {
                    let (point, weights) = single_null_point(link, p_r, alpha, prot, unit)?;
                    samples.push(RegionSample {
                        alpha,
                        point,
                        weights: Some(weights),
                        protected: Some(prot),
                    });
                }
            }
            Scheme::DoubleNull => {
                let (point, weights) = double_null_point(link, p_r, alpha, unit)?;
                samples.push(RegionSample {
                    alpha,
                    point,
                    weights: Some(weights),
                    protected: None,
                });
            }
            Scheme::Tdma => {
                let point = tdma_point(link, p_r, alpha, unit)?;
                samples.push(RegionSample {
                    alpha,
                    point,
                    weights: None,
                    protected: None,
                });
            }
            Scheme::Outer => {
                let point = outer_bound_point(link, p_r, alpha, unit)?;
                samples.push(RegionSample {
                    alpha,
                    point,
                    weights: None,
                    protected: None,
                });
            }
        }
    }
    Ok(RegionCurve::from_samples(scheme, samples))
}

/// Clip every sample into the first-hop triangle `r_d + r_e <= c1`:
/// `r_d' = min(r_d, c1)`, `r_e' = min(r_e, c1 - r_d')`.
pub fn apply_first_hop_cap(region: &RegionCurve, c1: f64) -> Result<RegionCurve> {
    if !(c1 >= 0.0) {
        return Err(Error::invalid(format!(
            "first-hop capacity must be nonnegative, got {c1}"
        )));
    }
    let samples = region
        .samples
        .iter()
        .map(|s| {
            let r_d = s.point.r_d.min(c1);
            let r_e = s.point.r_e.min(c1 - r_d);
            RegionSample {
                point: RatePoint::new(r_d, r_e),
                ..s.clone()
            }
        })
        .collect();
    Ok(RegionCurve::from_samples(region.scheme, samples))
}

pub const REGION_CSV_HEADER: &str = "scheme,alpha,R_d,R_e,on_frontier";

/// Region CSV: one row per sample, 12 significant digits, LF line endings.
/// With `time_sharing` the `on_frontier` column marks the convex-hull
/// vertices instead of the plain Pareto frontier.
pub fn region_csv(regions: &[RegionCurve], time_sharing: bool) -> String {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for region in regions {
        let marked = if time_sharing {
            region.time_sharing_frontier()
        } else {
            region.frontier.clone()
        };
        for (i, s) in region.samples.iter().enumerate() {
            let on = marked.binary_search(&i).is_ok();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                region.scheme,
                fmt_f64_12(s.alpha),
                fmt_f64_12(s.point.r_d),
                fmt_f64_12(s.point.r_e),
                u8::from(on)
            );
        }
    }
    out
}
