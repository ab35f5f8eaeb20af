//! Invariant suite run by `relay-secrecy validate` on a single realization.

use std::fmt;

use crate::channel::ChannelRealization;
use crate::pencil::{self, PencilSpec};
use crate::schemes::{self, Protected, RegionCurve, Scheme, SecondHop};
use crate::{cx, RateUnit, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for information; never fails the suite.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        };
        if self.detail.is_empty() {
            write!(f, "{tag} {}", self.name)
        } else {
            write!(f, "{tag} {}: {}", self.name, self.detail)
        }
    }
}

pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const NULL_TOL: f64 = 1e-10;
pub const ORDER_TOL: f64 = 1e-12;
pub const POWER_TOL: f64 = 1e-9;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

struct Check {
    name: &'static str,
    violations: usize,
    first: Option<String>,
    info_only: bool,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            violations: 0,
            first: None,
            info_only: false,
        }
    }

    fn info(name: &'static str) -> Self {
        Self {
            info_only: true,
            ..Self::new(name)
        }
    }

    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    fn outcome(self) -> CheckOutcome {
        let status = match (self.violations, self.info_only) {
            (0, _) => Status::Pass,
            (_, true) => Status::Info,
            (_, false) => Status::Fail,
        };
        let detail = match self.first {
            Some(first) => format!("{} violation(s), first: {first}", self.violations),
            None => String::new(),
        };
        CheckOutcome {
            name: self.name,
            status,
            detail,
        }
    }
}

/// Run every invariant on `realization` at relay power `p_r` over
/// `alpha_grid`. Null-space checks are skipped for a single relay.
pub fn run_suite(
    realization: &ChannelRealization,
    p_r: f64,
    alpha_grid: &[f64],
    unit: RateUnit,
) -> Result<Vec<CheckOutcome>> {
    schemes::validate_alpha_grid(alpha_grid)?;
    let link = SecondHop::from(realization);
    let n0 = link.n0();
    let mut out = Vec::new();

    let mut eig = Check::new("pencil_eigvec_attains_lambda");
    let mut lower = Check::new("pencil_lambda_at_least_one");
    let mut oracle = Check::new("pencil_bounds_brute_force");
    for &alpha in alpha_grid.iter().step_by(10) {
        let t = alpha * p_r;
        for (h, z) in [(link.h(), link.z()), (link.z(), link.h())] {
            let spec = PencilSpec::new(h, z, t, t, n0)?;
            let res = pencil::pencil_eigmax(&spec);
            let rq = pencil::rayleigh_quotient(&res.eigvec, &spec)?;
            eig.expect(rel_close(rq, res.lambda_max, 1e-9), || {
                format!("alpha={alpha}: {rq} vs {}", res.lambda_max)
            });
            if link.m() >= 2 {
                lower.expect(res.lambda_max >= 1.0, || format!("alpha={alpha}: {}", res.lambda_max));
            }
            let bf = pencil::brute_force_oracle(&spec, 2000, 17);
            oracle.expect(bf <= res.lambda_max * (1.0 + 1e-12), || {
                format!("alpha={alpha}: {bf} > {}", res.lambda_max)
            });
        }
    }
    out.extend([eig.outcome(), lower.outcome(), oracle.outcome()]);

    let mut idem = Check::new("projector_idempotent");
    for (v, x) in [(link.h(), link.z()), (link.z(), link.h())] {
        let once = pencil::null_projector_apply(v, x)?;
        let twice = pencil::null_projector_apply(v, &once)?;
        let diff: f64 = once
            .iter()
            .zip(&twice)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        idem.expect(diff <= 1e-12 * cx::norm(x), || format!("difference {diff:e}"));
    }
    out.push(idem.outcome());

    let mut regions: Vec<RegionCurve> = Vec::new();
    for scheme in Scheme::ALL {
        if scheme.needs_null_space() && link.m() < 2 {
            continue;
        }
        regions.push(schemes::build_region(scheme, &link, p_r, alpha_grid, unit)?);
    }
    let region = |s: Scheme| regions.iter().find(|r| r.scheme == s);

    let mut nonneg = Check::new("rates_nonnegative");
    let mut frontier = Check::new("frontier_nondominated");
    for r in &regions {
        for s in &r.samples {
            nonneg.expect(s.point.r_d >= 0.0 && s.point.r_e >= 0.0, || {
                format!("{} alpha={}", r.scheme, s.alpha)
            });
        }
        for &i in &r.frontier {
            let p = r.samples[i].point;
            frontier.expect(!r.points().any(|q| q.dominates(&p)), || {
                format!("{} sample {i}", r.scheme)
            });
        }
    }
    out.extend([nonneg.outcome(), frontier.outcome()]);

    let outer = region(Scheme::Outer).expect("outer is always built");
    let tdma = region(Scheme::Tdma).expect("tdma is always built");
    let mut corners = Check::new("tdma_corners_match_outer");
    let (first, last) = (alpha_grid[0], alpha_grid[alpha_grid.len() - 1]);
    if last == 1.0 {
        let t = tdma.samples.last().unwrap().point;
        let o = outer.samples.last().unwrap().point;
        corners.expect(t.r_d == o.r_d, || format!("alpha=1: {} vs {}", t.r_d, o.r_d));
    }
    if first == 0.0 {
        let t = tdma.samples[0].point;
        let o = outer.samples[0].point;
        corners.expect(t.r_e == o.r_e, || format!("alpha=0: {} vs {}", t.r_e, o.r_e));
    }
    out.push(corners.outcome());

    let mut mono = Check::new("outer_double_monotone_in_alpha");
    let mut mono_single = Check::info("single_null_monotone_in_alpha");
    for r in &regions {
        let target = match r.scheme {
            Scheme::Outer | Scheme::DoubleNull => &mut mono,
            Scheme::SingleNullD | Scheme::SingleNullE => &mut mono_single,
            _ => continue,
        };
        for w in r.samples.windows(2) {
            let (a, b) = (w[0].point, w[1].point);
            target.expect(b.r_d >= a.r_d - ORDER_TOL && b.r_e <= a.r_e + ORDER_TOL, || {
                format!("{} between alpha={} and {}", r.scheme, w[0].alpha, w[1].alpha)
            });
        }
    }
    out.push(mono.outcome());

    if link.m() >= 2 {
        let mut round_trip = Check::new("evaluator_round_trip");
        let mut nulls = Check::new("null_constraints");
        let mut power = Check::new("power_budget");
        let mut orders = Check::new("per_alpha_orderings");
        let single_d = region(Scheme::SingleNullD).unwrap();
        let single_e = region(Scheme::SingleNullE).unwrap();
        let double = region(Scheme::DoubleNull).unwrap();
        for r in [single_d, single_e, double] {
            for s in &r.samples {
                let wts = s.weights.as_ref().expect("null-space schemes carry weights");
                let back = schemes::achievable_rates(&link, wts, unit)?;
                round_trip.expect(
                    rel_close(back.r_d, s.point.r_d, ROUND_TRIP_TOL)
                        && rel_close(back.r_e, s.point.r_e, ROUND_TRIP_TOL),
                    || format!("{} alpha={}: {:?} vs {:?}", r.scheme, s.alpha, back, s.point),
                );
                power.expect(
                    wts.respects_budget(p_r, POWER_TOL) && wts.power() <= p_r + POWER_TOL,
                    || format!("{} alpha={}: power {}", r.scheme, s.alpha, wts.power()),
                );
                let hu = cx::dot(link.h(), &wts.u).norm();
                let zw = cx::dot(link.z(), &wts.w).norm();
                let hu_ok = hu <= NULL_TOL * cx::norm(link.h()) * cx::norm(&wts.u);
                let zw_ok = zw <= NULL_TOL * cx::norm(link.z()) * cx::norm(&wts.w);
                let ok = match (r.scheme, s.protected) {
                    (Scheme::DoubleNull, _) => hu_ok && zw_ok,
                    (_, Some(Protected::E)) => hu_ok,
                    _ => zw_ok,
                };
                nulls.expect(ok, || {
                    format!("{} alpha={}: |h'u|={hu:e} |z'w|={zw:e}", r.scheme, s.alpha)
                });
            }
        }
        for (i, &alpha) in alpha_grid.iter().enumerate() {
            let o = outer.samples[i].point;
            let se = single_e.samples[i].point;
            let sd = single_d.samples[i].point;
            let d = double.samples[i].point;
            orders.expect(rel_close(o.r_d, se.r_d, 1e-9), || {
                format!("alpha={alpha}: outer r_d != single_e r_d")
            });
            orders.expect(rel_close(o.r_e, sd.r_e, 1e-9), || {
                format!("alpha={alpha}: outer r_e != single_d r_e")
            });
            orders.expect(d.r_d <= se.r_d + ORDER_TOL, || {
                format!("alpha={alpha}: double r_d > single_e r_d")
            });
            orders.expect(d.r_e <= sd.r_e + ORDER_TOL, || {
                format!("alpha={alpha}: double r_e > single_d r_e")
            });
            orders.expect(se.r_e <= d.r_e + ORDER_TOL, || {
                format!("alpha={alpha}: single_e r_e > double r_e")
            });
            orders.expect(sd.r_d <= d.r_d + ORDER_TOL, || {
                format!("alpha={alpha}: single_d r_d > double r_d")
            });
            orders.expect(d.r_e <= o.r_e + ORDER_TOL, || {
                format!("alpha={alpha}: double r_e > outer r_e")
            });
            orders.expect(d.r_d <= o.r_d + ORDER_TOL, || {
                format!("alpha={alpha}: double r_d > outer r_d")
            });
        }
        out.extend([round_trip.outcome(), nulls.outcome(), power.outcome(), orders.outcome()]);

        let union = region(Scheme::SingleNullUnion).unwrap();
        let mut c1 = Check::new("outer_contains_single_union");
        c1.expect(outer.contains(union, 1e-9), String::new);
        let mut c2 = Check::info("single_union_contains_double");
        c2.expect(union.contains(double, 1e-9), String::new);
        out.extend([c1.outcome(), c2.outcome()]);
    }
    out.push(mono_single.outcome());

    if realization.g().is_some() {
        let cap = realization.first_hop_capacity(1.0, unit)?;
        let mut capped = Check::new("first_hop_cap");
        for r in &regions {
            let c = schemes::apply_first_hop_cap(r, cap)?;
            for (a, b) in r.samples.iter().zip(&c.samples) {
                capped.expect(
                    b.point.r_d <= a.point.r_d
                        && b.point.r_e <= a.point.r_e
                        && b.point.r_d + b.point.r_e <= cap + 1e-12,
                    || format!("{} alpha={}", r.scheme, a.alpha),
                );
            }
        }
        out.push(capped.outcome());
    }

    Ok(out)
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.status != Status::Fail)
}
