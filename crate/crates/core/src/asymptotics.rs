//! High-SNR, low-SNR and large-`M` diagnostics.
//!
//! High SNR: the outer bound and double null-space beamforming both behave
//! like `log(alpha p_r / n0) + log c_d`, where `c_d = h† (I - z z†/|z|^2) h`
//! is the best gain towards `D` from a unit vector orthogonal to `z`.
//!
//! Low SNR: `log lambda_max(n0 I + t h h†, n0 I + t z z†) = t lambda_max(h h† - z z†) / n0 + o(t)`,
//! which the outer bound and TDMA share.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::format::fmt_f64_12;
use crate::pencil;
use crate::schemes::{self, Protected, SecondHop};
use crate::{cx, Error, RateUnit, Result};

fn require_null_space(link: &SecondHop<'_>) -> Result<()> {
    if link.m() < 2 {
        return Err(Error::dimension(format!("needs at least 2 relays, got {}", link.m())));
    }
    Ok(())
}

/// `max |h† psi|^2` over unit `psi` orthogonal to `z`, and its mirror.
pub fn high_snr_constants(link: &SecondHop<'_>) -> Result<(f64, f64)> {
    require_null_space(link)?;
    let c_d = pencil::projected_energy(link.z(), link.h())?;
    let c_e = pencil::projected_energy(link.h(), link.z())?;
    Ok((c_d, c_e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrGap {
    /// Outer bound minus double null-space, per receiver.
    pub gap_d: f64,
    pub gap_e: f64,
    /// Outer bound minus `log(alpha p_r / n0) + log c_d` (and the mirror).
    /// Infinite when the corresponding constant is zero.
    pub asymptote_gap_d: f64,
    pub asymptote_gap_e: f64,
}

pub fn high_snr_gap(link: &SecondHop<'_>, alpha: f64, p_r: f64, unit: RateUnit) -> Result<HighSnrGap> {
    require_null_space(link)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let outer = schemes::outer_bound_point(link, p_r, alpha, unit)?;
    let (double, _) = schemes::double_null_point(link, p_r, alpha, unit)?;
    let (c_d, c_e) = high_snr_constants(link)?;
    let n0 = link.n0();
    let asym_d = unit.log(alpha * p_r * c_d / n0);
    let asym_e = unit.log((1.0 - alpha) * p_r * c_e / n0);
    Ok(HighSnrGap {
        gap_d: outer.r_d - double.r_d,
        gap_e: outer.r_e - double.r_e,
        asymptote_gap_d: outer.r_d - asym_d,
        asymptote_gap_e: outer.r_e - asym_e,
    })
}

/// Largest eigenvalue of the indefinite rank-two matrix `h h† - z z†`.
///
/// Solved on `span{h, z}`; the orthogonal complement contributes eigenvalue
/// 0 whenever it is nontrivial.
pub fn difference_eigmax(h: &[Complex64], z: &[Complex64]) -> Result<f64> {
    if h.is_empty() || h.len() != z.len() {
        return Err(Error::invalid("h and z must have equal nonzero length"));
    }
    let m = h.len();
    let hh = cx::norm_sqr(h);
    let zz = cx::norm_sqr(z);
    let floor = if m >= 2 { 0.0 } else { f64::NEG_INFINITY };
    if hh == 0.0 {
        return Ok(floor.max(-zz));
    }
    if zz == 0.0 {
        return Ok(hh);
    }
    let h_hat = cx::scale_real(h, 1.0 / hh.sqrt());
    let z1 = cx::dot(&h_hat, z);
    let rest = cx::axpy(z, -z1, &h_hat);
    let z2 = cx::norm(&rest);
    if z2 == 0.0 || z1.norm() / zz.sqrt() > 1.0 - 1e-12 {
        return Ok(floor.max(hh - zz));
    }
    // [[p, q], [q*, r]] with p = |h|^2 - |z1|^2, q = -z1 z2, r = -z2^2.
    let p = hh - z1.norm_sqr();
    let r = -z2 * z2;
    let q2 = z1.norm_sqr() * z2 * z2;
    let det = -hh * z2 * z2;
    let half_tr = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q2).sqrt();
    let top = if half_tr >= 0.0 {
        half_tr + disc
    } else {
        det / (half_tr - disc)
    };
    Ok(top.max(0.0))
}

/// First-order low-SNR behaviour of every scheme: rate per unit relay power
/// as `p_r -> 0`, in nats. Multiply by `p_r` for the approximate rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowSnrSlopes {
    pub outer_d: f64,
    pub outer_e: f64,
    pub single_d: f64,
    pub single_e: f64,
    pub double_d: f64,
    pub double_e: f64,
    pub tdma_d: f64,
    pub tdma_e: f64,
}

impl LowSnrSlopes {
    pub fn in_unit(&self, unit: RateUnit) -> Self {
        let f = |x: f64| unit.from_nats(x);
        Self {
            outer_d: f(self.outer_d),
            outer_e: f(self.outer_e),
            single_d: f(self.single_d),
            single_e: f(self.single_e),
            double_d: f(self.double_d),
            double_e: f(self.double_e),
            tdma_d: f(self.tdma_d),
            tdma_e: f(self.tdma_e),
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("slope_outer_d", self.outer_d),
            ("slope_outer_e", self.outer_e),
            ("slope_single_d", self.single_d),
            ("slope_single_e", self.single_e),
            ("slope_double_d", self.double_d),
            ("slope_double_e", self.double_e),
            ("slope_tdma_d", self.tdma_d),
            ("slope_tdma_e", self.tdma_e),
        ]
    }
}

/// Low-SNR slopes at power split `alpha`. The single null-space slope for `E`
/// divides by `N_t = n0 + |z† w_opt|^2` evaluated at the actual `p_r`, so it
/// stays exact when the interference from `D`'s stream is not negligible.
pub fn low_snr_slopes(link: &SecondHop<'_>, alpha: f64, p_r: f64) -> Result<LowSnrSlopes> {
    require_null_space(link)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let n0 = link.n0();
    let lam_d = difference_eigmax(link.h(), link.z())?;
    let lam_e = difference_eigmax(link.z(), link.h())?;
    let (c_d, c_e) = high_snr_constants(link)?;
    let (_, weights) = schemes::single_null_point(link, p_r, alpha, Protected::E, RateUnit::Nats)?;
    let n_t = n0 + cx::dot(link.z(), &weights.w).norm_sqr();

    let outer_d = alpha * lam_d / n0;
    let outer_e = (1.0 - alpha) * lam_e / n0;
    Ok(LowSnrSlopes {
        outer_d,
        outer_e,
        single_d: outer_d,
        single_e: (1.0 - alpha) * c_e / n_t,
        double_d: alpha * c_d / n0,
        double_e: (1.0 - alpha) * c_e / n0,
        tdma_d: outer_d,
        tdma_e: outer_e,
    })
}

/// Relative gap between the interference-free upper bound
/// `1 + alpha p_r |h|^2 / n0` on the outer-bound eigenvalue and the double
/// null-space SNR `1 + alpha p_r c_d / n0`. Lies in `[0, 1]` and shrinks
/// roughly like `1/M` for i.i.d. Rayleigh channels.
pub fn large_m_gap(link: &SecondHop<'_>, alpha: f64, p_r: f64) -> Result<f64> {
    require_null_space(link)?;
    if !(0.0..=1.0).contains(&alpha) || !(p_r > 0.0) {
        return Err(Error::invalid(format!(
            "need alpha in [0, 1] and p_r > 0 (got {alpha}, {p_r})"
        )));
    }
    let t = alpha * p_r / link.n0();
    let hh = cx::norm_sqr(link.h());
    let along_z = cx::dot(link.z(), link.h()).norm_sqr() / cx::norm_sqr(link.z());
    Ok((t * along_z / (1.0 + t * hh)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    HighSnr,
    LowSnr,
    LargeM,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::HighSnr => "high_snr",
            Regime::LowSnr => "low_snr",
            Regime::LargeM => "large_m",
        }
    }
}

/// A sweep of one regime's diagnostics over relay powers.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub regime: Regime,
    pub alpha: f64,
    pub p_r_values: Vec<f64>,
    /// Power-independent quantities.
    pub constants: Vec<(String, f64)>,
    /// One value per entry of `p_r_values`.
    pub series: Vec<(String, Vec<f64>)>,
}

impl AsymptoticReport {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    /// Long-format CSV `regime,p_r,alpha,quantity,value`; the constants are
    /// repeated for every power.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DIAGNOSTIC_CSV_HEADER);
        out.push('\n');
        self.append_rows(&mut out);
        out
    }

    pub fn append_rows(&self, out: &mut String) {
        for (i, &p_r) in self.p_r_values.iter().enumerate() {
            let rows = self
                .constants
                .iter()
                .map(|(n, v)| (n.as_str(), *v))
                .chain(self.series.iter().map(|(n, v)| (n.as_str(), v[i])));
            for (name, value) in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    self.regime.name(),
                    fmt_f64_12(p_r),
                    fmt_f64_12(self.alpha),
                    name,
                    fmt_f64_12(value)
                );
            }
        }
    }
}

pub const DIAGNOSTIC_CSV_HEADER: &str = "regime,p_r,alpha,quantity,value";

fn check_powers(p_r_values: &[f64]) -> Result<()> {
    if p_r_values.is_empty() || p_r_values.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::invalid("power grid must be nonempty and positive"));
    }
    Ok(())
}

pub fn high_snr_report(
    link: &SecondHop<'_>,
    alpha: f64,
    p_r_values: &[f64],
    unit: RateUnit,
) -> Result<AsymptoticReport> {
    check_powers(p_r_values)?;
    let (c_d, c_e) = high_snr_constants(link)?;
    let gaps = p_r_values
        .iter()
        .map(|&p| high_snr_gap(link, alpha, p, unit))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&HighSnrGap) -> f64| gaps.iter().map(f).collect::<Vec<_>>();
    Ok(AsymptoticReport {
        regime: Regime::HighSnr,
        alpha,
        p_r_values: p_r_values.to_vec(),
        constants: vec![("c_d".into(), c_d), ("c_e".into(), c_e)],
        series: vec![
            ("gap_d".into(), pick(|g| g.gap_d)),
            ("gap_e".into(), pick(|g| g.gap_e)),
            ("asymptote_gap_d".into(), pick(|g| g.asymptote_gap_d)),
            ("asymptote_gap_e".into(), pick(|g| g.asymptote_gap_e)),
        ],
    })
}

/// Slopes (converted to `unit` per unit power) next to the measured
/// `rate / p_r` of each scheme at every power.
pub fn low_snr_report(
    link: &SecondHop<'_>,
    alpha: f64,
    p_r_values: &[f64],
    unit: RateUnit,
) -> Result<AsymptoticReport> {
    check_powers(p_r_values)?;
    let lam_d = difference_eigmax(link.h(), link.z())?;
    let lam_e = difference_eigmax(link.z(), link.h())?;
    let mut series: Vec<(String, Vec<f64>)> = Vec::new();
    let mut push = |name: &str, v: f64| match series.iter_mut().find(|(n, _)| n == name) {
        Some((_, vals)) => vals.push(v),
        None => series.push((name.to_string(), vec![v])),
    };
    for &p in p_r_values {
        let slopes = low_snr_slopes(link, alpha, p)?.in_unit(unit);
        for (name, v) in slopes.named() {
            push(name, v);
        }
        let outer = schemes::outer_bound_point(link, p, alpha, unit)?;
        let (single, _) = schemes::single_null_point(link, p, alpha, Protected::E, unit)?;
        let (double, _) = schemes::double_null_point(link, p, alpha, unit)?;
        let tdma = schemes::tdma_point(link, p, alpha, unit)?;
        for (name, pt) in [("outer", outer), ("single", single), ("double", double), ("tdma", tdma)] {
            push(&format!("measured_{name}_d"), pt.r_d / p);
            push(&format!("measured_{name}_e"), pt.r_e / p);
        }
    }
    Ok(AsymptoticReport {
        regime: Regime::LowSnr,
        alpha,
        p_r_values: p_r_values.to_vec(),
        constants: vec![("lambda_diff_d".into(), lam_d), ("lambda_diff_e".into(), lam_e)],
        series,
    })
}

pub fn large_m_report(link: &SecondHop<'_>, alpha: f64, p_r_values: &[f64]) -> Result<AsymptoticReport> {
    check_powers(p_r_values)?;
    let gaps = p_r_values
        .iter()
        .map(|&p| large_m_gap(link, alpha, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticReport {
        regime: Regime::LargeM,
        alpha,
        p_r_values: p_r_values.to_vec(),
        constants: vec![("m".into(), link.m() as f64)],
        series: vec![("large_m_gap".into(), gaps)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn constants_by_hand() {
        let h = real(&[1.0, 1.0, 0.0]);
        let z = real(&[1.0, 0.0, 0.0]);
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let (c_d, c_e) = high_snr_constants(&link).unwrap();
        assert!((c_d - 1.0).abs() < 1e-15);
        assert!((c_e - 0.5).abs() < 1e-15);

        let h = vec![c(1.0, 2.0), c(0.0, 0.0)];
        let z = vec![c(0.0, 0.0), c(0.5, -0.5)];
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        assert_eq!(high_snr_constants(&link).unwrap().0, 5.0);

        let z = cx::scale(&h, c(0.3, 0.1));
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        assert!(high_snr_constants(&link).unwrap().0 < 1e-25);

        let one = real(&[1.0]);
        let link = SecondHop::new(&one, &one, 1.0).unwrap();
        assert!(matches!(high_snr_constants(&link), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn orthogonal_channels_have_no_high_snr_gap() {
        let h = real(&[2.0, 0.0, 0.0]);
        let z = real(&[0.0, 1.0, 0.0]);
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        for p in [1.0, 1e2, 1e4, 1e6] {
            let g = high_snr_gap(&link, 0.5, p, RateUnit::Bits).unwrap();
            assert!(g.gap_d.abs() < 1e-12 && g.gap_e.abs() < 1e-12, "{g:?}");
        }
        assert!(high_snr_gap(&link, 0.0, 1.0, RateUnit::Bits).is_err());
    }

    #[test]
    fn difference_eigenvalues() {
        let h = real(&[1.0, 0.0]);
        let z = real(&[0.0, 1.0]);
        assert!((difference_eigmax(&h, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!((difference_eigmax(&z, &h).unwrap() - 1.0).abs() < 1e-15);

        let h = vec![c(1.0, 1.0), c(0.0, 2.0)];
        let z = cx::scale_real(&h, 0.5);
        let expected = cx::norm_sqr(&h) - cx::norm_sqr(&z);
        assert!((difference_eigmax(&h, &z).unwrap() - expected).abs() < 1e-14);
        assert_eq!(difference_eigmax(&z, &h).unwrap(), 0.0);
        assert_eq!(difference_eigmax(&real(&[1.0]), &real(&[2.0])).unwrap(), -3.0);
    }

    #[test]
    fn large_m_gap_examples() {
        let h = real(&[1.0, 0.0]);
        let z = real(&[0.0, 3.0]);
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        assert_eq!(large_m_gap(&link, 0.5, 2.0).unwrap(), 0.0);

        let h = vec![c(1.0, 1.0), c(0.0, 2.0)];
        let z = cx::scale(&h, c(0.0, -2.0));
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let t = 0.5 * 2.0;
        let hh = cx::norm_sqr(&h);
        let expected = t * hh / (1.0 + t * hh);
        assert!((large_m_gap(&link, 0.5, 2.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn report_csv_shape() {
        let h = real(&[1.0, 0.5, 0.0]);
        let z = real(&[0.0, 1.0, 0.2]);
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let rep = high_snr_report(&link, 0.5, &[1e2, 1e4], RateUnit::Bits).unwrap();
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DIAGNOSTIC_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 6);
        assert!(lines[1].starts_with("high_snr,1.00000000000e2,5.00000000000e-1,c_d,"));
        assert!(high_snr_report(&link, 0.5, &[], RateUnit::Bits).is_err());
        let low = low_snr_report(&link, 0.5, &[1e-4], RateUnit::Nats).unwrap();
        assert_eq!(low.series.len(), 16);
        assert_eq!(low.series("slope_tdma_d"), low.series("slope_outer_d"));
    }
}
