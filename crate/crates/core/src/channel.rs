//! Channel realizations and the Rayleigh fading sampler.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::format::fmt_f64_17;
use crate::{cx, Error, RateUnit, Result};

/// One draw of the second-hop channels (and optionally the first hop).
///
/// `h` and `z` are stored as the vectors whose conjugate inner product with a
/// weight vector gives the received amplitude, i.e. `y_d = h† w x_d + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: Vec<Complex64>,
    z: Vec<Complex64>,
    g: Option<Vec<Complex64>>,
    n0: f64,
    noise_relay: Option<Vec<f64>>,
    seed_tag: String,
}

impl ChannelRealization {
    pub fn new(h: Vec<Complex64>, z: Vec<Complex64>, n0: f64) -> Result<Self> {
        Self::with_first_hop(h, z, None, n0, None, String::new())
    }

    pub fn with_first_hop(
        h: Vec<Complex64>,
        z: Vec<Complex64>,
        g: Option<Vec<Complex64>>,
        n0: f64,
        noise_relay: Option<Vec<f64>>,
        seed_tag: String,
    ) -> Result<Self> {
        let m = h.len();
        if m == 0 {
            return Err(Error::invalid("at least one relay is required"));
        }
        if z.len() != m {
            return Err(Error::invalid(format!("h has {m} entries but z has {}", z.len())));
        }
        if let Some(g) = &g {
            if g.len() != m {
                return Err(Error::invalid(format!("h has {m} entries but g has {}", g.len())));
            }
        }
        if let Some(nr) = &noise_relay {
            if nr.len() != m {
                return Err(Error::invalid(format!(
                    "h has {m} entries but noise_relay has {}",
                    nr.len()
                )));
            }
            if nr.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::invalid("relay noise variances must be positive"));
            }
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::invalid(format!("n0 must be positive, got {n0}")));
        }
        let finite = |v: &[Complex64]| v.iter().all(|x| x.re.is_finite() && x.im.is_finite());
        if !finite(&h) || !finite(&z) || g.as_deref().is_some_and(|g| !finite(g)) {
            return Err(Error::invalid("channel coefficients must be finite"));
        }
        // projectors divide by |h|^2 and |z|^2
        if cx::is_zero(&h) {
            return Err(Error::invalid("h is identically zero"));
        }
        if cx::is_zero(&z) {
            return Err(Error::invalid("z is identically zero"));
        }
        Ok(Self {
            h,
            z,
            g,
            n0,
            noise_relay,
            seed_tag,
        })
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[Complex64] {
        &self.h
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn g(&self) -> Option<&[Complex64]> {
        self.g.as_deref()
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn noise_relay(&self) -> Option<&[f64]> {
        self.noise_relay.as_deref()
    }

    pub fn seed_tag(&self) -> &str {
        &self.seed_tag
    }

    /// First-hop sum-rate limit, when `g` and the relay noise are known.
    pub fn first_hop_capacity(&self, p_s: f64, unit: RateUnit) -> Result<f64> {
        match (&self.g, &self.noise_relay) {
            (Some(g), Some(nr)) => first_hop_capacity(g, p_s, nr, unit),
            _ => Err(Error::invalid("realization carries no first-hop channel")),
        }
    }

    /// Serialize to the realization JSON format. Floats carry 17 significant
    /// digits so that parsing returns bit-identical values.
    pub fn to_json(&self) -> String {
        fn cvec(out: &mut String, v: &[Complex64]) {
            out.push('[');
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "[{}, {}]", fmt_f64_17(c.re), fmt_f64_17(c.im));
            }
            out.push(']');
        }

        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"m\": {},", self.m());
        out.push_str("  \"h\": ");
        cvec(&mut out, &self.h);
        out.push_str(",\n  \"z\": ");
        cvec(&mut out, &self.z);
        out.push_str(",\n  \"g\": ");
        match &self.g {
            Some(g) => cvec(&mut out, g),
            None => out.push_str("null"),
        }
        let _ = write!(out, ",\n  \"n0\": {},\n  \"noise_relay\": ", fmt_f64_17(self.n0));
        match &self.noise_relay {
            Some(nr) => {
                out.push('[');
                for (i, v) in nr.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&fmt_f64_17(*v));
                }
                out.push(']');
            }
            None => out.push_str("null"),
        }
        let tag = serde_json::to_string(&self.seed_tag).expect("string serialization");
        let _ = write!(out, ",\n  \"seed_tag\": {tag}\n}}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawRealization = serde_json::from_str(text)?;
        let to_cx = |v: Vec<[f64; 2]>| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect::<Vec<_>>();
        let h = to_cx(raw.h);
        if h.len() != raw.m {
            return Err(Error::Parse(format!("m = {} but h has {} entries", raw.m, h.len())));
        }
        Self::with_first_hop(h, to_cx(raw.z), raw.g.map(to_cx), raw.n0, raw.noise_relay, raw.seed_tag)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRealization {
    m: usize,
    h: Vec<[f64; 2]>,
    z: Vec<[f64; 2]>,
    #[serde(default)]
    g: Option<Vec<[f64; 2]>>,
    n0: f64,
    #[serde(default)]
    noise_relay: Option<Vec<f64>>,
    #[serde(default)]
    seed_tag: String,
}

/// Parameters of the i.i.d. Rayleigh fading model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub m: usize,
    pub sigma_g: f64,
    pub sigma_h: f64,
    pub sigma_z: f64,
    pub n0: f64,
    pub seed: u64,
}

impl FadingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        for (name, v) in [
            ("sigma_g", self.sigma_g),
            ("sigma_h", self.sigma_h),
            ("sigma_z", self.sigma_z),
            ("n0", self.n0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Draw realization `draw_index` of the ensemble described by `cfg`.
///
/// Each draw uses its own ChaCha20 stream (`stream = draw_index`) under the
/// configured seed, so the result does not depend on which draws were made
/// before. Entries are circularly symmetric complex Gaussian with independent
/// `N(0, sigma^2 / 2)` real and imaginary parts. The first-hop channel is
/// always drawn and every relay noise variance is set to `n0`.
pub fn sample_channel(cfg: &FadingConfig, draw_index: u64) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(draw_index);

    let mut draw = |sigma: f64| -> Vec<Complex64> {
        let s = sigma / std::f64::consts::SQRT_2;
        (0..cfg.m)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(s * re, s * im)
            })
            .collect()
    };
    let h = draw(cfg.sigma_h);
    let z = draw(cfg.sigma_z);
    let g = draw(cfg.sigma_g);

    ChannelRealization::with_first_hop(
        h,
        z,
        Some(g),
        cfg.n0,
        Some(vec![cfg.n0; cfg.m]),
        format!("seed={};draw={}", cfg.seed, draw_index),
    )
}

/// `min_m log(1 + |g_m|^2 p_s / N_m)`: the sum-rate cap of the first hop.
pub fn first_hop_capacity(g: &[Complex64], p_s: f64, noise_relay: &[f64], unit: RateUnit) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::invalid("first hop needs at least one relay"));
    }
    if g.len() != noise_relay.len() {
        return Err(Error::invalid(format!(
            "g has {} entries but noise_relay has {}",
            g.len(),
            noise_relay.len()
        )));
    }
    if !(p_s > 0.0) {
        return Err(Error::invalid(format!("p_s must be positive, got {p_s}")));
    }
    if noise_relay.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::invalid("relay noise variances must be positive"));
    }
    let snr = g
        .iter()
        .zip(noise_relay)
        .map(|(g, n)| g.norm_sqr() * p_s / n)
        .fold(f64::INFINITY, f64::min);
    Ok(unit.log1p(snr))
}
