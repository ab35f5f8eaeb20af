//! Identity-plus-rank-one matrix pencils.
//!
//! Every scheme in this crate maximizes a Rayleigh quotient
//!
//! ```text
//!   w† (n0 I + a h h†) w
//!   --------------------
//!   w† (n0 I + b z z†) w
//! ```
//!
//! whose maximum is the largest generalized eigenvalue of the pair. Any
//! component of `w` orthogonal to both `h` and `z` pulls the quotient towards
//! 1, so the maximizer lives in `span{h, z}` (or is any vector orthogonal to
//! `z` when the maximum is 1). The solver whitens the denominator in closed
//! form and diagonalizes the resulting 2x2 Hermitian matrix.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{cx, Error, Result};

/// Cosine above which `h` and `z` are treated as parallel.
const PARALLEL_COS: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct PencilSpec<'a> {
    h: &'a [Complex64],
    z: &'a [Complex64],
    a: f64,
    b: f64,
    n0: f64,
}

impl<'a> PencilSpec<'a> {
    /// The pencil `(n0 I + a h h†, n0 I + b z z†)`.
    pub fn new(h: &'a [Complex64], z: &'a [Complex64], a: f64, b: f64, n0: f64) -> Result<Self> {
        if h.is_empty() || h.len() != z.len() {
            return Err(Error::invalid(format!(
                "pencil vectors must have equal nonzero length (got {} and {})",
                h.len(),
                z.len()
            )));
        }
        if !(a >= 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!(
                "pencil coefficients must be nonnegative (a={a}, b={b})"
            )));
        }
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::invalid(format!("n0 must be positive, got {n0}")));
        }
        Ok(Self { h, z, a, b, n0 })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &'a [Complex64] {
        self.h
    }

    pub fn z(&self) -> &'a [Complex64] {
        self.z
    }

    /// The same pencil with the roles of the two vectors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            h: self.z,
            z: self.h,
            a: self.b,
            b: self.a,
            n0: self.n0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub lambda_max: f64,
    /// `lambda_max - 1`, computed without cancellation.
    pub excess: f64,
    /// Unit-norm maximizer, largest-magnitude entry real and positive.
    pub eigvec: Vec<Complex64>,
}

/// `[w†(n0 I + a h h†)w] / [w†(n0 I + b z z†)w]`.
pub fn rayleigh_quotient(w: &[Complex64], spec: &PencilSpec<'_>) -> Result<f64> {
    if w.len() != spec.dim() {
        return Err(Error::invalid(format!(
            "w has {} entries, pencil has {}",
            w.len(),
            spec.dim()
        )));
    }
    let ww = cx::norm_sqr(w);
    if ww == 0.0 {
        return Err(Error::invalid("Rayleigh quotient of the zero vector"));
    }
    Ok(quotient_unchecked(w, ww, spec))
}

fn quotient_unchecked(w: &[Complex64], ww: f64, spec: &PencilSpec<'_>) -> f64 {
    let num = spec.n0 * ww + spec.a * cx::dot(spec.h, w).norm_sqr();
    let den = spec.n0 * ww + spec.b * cx::dot(spec.z, w).norm_sqr();
    num / den
}

/// Largest generalized eigenvalue of the pencil and a maximizing vector.
pub fn pencil_eigmax(spec: &PencilSpec<'_>) -> EigResult {
    let m = spec.dim();
    let n0 = spec.n0;
    let hh = cx::norm_sqr(spec.h);
    let zz = cx::norm_sqr(spec.z);
    let bz = spec.b * zz;

    // Denominator is a multiple of the identity.
    if bz == 0.0 {
        let excess = spec.a * hh / n0;
        if excess > 0.0 {
            return finish(1.0 + excess, excess, spec.h.to_vec());
        }
        return witness(spec);
    }

    let z_norm = zz.sqrt();
    let z_hat = cx::scale_real(spec.z, 1.0 / z_norm);
    let h1 = cx::dot(&z_hat, spec.h);
    let rest = cx::axpy(spec.h, -h1, &z_hat);
    let h2 = cx::norm(&rest);
    let parallel = hh == 0.0 || h1.norm() / hh.sqrt() > PARALLEL_COS || h2 == 0.0;

    if parallel {
        // One-dimensional span: the quotient on z_hat is the only candidate
        // apart from the value 1 on the orthogonal complement.
        let excess = (spec.a * hh - bz) / (n0 + bz);
        if m == 1 || excess > 0.0 {
            return finish(1.0 + excess, excess, z_hat);
        }
        return witness(spec);
    }

    // Whitening: B^{-1/2} = n0^{-1/2} (I + (gamma - 1) z_hat z_hat†) and
    // n0 B^{-1} = I - beta z_hat z_hat†. In the orthonormal basis
    // (z_hat, e2) of span{h, z}, B^{-1/2} A B^{-1/2} = I + K with
    // K = -beta e1 e1† + a g g†.
    let beta = bz / (n0 + bz);
    let gamma = (n0 / (n0 + bz)).sqrt();
    let e2 = cx::scale_real(&rest, 1.0 / h2);
    let g1 = h1 * (gamma / n0.sqrt());
    let g2 = h2 / n0.sqrt();
    let p = -beta + spec.a * g1.norm_sqr();
    let r = spec.a * g2 * g2;
    let q = g1 * (spec.a * g2);
    let det = -beta * r;

    let half_tr = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    let mu = if half_tr >= 0.0 {
        half_tr + disc
    } else {
        let mu_min = half_tr - disc;
        if mu_min == 0.0 {
            0.0
        } else {
            det / mu_min
        }
    };
    if !(mu > 0.0) {
        return witness(spec);
    }

    // Eigenvector of [[p, q], [q*, r]] for mu; take the better conditioned
    // of the two equivalent forms.
    let cand_a = (q, Complex64::new(mu - p, 0.0));
    let cand_b = (Complex64::new(mu - r, 0.0), q.conj());
    let na = cand_a.0.norm_sqr() + cand_a.1.norm_sqr();
    let nb = cand_b.0.norm_sqr() + cand_b.1.norm_sqr();
    let (y1, y2) = if na >= nb { cand_a } else { cand_b };
    let (y1, y2) = if na.max(nb) == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (y1, y2)
    };

    // Undo the whitening, dropping the common n0^{-1/2} factor.
    let v: Vec<Complex64> = z_hat
        .iter()
        .zip(&e2)
        .map(|(zh, e)| zh * (y1 * gamma) + e * y2)
        .collect();
    finish(1.0 + mu, mu, v)
}

fn finish(lambda_max: f64, excess: f64, mut v: Vec<Complex64>) -> EigResult {
    let n = cx::norm(&v);
    for x in v.iter_mut() {
        *x /= n;
    }
    cx::canonical_phase(&mut v);
    EigResult {
        lambda_max,
        excess,
        eigvec: v,
    }
}

/// Eigenvalue 1 with a canonical maximizer orthogonal to `z`: the projection
/// of `h`, or failing that of the first coordinate vector that survives.
fn witness(spec: &PencilSpec<'_>) -> EigResult {
    let m = spec.dim();
    let use_z = spec.b > 0.0 && !cx::is_zero(spec.z);
    let project = |x: &[Complex64]| -> Vec<Complex64> {
        if use_z {
            null_projector_apply(spec.z, x).expect("nonzero z")
        } else {
            x.to_vec()
        }
    };
    let mut candidates = vec![spec.h.to_vec()];
    for k in 0..m {
        let mut e = vec![Complex64::new(0.0, 0.0); m];
        e[k] = Complex64::new(1.0, 0.0);
        candidates.push(e);
    }
    for cand in candidates {
        let cn = cx::norm(&cand);
        if cn == 0.0 {
            continue;
        }
        let v = project(&cand);
        if cx::norm(&v) > 1e-8 * cn {
            return finish(1.0, 0.0, v);
        }
    }
    unreachable!("coordinate vectors cannot all lie along z when m >= 2")
}

/// `(I - v v† / |v|^2) x`: the component of `x` orthogonal to `v`.
pub fn null_projector_apply(v: &[Complex64], x: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != x.len() {
        return Err(Error::invalid(format!(
            "projector of length {} applied to {}",
            v.len(),
            x.len()
        )));
    }
    let vv = cx::norm_sqr(v);
    if vv == 0.0 {
        return Err(Error::invalid("projector onto the null space of a zero vector"));
    }
    let coef = cx::dot(v, x) / vv;
    Ok(cx::axpy(x, -coef, v))
}

/// `x† (I - v v†/|v|^2) x = |x|^2 - |v† x|^2 / |v|^2`, clamped at 0.
pub fn projected_energy(v: &[Complex64], x: &[Complex64]) -> Result<f64> {
    let p = null_projector_apply(v, x)?;
    Ok(cx::norm_sqr(&p))
}

/// Running maximum of the Rayleigh quotient over `trials` random directions,
/// each drawn uniformly from the unit sphere of `span{h, z}`.
///
/// The maximizer is known to lie in that subspace, so restricting the search
/// there keeps a few thousand trials informative even for large `M`. When the
/// subspace is a proper subset of `C^M` the value 1 (attained on its
/// orthogonal complement) is included. Trials are drawn sequentially from a
/// single ChaCha20 stream, so a longer run extends a shorter one.
pub fn brute_force_oracle(spec: &PencilSpec<'_>, trials: usize, seed: u64) -> f64 {
    let basis = span_basis(spec.h, spec.z);
    let mut best = if basis.len() < spec.dim() {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    if basis.is_empty() {
        return best;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let coeffs: Vec<Complex64> = basis.iter().map(|_| gaussian(&mut rng)).collect();
        let mut w = vec![Complex64::new(0.0, 0.0); spec.dim()];
        for (c, q) in coeffs.iter().zip(&basis) {
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi += c * qi;
            }
        }
        let ww = cx::norm_sqr(&w);
        if ww > 0.0 {
            best = best.max(quotient_unchecked(&w, ww, spec));
        }
    }
    best
}

/// Running maximum of the Rayleigh quotient over `trials` directions drawn
/// uniformly from the whole unit sphere of `C^M`.
pub fn brute_force_oracle_full(spec: &PencilSpec<'_>, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials.max(1) {
        let w: Vec<Complex64> = (0..spec.dim()).map(|_| gaussian(&mut rng)).collect();
        let ww = cx::norm_sqr(&w);
        if ww > 0.0 {
            best = best.max(quotient_unchecked(&w, ww, spec));
        }
    }
    best
}

fn gaussian(rng: &mut ChaCha20Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Orthonormal basis of `span{h, z}` by modified Gram-Schmidt.
fn span_basis(h: &[Complex64], z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(2);
    for v in [h, z] {
        let scale = cx::norm(v);
        if scale == 0.0 {
            continue;
        }
        let mut r = v.to_vec();
        for q in &basis {
            let c = cx::dot(q, &r);
            r = cx::axpy(&r, -c, q);
        }
        let n = cx::norm(&r);
        if n > 1e-10 * scale {
            basis.push(cx::scale_real(&r, 1.0 / n));
        }
    }
    basis
}
