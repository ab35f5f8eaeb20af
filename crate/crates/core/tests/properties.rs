use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use relay_secrecy::channel::ChannelRealization;
use relay_secrecy::cx;
use relay_secrecy::pencil::{self, PencilSpec};
use relay_secrecy::schemes::{self, Protected, RatePoint, Scheme, SecondHop};
use relay_secrecy::{Complex64, RateUnit};

fn cvec(m: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), m)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect::<Vec<_>>())
        .prop_filter("nonzero", |v| cx::norm(v) > 1e-2)
}

fn channel_pair(lo: usize, hi: usize) -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (lo..=hi).prop_flat_map(|m| (cvec(m), cvec(m)))
}

fn power() -> impl Strategy<Value = f64> {
    (-2.0..2.0f64).prop_map(|e| 10f64.powf(e))
}

/// Largest generalized eigenvalue by Cholesky whitening and a dense
/// Hermitian eigensolver.
fn dense_eigmax(h: &[Complex64], z: &[Complex64], a: f64, b: f64, n0: f64) -> f64 {
    let m = h.len();
    let hv = DVector::from_column_slice(h);
    let zv = DVector::from_column_slice(z);
    let id = DMatrix::<Complex64>::identity(m, m) * Complex64::new(n0, 0.0);
    let num = &id + &hv * hv.adjoint() * Complex64::new(a, 0.0);
    let den = &id + &zv * zv.adjoint() * Complex64::new(b, 0.0);
    let l = den.cholesky().expect("denominator is positive definite").l();
    let l_inv = l.try_inverse().unwrap();
    let c = &l_inv * num * l_inv.adjoint();
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    c.symmetric_eigenvalues().max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eigmax_matches_dense_solver((h, z) in channel_pair(1, 6), a in power(), b in power(), n0 in 0.1..10.0f64) {
        let spec = PencilSpec::new(&h, &z, a, b, n0).unwrap();
        let got = pencil::pencil_eigmax(&spec);
        let want = dense_eigmax(&h, &z, a, b, n0);
        prop_assert!((got.lambda_max - want).abs() <= 1e-9 * want, "{} vs {}", got.lambda_max, want);
    }

    #[test]
    fn eigvec_is_unit_and_attains_lambda((h, z) in channel_pair(1, 6), a in power(), b in power()) {
        let spec = PencilSpec::new(&h, &z, a, b, 1.0).unwrap();
        let got = pencil::pencil_eigmax(&spec);
        prop_assert!((cx::norm(&got.eigvec) - 1.0).abs() < 1e-12);
        let rq = pencil::rayleigh_quotient(&got.eigvec, &spec).unwrap();
        prop_assert!((rq - got.lambda_max).abs() <= 1e-9 * got.lambda_max);
        prop_assert!((got.excess - (got.lambda_max - 1.0)).abs() <= 1e-12 * got.lambda_max);
        if h.len() >= 2 {
            prop_assert!(got.lambda_max >= 1.0);
        }
    }

    #[test]
    fn eigmax_bounds_random_quotients((h, z) in channel_pair(2, 5), a in power(), b in power(), w in cvec(5)) {
        let spec = PencilSpec::new(&h, &z, a, b, 1.0).unwrap();
        let lambda = pencil::pencil_eigmax(&spec).lambda_max;
        let rq = pencil::rayleigh_quotient(&w[..h.len()], &spec);
        if let Ok(rq) = rq {
            prop_assert!(rq <= lambda * (1.0 + 1e-12));
        }
    }

    #[test]
    fn projector_annihilates_and_is_idempotent((v, x) in channel_pair(1, 6)) {
        let once = pencil::null_projector_apply(&v, &x).unwrap();
        let twice = pencil::null_projector_apply(&v, &once).unwrap();
        let scale = cx::norm(&v) * cx::norm(&x);
        prop_assert!(cx::dot(&v, &once).norm() <= 1e-12 * scale);
        let diff: f64 = once.iter().zip(&twice).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-12 * cx::norm(&x));
        let energy = pencil::projected_energy(&v, &x).unwrap();
        prop_assert!((energy - cx::norm_sqr(&once)).abs() <= 1e-12 * cx::norm_sqr(&x));
        prop_assert!(energy <= cx::norm_sqr(&x) * (1.0 + 1e-12));
    }

    #[test]
    fn per_alpha_scheme_ordering((h, z) in channel_pair(2, 6), p_r in power(), alpha in 0.0..=1.0f64) {
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let unit = RateUnit::Nats;
        let outer = schemes::outer_bound_point(&link, p_r, alpha, unit).unwrap();
        let (se, _) = schemes::single_null_point(&link, p_r, alpha, Protected::E, unit).unwrap();
        let (sd, _) = schemes::single_null_point(&link, p_r, alpha, Protected::D, unit).unwrap();
        let (dn, wts) = schemes::double_null_point(&link, p_r, alpha, unit).unwrap();
        let tol = 1e-12 * (1.0 + outer.r_d.max(outer.r_e));
        prop_assert!((outer.r_d - se.r_d).abs() <= 1e-9 * outer.r_d.max(1e-300));
        prop_assert!((outer.r_e - sd.r_e).abs() <= 1e-9 * outer.r_e.max(1e-300));
        prop_assert!(dn.r_d <= se.r_d + tol && se.r_e <= dn.r_e + tol);
        prop_assert!(dn.r_e <= sd.r_e + tol && sd.r_d <= dn.r_d + tol);
        prop_assert!(dn.r_d <= outer.r_d + tol && dn.r_e <= outer.r_e + tol);
        prop_assert!(wts.power() <= p_r * (1.0 + 1e-9));
        let back = schemes::achievable_rates(&link, &wts, unit).unwrap();
        prop_assert!((back.r_d - dn.r_d).abs() <= 1e-9 * dn.r_d.max(1e-12));
        prop_assert!((back.r_e - dn.r_e).abs() <= 1e-9 * dn.r_e.max(1e-12));
    }

    #[test]
    fn tdma_lies_under_the_outer_bound((h, z) in channel_pair(1, 6), p_r in power(), alpha in 0.0..=1.0f64) {
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let t = schemes::tdma_point(&link, p_r, alpha, RateUnit::Bits).unwrap();
        let o = schemes::outer_bound_point(&link, p_r, alpha, RateUnit::Bits).unwrap();
        prop_assert!(t.r_d <= o.r_d * (1.0 + 1e-12) + 1e-15);
        prop_assert!(t.r_e <= o.r_e * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn frontier_is_exactly_the_nondominated_set(pts in prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), 1..40)) {
        let points: Vec<RatePoint> = pts.into_iter().map(|(d, e)| RatePoint::new(d, e)).collect();
        let frontier = schemes::pareto_frontier(&points);
        prop_assert!(frontier.windows(2).all(|w| w[0] < w[1]));
        for (i, p) in points.iter().enumerate() {
            let dominated = points.iter().any(|q| q.dominates(p));
            let earlier_duplicate = points[..i].iter().any(|q| q == p);
            prop_assert_eq!(frontier.contains(&i), !dominated && !earlier_duplicate);
        }
    }

    #[test]
    fn first_hop_cap_clips_without_growing((h, z) in channel_pair(2, 5), p_r in power(), c1 in 0.0..4.0f64) {
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let grid = schemes::uniform_alpha_grid(21).unwrap();
        for scheme in Scheme::ALL {
            let region = schemes::build_region(scheme, &link, p_r, &grid, RateUnit::Bits).unwrap();
            let capped = schemes::apply_first_hop_cap(&region, c1).unwrap();
            for (a, b) in region.samples.iter().zip(&capped.samples) {
                prop_assert!(b.point.r_d <= a.point.r_d && b.point.r_e <= a.point.r_e);
                prop_assert!(b.point.r_d + b.point.r_e <= c1 + 1e-12);
                if a.point.r_d + a.point.r_e <= c1 {
                    prop_assert_eq!(a.point, b.point);
                }
            }
        }
    }

    #[test]
    fn realization_json_is_bit_exact((h, z) in channel_pair(1, 8), n0 in 1e-3..1e3f64) {
        let r = ChannelRealization::new(h, z, n0).unwrap();
        let back = ChannelRealization::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn unit_conversion_is_a_fixed_scale((h, z) in channel_pair(2, 5), p_r in power(), alpha in 0.0..=1.0f64) {
        let link = SecondHop::new(&h, &z, 1.0).unwrap();
        let bits = schemes::outer_bound_point(&link, p_r, alpha, RateUnit::Bits).unwrap();
        let nats = schemes::outer_bound_point(&link, p_r, alpha, RateUnit::Nats).unwrap();
        let ln2 = std::f64::consts::LN_2;
        prop_assert!((bits.r_d * ln2 - nats.r_d).abs() <= 1e-12 * nats.r_d.max(1e-300));
        prop_assert!((bits.r_e * ln2 - nats.r_e).abs() <= 1e-12 * nats.r_e.max(1e-300));
    }
}
